"""Square-free monomial quotient algebras over the naturals.

An algebra here is N[x_1..x_n] / <x_i x_j | i ~ j> for an equivalence
relation ~ on the generators (every generator is related to itself, so all
generators square to zero).  The equivalence classes are called cliques.
Morphisms are unit-preserving N-linear semiring maps, given by generator
images.  The dual numbers W = N[x]/<x^2> generate everything: each algebra
decomposes uniquely as a tensor product of powers W^n (a power W^n is the
n-generator algebra with a single clique).

Canonical basis order is the outer-major product order along the canonical
decomposition: blocks sorted by least generator index, the block basis
being [1, x_g1, x_g2, ...], and the first block varying slowest.  With
this order the basis matrix of a tensor of morphisms is the Kronecker
product of the basis matrices, which keeps every coordinate convention in
the rest of the package aligned.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CompositionMismatch, ProductUndefined, RelationNotEquivalence


class WeilAlgebra:
    """A quotient N[x_1..x_n]/<x_i x_j | i ~ j> with a canonical monomial basis."""

    def __init__(self, generator_count: int, related_pairs):
        if generator_count < 0:
            raise RelationNotEquivalence("generator count must be nonnegative")
        pairs = frozenset(frozenset(p) for p in related_pairs)
        for p in pairs:
            if not all(isinstance(i, int) and 1 <= i <= generator_count for i in p):
                raise RelationNotEquivalence(f"pair {set(p)} outside 1..{generator_count}")
            if len(p) not in (1, 2):
                raise RelationNotEquivalence(f"pair {set(p)} is not an unordered pair")
        self.generator_count = generator_count
        self.related_pairs = pairs
        self.cliques = self._validate_cliques()
        self.basis = self._enumerate_basis()
        self.basis_index = {m: i for i, m in enumerate(self.basis)}

    def _validate_cliques(self):
        n = self.generator_count
        for i in range(1, n + 1):
            if frozenset((i,)) not in self.related_pairs:
                raise RelationNotEquivalence(f"diagonal pair {{{i},{i}}} missing")
        adjacency = {i: set() for i in range(1, n + 1)}
        for p in self.related_pairs:
            if len(p) == 2:
                i, j = sorted(p)
                adjacency[i].add(j)
                adjacency[j].add(i)
        seen = set()
        cliques = []
        for i in range(1, n + 1):
            if i in seen:
                continue
            component = {i}
            stack = [i]
            while stack:
                v = stack.pop()
                for w in adjacency[v]:
                    if w not in component:
                        component.add(w)
                        stack.append(w)
            for a in component:
                for b in component:
                    if a < b and frozenset((a, b)) not in self.related_pairs:
                        raise RelationNotEquivalence(
                            f"off-diagonal relation is not transitively closed: "
                            f"{{{a},{b}}} missing from the class of {sorted(component)}"
                        )
            seen |= component
            cliques.append(tuple(sorted(component)))
        cliques.sort(key=lambda c: c[0])
        return tuple(cliques)

    def _enumerate_basis(self):
        basis = [()]
        for clique in self.cliques:
            options = [()] + [(g,) for g in clique]
            basis = [m + opt for m in basis for opt in options]
        return tuple(tuple(sorted(m)) for m in basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def key(self):
        return (self.generator_count, self.related_pairs)

    def __eq__(self, other):
        return isinstance(other, WeilAlgebra) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        blocks = decompose(self)
        if not blocks:
            return "WeilAlgebra(N)"
        return "WeilAlgebra(" + " (x) ".join(f"W^{n}" if n > 1 else "W" for n in blocks) + ")"

    def clique_of(self, gen: int):
        for c in self.cliques:
            if gen in c:
                return c
        raise KeyError(gen)

    def monomial_product(self, m1, m2):
        """Product of two basis monomials: the merged monomial, or None for zero."""
        cliques1 = {self.clique_of(g) for g in m1}
        for g in m2:
            if self.clique_of(g) in cliques1:
                return None
        return tuple(sorted(m1 + m2))

    def element(self, coefficients) -> "WeilElement":
        return WeilElement(self, coefficients)

    def zero_element(self) -> "WeilElement":
        return WeilElement(self, {})

    def one_element(self) -> "WeilElement":
        return WeilElement(self, {(): 1})

    def generator(self, i: int) -> "WeilElement":
        return WeilElement(self, {(i,): 1})


class WeilElement:
    """An element of a WeilAlgebra: natural-number combination of basis monomials."""

    def __init__(self, algebra: WeilAlgebra, coefficients):
        canonical = {}
        for mono, coeff in coefficients.items():
            mono = tuple(sorted(mono))
            if mono not in algebra.basis_index:
                raise ValueError(f"monomial {mono} is not in the basis of {algebra!r}")
            if not isinstance(coeff, int) or coeff < 0:
                raise ValueError(f"coefficient {coeff!r} is not a natural number")
            if coeff:
                canonical[mono] = canonical.get(mono, 0) + coeff
        self.algebra = algebra
        self.coefficients = canonical

    def __add__(self, other):
        assert self.algebra == other.algebra
        out = dict(self.coefficients)
        for m, c in other.coefficients.items():
            out[m] = out.get(m, 0) + c
        return WeilElement(self.algebra, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return WeilElement(self.algebra, {m: c * other for m, c in self.coefficients.items()})
        assert self.algebra == other.algebra
        out = {}
        for m1, c1 in self.coefficients.items():
            for m2, c2 in other.coefficients.items():
                prod = self.algebra.monomial_product(m1, m2)
                if prod is not None:
                    out[prod] = out.get(prod, 0) + c1 * c2
        return WeilElement(self.algebra, out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.coefficients

    def vector(self):
        """Coefficient column in the canonical basis order."""
        return tuple(self.coefficients.get(m, 0) for m in self.algebra.basis)

    def __eq__(self, other):
        return (
            isinstance(other, WeilElement)
            and self.algebra == other.algebra
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash((self.algebra, tuple(sorted(self.coefficients.items()))))

    def __repr__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for mono in self.algebra.basis:
            if mono not in self.coefficients:
                continue
            c = self.coefficients[mono]
            name = "".join(f"x{g}" for g in mono) or "1"
            parts.append(name if c == 1 and mono else f"{c}*{name}" if mono else str(c))
        return " + ".join(parts)


class WeilMorphism:
    """Unit-preserving N-linear semiring map, stored as generator images."""

    def __init__(self, source: WeilAlgebra, target: WeilAlgebra, generator_images):
        images = tuple(generator_images)
        if len(images) != source.generator_count:
            raise ValueError("one image per source generator required")
        for img in images:
            if img.algebra != target:
                raise ValueError("generator image lies in the wrong algebra")
        for p in source.related_pairs:
            i, j = (min(p), max(p))
            if not (images[i - 1] * images[j - 1]).is_zero():
                raise ValueError(
                    f"images violate the relation x{i}*x{j} = 0: "
                    f"({images[i - 1]!r}) * ({images[j - 1]!r}) != 0"
                )
        self.source = source
        self.target = target
        self.generator_images = images

    def apply(self, element: WeilElement) -> WeilElement:
        """Multiplicative-linear extension evaluated on an element."""
        assert element.algebra == self.source
        out = self.target.zero_element()
        for mono, coeff in element.coefficients.items():
            term = self.target.one_element()
            for g in mono:
                term = term * self.generator_images[g - 1]
            out = out + coeff * term
        return out

    def basis_matrix(self):
        """Matrix of the underlying N-linear map in the canonical bases.

        Entry [i][j] is the coefficient of target basis monomial i in the
        image of source basis monomial j.
        """
        cols = []
        for mono in self.source.basis:
            term = self.target.one_element()
            for g in mono:
                term = term * self.generator_images[g - 1]
            cols.append(term.vector())
        dim_t = self.target.dimension
        return tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(dim_t))

    def __eq__(self, other):
        return (
            isinstance(other, WeilMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.generator_images == other.generator_images
        )

    def __hash__(self):
        return hash((self.source, self.target, self.generator_images))

    def __repr__(self):
        images = ", ".join(f"x{i + 1} -> {img!r}" for i, img in enumerate(self.generator_images))
        return f"WeilMorphism({self.source!r} -> {self.target!r}; {images})"


def make_algebra(n: int, related_pairs) -> WeilAlgebra:
    """Construct the algebra with n generators and the given nilpotency relation."""
    return WeilAlgebra(n, related_pairs)


def unit_algebra() -> WeilAlgebra:
    """The empty presentation: the semiring N itself."""
    return WeilAlgebra(0, ())


def dual_numbers() -> WeilAlgebra:
    """W = N[x]/<x^2>."""
    return WeilAlgebra(1, ({1, 1},))


def w_power(n: int) -> WeilAlgebra:
    """W^n: n generators forming a single clique (all pairwise products zero)."""
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    return WeilAlgebra(n, pairs)


def tensor(a: WeilAlgebra, b: WeilAlgebra) -> WeilAlgebra:
    """Coproduct: disjoint-union presentation, a's generators first."""
    shift = a.generator_count
    pairs = {tuple(p) for p in a.related_pairs}
    for p in b.related_pairs:
        pairs.add(tuple(i + shift for i in p))
    return WeilAlgebra(a.generator_count + b.generator_count, pairs)


def product(a: WeilAlgebra, b: WeilAlgebra) -> WeilAlgebra:
    """Product of two powers of W: W^m x W^n = W^(m+n)."""
    for alg in (a, b):
        if len(alg.cliques) > 1:
            raise ProductUndefined(f"{alg!r} is not a power of the dual numbers")
    return w_power(a.generator_count + b.generator_count)


def decompose(a: WeilAlgebra):
    """Block sizes [n_1, .., n_k] with a iso to W^n_1 (x) ... (x) W^n_k."""
    return [len(c) for c in a.cliques]


def recompose(blocks) -> WeilAlgebra:
    """The canonical algebra with consecutive cliques of the given sizes."""
    out = unit_algebra()
    for n in blocks:
        out = tensor(out, w_power(n))
    return out


def decompose_iso(a: WeilAlgebra) -> WeilMorphism:
    """Generator-permutation isomorphism recompose(decompose(a)) -> a."""
    source = recompose(decompose(a))
    images = []
    for clique in a.cliques:
        for g in clique:
            images.append(a.generator(g))
    return WeilMorphism(source, a, images)


def identity(a: WeilAlgebra) -> WeilMorphism:
    return WeilMorphism(a, a, [a.generator(i) for i in range(1, a.generator_count + 1)])


def compose(g: WeilMorphism, f: WeilMorphism) -> WeilMorphism:
    """g after f."""
    if f.target != g.source:
        raise CompositionMismatch(f"cannot compose {g!r} after {f!r}")
    return WeilMorphism(f.source, g.target, [g.apply(img) for img in f.generator_images])


def apply(f: WeilMorphism, e: WeilElement) -> WeilElement:
    return f.apply(e)


def equals(f: WeilMorphism, g: WeilMorphism) -> bool:
    return f == g


def tensor_morphism(f: WeilMorphism, g: WeilMorphism) -> WeilMorphism:
    """f (x) g on the disjoint-union presentations."""
    source = tensor(f.source, g.source)
    target = tensor(f.target, g.target)
    shift = f.target.generator_count
    images = [_embed(img, target, 0) for img in f.generator_images]
    images += [_embed(img, target, shift) for img in g.generator_images]
    return WeilMorphism(source, target, images)


def _embed(element: WeilElement, target: WeilAlgebra, shift: int) -> WeilElement:
    coeffs = {tuple(g + shift for g in m): c for m, c in element.coefficients.items()}
    return WeilElement(target, coeffs)


def augmentation(a: WeilAlgebra) -> WeilMorphism:
    """The unique morphism a -> N (kill every generator)."""
    unit = unit_algebra()
    return WeilMorphism(a, unit, [unit.zero_element()] * a.generator_count)


def projection(n: int, i: int) -> WeilMorphism:
    """Product projection W^n -> W keeping generator i (1-based)."""
    w = dual_numbers()
    images = [w.generator(1) if j == i else w.zero_element() for j in range(1, n + 1)]
    return WeilMorphism(w_power(n), w, images)


def structural_map(kind: str) -> WeilMorphism:
    """The five structural morphisms between small algebras.

    p:    W -> N          ax + b |-> b
    zero: N -> W          b |-> b
    plus: W x W -> W      a x1 + b x2 + c |-> (a+b) x + c
    ell:  W -> W (x) W    ax + b |-> a x1 x2 + b
    c:    W(x)W -> W(x)W  swaps x1 and x2
    """
    w = dual_numbers()
    unit = unit_algebra()
    ww = tensor(w, w)
    w2 = w_power(2)
    if kind == "p":
        return WeilMorphism(w, unit, [unit.zero_element()])
    if kind == "zero":
        return WeilMorphism(unit, w, [])
    if kind == "plus":
        return WeilMorphism(w2, w, [w.generator(1), w.generator(1)])
    if kind == "ell":
        return WeilMorphism(w, ww, [ww.element({(1, 2): 1})])
    if kind == "c":
        return WeilMorphism(ww, ww, [ww.generator(2), ww.generator(1)])
    raise ValueError(f"unknown structural map kind {kind!r}")


def weil_tangent(a: WeilAlgebra) -> WeilAlgebra:
    """Object part of the endofunctor W (x) -."""
    return tensor(dual_numbers(), a)


def weil_tangent_morphism(f: WeilMorphism) -> WeilMorphism:
    """Morphism part of W (x) -: the map 1_W (x) f."""
    return tensor_morphism(identity(dual_numbers()), f)


def enumerate_algebras(max_generators: int):
    """All canonical-form algebras with at most the given number of generators.

    One algebra per equivalence relation on {1..n} for each n; relations are
    set partitions, generated in a deterministic order.
    """
    out = []
    for n in range(max_generators + 1):
        for partition in _set_partitions(list(range(1, n + 1))):
            pairs = set()
            for block in partition:
                for i in block:
                    for j in block:
                        if i <= j:
                            pairs.add((i, j))
            out.append(WeilAlgebra(n, pairs))
    return out


def enumerate_by_dimension(max_dim: int):
    """Canonical algebras (every ordered block list) with dimension <= max_dim."""
    out = []

    def extend(blocks, dim):
        out.append(recompose(blocks))
        n = 1
        while dim * (n + 1) <= max_dim:
            extend(blocks + [n], dim * (n + 1))
            n += 1

    extend([], 1)
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]


def basis_matrix_fraction(f: WeilMorphism):
    """Basis matrix with Fraction entries, for the exact solvers."""
    return [[Fraction(x) for x in row] for row in f.basis_matrix()]
