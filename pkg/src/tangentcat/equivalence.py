"""Differential functors, the induce / evaluate pair, and their verification.

A differential bundle (E, M) in a concrete tangent category induces a
functor from the matrix category: rank k goes to the pullback power E_k
and a matrix acts through the commutative-monoid structure on morphisms
over M.  The distributor table alpha(A, k) is generated from the vertical
map of the bundle and closed under the tensor composition law.  Evaluating
such a functor at rank 1 recovers the bundle on the nose, which is what
the round-trip suite pins down.
"""

from __future__ import annotations

import random

from . import nbullet, verify, weil
from .bundles import BundleMorphism, DifferentialBundle, classify_morphism
from .errors import (
    NonLinearComparison,
    NotADifferentialFunctor,
    NotAdditive,
    NotOverBase,
    ProviderBoundTooSmall,
    PullbackUnavailable,
)

_W = weil.dual_numbers()
_UNIT = weil.unit_algebra()


# -- the commutative monoid of morphisms over the base -------------------------


class HomModuleElement:
    """A morphism h: E_n -> E lying over the base: q . h = q . pi0."""

    def __init__(self, bundle: DifferentialBundle, n: int, morphism):
        cat = bundle.cat
        base = bundle.base_map(n)
        if not cat.equal(cat.compose(bundle.projection, morphism), base):
            raise NotOverBase(f"morphism does not lie over the base at power {n}")
        self.bundle = bundle
        self.n = n
        self.morphism = morphism

    def __eq__(self, other):
        return (
            isinstance(other, HomModuleElement)
            and self.n == other.n
            and self.bundle.cat.equal(self.morphism, other.morphism)
        )


def hom_add(f: HomModuleElement, g: HomModuleElement) -> HomModuleElement:
    """s(f, g) = sigma . <f, g>."""
    assert f.bundle is g.bundle and f.n == g.n
    b = f.bundle
    paired = b.provider.pair(2, [f.morphism, g.morphism])
    return HomModuleElement(b, f.n, b.cat.compose(b.add, paired))


def hom_zero(bundle: DifferentialBundle, n: int) -> HomModuleElement:
    """z = zeta . q . pi0 (the zero of the fiberwise addition)."""
    return HomModuleElement(bundle, n, bundle.cat.compose(bundle.zero, bundle.base_map(n)))


def hom_scale(k: int, f: HomModuleElement) -> HomModuleElement:
    """k-fold sum of f with itself."""
    assert k >= 0
    out = hom_zero(f.bundle, f.n)
    for _ in range(k):
        out = hom_add(out, f)
    return out


def hom_projection(bundle: DifferentialBundle, n: int, j: int) -> HomModuleElement:
    """pi_j: E_n -> E as a module element (1-based j)."""
    return HomModuleElement(bundle, n, bundle.provider.projections(n)[j - 1])


# -- differential functors ------------------------------------------------------


class DifferentialFunctor:
    """Functor from the matrix category with a distributor table alpha(A, k).

    Subclasses provide obj / mor / alpha; the strength flag records whether
    the terminal object is preserved.
    """

    source = nbullet
    strong = False

    def __init__(self, cat):
        self.cat = cat

    def obj(self, k: int):
        raise NotImplementedError

    def mor(self, f: nbullet.NMatrix):
        raise NotImplementedError

    def alpha(self, algebra: weil.WeilAlgebra, k: int):
        raise NotImplementedError


class IndFunctor(DifferentialFunctor):
    """The functor induced by a differential bundle.

    Rank k maps to E_k; a matrix (a_ij) maps to the tuple of module sums
    sum_j a_ij . pi_j.  The distributor is generated by the bundle's
    vertical map and extended to tensor products by the composition law,
    nesting to the left by default (``nesting='right'`` peels the last
    power instead; both must agree, which the uniqueness check exercises).
    """

    def __init__(self, bundle: DifferentialBundle, nesting="left", vertical_override=None):
        super().__init__(bundle.cat)
        assert nesting in ("left", "right")
        self.bundle = bundle
        self.nesting = nesting
        self._vertical_override = vertical_override
        self._alpha_memo = {}
        self._mor_memo = {}
        self.strong = bundle.cat.rank(bundle.base) == 0

    def obj(self, k: int):
        return self.bundle.provider.power(k)

    def mor(self, f: nbullet.NMatrix):
        key = (f.rows, f.cols, f.entries)
        cached = self._mor_memo.get(key)
        if cached is not None:
            return cached
        b = self.bundle
        m = f.cols
        if f.rows == 0:
            out = b.base_map(m)
        else:
            components = []
            for i in range(f.rows):
                acc = hom_zero(b, m)
                for j in range(m):
                    a = f.entries[i][j]
                    if a:
                        acc = hom_add(acc, _scaled_projection(b, m, j + 1, a))
                components.append(acc.morphism)
            out = b.provider.pair(f.rows, components)
        self._mor_memo[key] = out
        return out

    # -- distributor -----------------------------------------------------------

    def vertical_generator(self):
        """alpha at (W, rank 1): the vertical map E_2 -> T(E)."""
        if self._vertical_override is not None:
            return self._vertical_override
        return self.bundle.vertical_map(flip=True)

    def _alpha_w_power_one(self, l: int):
        """alpha at (W, rank l): E_2l -> T(E_l), componentwise vertical maps."""
        cat = self.cat
        b = self.bundle
        if l == 0:
            return cat.structural("zero", b.base)
        gen = self.vertical_generator()
        pis = b.provider.projections(2 * l)
        arms = []
        for j in range(l):
            slice_j = b.provider.pair(2, [pis[j], pis[l + j]])
            arms.append(cat.compose(gen, slice_j))
        t_legs = [cat.tangent_morphism(p) for p in b.provider.projections(l)]
        return cat.pair(t_legs, arms)

    def _alpha_block(self, n: int, l: int):
        """alpha at (W^n, rank l): E_(n+1)l -> T_{W^n}(E_l)."""
        cat = self.cat
        b = self.bundle
        if n == 1:
            return self._alpha_w_power_one(l)
        base = self._alpha_w_power_one(l)
        if l == 0:
            arms = [base] * n
        else:
            pis = b.provider.projections((n + 1) * l)
            source_proj = []
            for i in range(1, n + 1):
                block = [pis[j] for j in range(l)] + [pis[i * l + j] for j in range(l)]
                source_proj.append(b.provider.pair(2 * l, block))
            arms = [cat.compose(base, s) for s in source_proj]
        legs = [
            cat.weil_theta(weil.projection(n, i), self.obj(l)) for i in range(1, n + 1)
        ]
        return cat.pair(legs, arms)

    def alpha(self, algebra: weil.WeilAlgebra, k: int):
        key = (algebra.key(), k)
        cached = self._alpha_memo.get(key)
        if cached is not None:
            return cached
        blocks = weil.decompose(algebra)
        if not blocks:
            out = self.cat.identity(self.obj(k))
        elif len(blocks) == 1:
            out = self._alpha_block(blocks[0], k)
        elif self.nesting == "left":
            head = weil.w_power(blocks[0])
            rest = weil.recompose(blocks[1:])
            out = self.cat.compose(
                self.cat.weil_morphism(head, self.alpha(rest, k)),
                self.alpha(head, rest.dimension * k),
            )
        else:
            last = weil.w_power(blocks[-1])
            front = weil.recompose(blocks[:-1])
            out = self.cat.compose(
                self.cat.weil_morphism(front, self.alpha(last, k)),
                self.alpha(front, last.dimension * k),
            )
        self._alpha_memo[key] = out
        return out


def _scaled_projection(bundle, m, j, a):
    """a . pi_j in the module (a >= 1)."""
    pi = hom_projection(bundle, m, j)
    out = pi
    for _ in range(a - 1):
        out = hom_add(out, pi)
    return out


def ind(bundle: DifferentialBundle, nesting="left", vertical_override=None) -> IndFunctor:
    """The differential functor induced by a bundle."""
    return IndFunctor(bundle, nesting=nesting, vertical_override=vertical_override)


class StrictImageFunctor(DifferentialFunctor):
    """Entry-wise embedding of the matrix category with identity distributor.

    Works over any scalar domain: a natural-number matrix is read as a
    linear morphism.  The action of every algebra strictly matches on both
    sides, so alpha is the identity.
    """

    strong = True

    def obj(self, k: int):
        return k

    def mor(self, f: nbullet.NMatrix):
        return self.cat.from_matrix(f.cols, f.rows, f.entries)

    def alpha(self, algebra, k):
        return self.cat.identity(algebra.dimension * k)


def entry_embedding(cat) -> StrictImageFunctor:
    return StrictImageFunctor(cat)


# -- transformations -------------------------------------------------------------


class DiffNatTransformation:
    """Componentwise transformation between differential functors."""

    def __init__(self, source_functor, target_functor, components, linear=False):
        self.source_functor = source_functor
        self.target_functor = target_functor
        self._components = dict(components)
        self.linear = linear

    def component(self, k: int):
        return self._components[k]

    def known_ranks(self):
        return sorted(self._components)

    def compose(self, other: "DiffNatTransformation") -> "DiffNatTransformation":
        """self after other, componentwise."""
        cat = self.target_functor.cat
        ranks = set(self.known_ranks()) & set(other.known_ranks())
        comps = {
            k: cat.compose(self.component(k), other.component(k)) for k in ranks
        }
        return DiffNatTransformation(
            other.source_functor, self.target_functor, comps,
            linear=self.linear and other.linear,
        )


def ind_morphism(b, b2, total_map, base_map, k_max=4) -> DiffNatTransformation:
    """Transformation induced by an additive bundle morphism (f, g).

    Component at rank 0 is g, at rank k the pullback power f_k.  Requires
    additivity; a linear morphism sets the transformation's linear flag.
    """
    classification = classify_morphism(b, b2, total_map, base_map)
    if classification not in ("additive", "linear"):
        raise NotAdditive(f"morphism classifies as {classification!r}")
    cat = b.cat
    comps = {0: base_map}
    for k in range(1, k_max + 1):
        arms = [cat.compose(total_map, pi) for pi in b.provider.projections(k)]
        comps[k] = b2.provider.pair(k, arms)
    return DiffNatTransformation(ind(b), ind(b2), comps, linear=classification == "linear")


def naturality_report(phi: DiffNatTransformation, matrices, report=None, prefix="nat"):
    """Check phi against a list of matrices (exact equality per square)."""
    if report is None:
        report = verify.CheckReport()
    f_fun = phi.source_functor
    g_fun = phi.target_functor
    cat = g_fun.cat
    for i, mat in enumerate(matrices):
        if mat.rows not in phi._components or mat.cols not in phi._components:
            continue
        lhs = cat.compose(phi.component(mat.rows), f_fun.mor(mat))
        rhs = cat.compose(g_fun.mor(mat), phi.component(mat.cols))
        verify._eq(
            report, cat, f"{prefix}:square-{i}", "transformation naturality", lhs, rhs,
            context={"matrix": [list(r) for r in mat.entries]},
        )
    return report


def determinism_check(phi, psi, k_max) -> verify.CheckReport:
    """Transformations agreeing at ranks 0 and 1 agree at every rank."""
    report = verify.CheckReport()
    cat = phi.target_functor.cat
    for k in (0, 1):
        verify._eq(report, cat, f"determined:base-{k}",
                   "transformations determined by low ranks",
                   phi.component(k), psi.component(k))
    if report.failed:
        return report
    for k in range(2, k_max + 1):
        verify._eq(report, cat, f"determined:rank-{k}",
                   "transformations determined by low ranks",
                   phi.component(k), psi.component(k))
    return report


# -- evaluation -------------------------------------------------------------------


class FunctorProvider:
    """Pullback powers of an evaluated bundle: power n is F(N^(n*k))."""

    def __init__(self, functor, k, bound=4):
        self.functor = functor
        self.k = k
        self.bound = bound

    def power(self, n):
        self._check(n)
        return self.functor.obj(n * self.k)

    def projections(self, n):
        self._check(n)
        k = self.k
        out = []
        for i in range(n):
            rows = [
                [1 if c == i * k + r else 0 for c in range(n * k)] for r in range(k)
            ]
            out.append(self.functor.mor(nbullet.NMatrix(rows, k, n * k)))
        return out

    def pair(self, n, fs):
        self._check(n)
        return self.functor.cat.pair(self.projections(n), fs)

    def base_map(self, n):
        return self.functor.mor(nbullet.NMatrix.zeros(0, n * self.k))

    def _check(self, n):
        if n > self.bound:
            raise ProviderBoundTooSmall(f"power {n} exceeds bound {self.bound}")


def eval_functor(functor: DifferentialFunctor, k: int = 1, bound: int = 4,
                 verify_first=False) -> DifferentialBundle:
    """Evaluate a differential functor at the canonical rank-k object.

    Returns (F(N^k), F(N^0), F(!), F(zeta), F(sigma), alpha_W . F(lambda)).
    For a strong functor the base is terminal, i.e. the result is a
    differential object.  With ``verify_first`` the functor checks run
    first and a failing functor is rejected.
    """
    if verify_first:
        report = check_differential_functor(functor, max_rank=2, sample=3)
        if report.failed:
            raise NotADifferentialFunctor(
                f"{report.failed} functor checks failed: "
                + ", ".join(r.name for r in report.failures()[:3])
            )
    cat = functor.cat
    zeta_v, sigma_v, lambda_v = nbullet.diff_object(k)
    bang_v = nbullet.NMatrix.zeros(0, k)
    lift = cat.compose(functor.alpha(_W, k), functor.mor(lambda_v))
    provider = FunctorProvider(functor, k, bound)
    return DifferentialBundle(
        cat=cat,
        total=functor.obj(k),
        base=functor.obj(0),
        projection=functor.mor(bang_v),
        zero=functor.mor(zeta_v),
        add=functor.mor(sigma_v),
        lift=lift,
        provider=provider,
        label=f"eval[k={k}]",
    )


def eval_morphism(phi: DiffNatTransformation, total_matrix: nbullet.NMatrix,
                  k_source: int | None = None) -> BundleMorphism:
    """Bundle morphism (phi_{N^k'} . F(f), phi_{N^0}) between evaluated bundles."""
    k_src = total_matrix.cols if k_source is None else k_source
    k_dst = total_matrix.rows
    cat = phi.target_functor.cat
    f_part = cat.compose(phi.component(k_dst), phi.source_functor.mor(total_matrix))
    g_part = phi.component(0)
    return BundleMorphism(
        source=eval_functor(phi.source_functor, k_src),
        target=eval_functor(phi.target_functor, k_dst),
        total_map=f_part,
        base_map=g_part,
    )


# -- functor verification ----------------------------------------------------------


def check_differential_functor(
    functor: DifferentialFunctor,
    max_rank=3,
    sample=10,
    seed=0,
    algebras=None,
    report=None,
    label="functor",
) -> verify.CheckReport:
    """Functor laws, lineator coherence, structural compatibility, Cartesianness."""
    cat = functor.cat
    if report is None:
        report = verify.CheckReport(seed=seed)
    rng = random.Random(seed)
    if algebras is None:
        algebras = [_UNIT, _W, weil.w_power(2), weil.tensor(_W, _W)]

    for k in range(max_rank + 1):
        verify._eq(report, cat, f"{label}:identity-{k}", "functor preserves identities",
                   functor.mor(nbullet.NMatrix.identity(k)), cat.identity(functor.obj(k)))
    for i in range(sample):
        a = _random_matrix(rng, max_rank)
        b = _random_matrix(rng, max_rank, rows=a.cols)
        verify._eq(report, cat, f"{label}:compose-{i}", "functor preserves composition",
                   functor.mor(a @ b), cat.compose(functor.mor(a), functor.mor(b)),
                   context={"a": [list(r) for r in a.entries], "b": [list(r) for r in b.entries]})

    for k in range(max_rank + 1):
        verify._eq(report, cat, f"{label}:unit-lineator-{k}",
                   "lineator unit law", functor.alpha(_UNIT, k),
                   cat.identity(functor.obj(k)))

    small = [a for a in algebras if a.dimension <= 4]
    for a in small:
        for b_alg in small:
            if a.dimension * b_alg.dimension > 8:
                continue
            tensor_alg = weil.tensor(a, b_alg)
            lhs = functor.alpha(tensor_alg, 1)
            rhs = cat.compose(
                cat.weil_morphism(a, functor.alpha(b_alg, 1)),
                functor.alpha(a, b_alg.dimension),
            )
            verify._eq(report, cat,
                       f"{label}:tensor-law:{verify._weil_label(a)}:{verify._weil_label(b_alg)}",
                       "lineator tensor composition law", lhs, rhs)

    _structural_compatibility(functor, report, label, rank=1)
    _structural_compatibility(functor, report, label, rank=2)

    for i in range(sample):
        for a, cap in ((_W, min(max_rank, 3)), (weil.w_power(2), 2)):
            f = _random_matrix(rng, cap)
            d_f = nbullet.weil_action_on_f(a, f)
            lhs = cat.compose(functor.alpha(a, f.rows), functor.mor(d_f))
            rhs = cat.compose(cat.weil_morphism(a, functor.mor(f)), functor.alpha(a, f.cols))
            verify._eq(report, cat, f"{label}:alpha-natural-{verify._weil_label(a)}-{i}",
                       "distributor naturality", lhs, rhs,
                       context={"matrix": [list(r) for r in f.entries]})

    for a_rank, b_rank in [(1, 1), (1, 2), (2, 1)]:
        if a_rank + b_rank > max_rank + 1:
            continue
        _product_preservation(functor, report, label, a_rank, b_rank)

    for gen in _generator_matrices(2):
        for a in (_W,):
            _cartesian_square(functor, report, label, a, gen)

    if functor.strong:
        base_ok = cat.rank(functor.obj(0)) == 0
        report.add(f"{label}:strong-terminal", "strong functor preserves the terminal",
                   base_ok, None if base_ok else {"kind": "comparison-unavailable",
                                                  "reason": "image of rank 0 is not terminal"})
        for a in small:
            mat = cat.as_matrix(functor.alpha(a, 1))
            ok = mat is not None and cat.is_invertible_matrix(
                mat, cat.rank(cat.target(functor.alpha(a, 1))),
                cat.rank(cat.source(functor.alpha(a, 1))),
            )
            report.add(f"{label}:strong-alpha-{verify._weil_label(a)}",
                       "strong functor has invertible distributor", ok,
                       None if ok else {"kind": "comparison-unavailable",
                                        "reason": "distributor component not invertible"})
    return report


def _structural_compatibility(functor, report, label, rank):
    """Squares of alpha against the five structural algebra maps."""
    cat = functor.cat
    shapes = {
        "p": (_W, _UNIT),
        "zero": (_UNIT, _W),
        "plus": (weil.w_power(2), _W),
        "ell": (_W, weil.tensor(_W, _W)),
        "c": (weil.tensor(_W, _W), weil.tensor(_W, _W)),
    }
    for kind, (src, dst) in shapes.items():
        theta = weil.structural_map(kind)
        lhs = cat.compose(
            functor.alpha(dst, rank),
            functor.mor(nbullet.weil_action_on_theta(theta, rank)),
        )
        rhs = cat.compose(
            cat.weil_theta(theta, functor.obj(rank)), functor.alpha(src, rank)
        )
        verify._eq(report, cat, f"{label}:structural-{kind}-rank{rank}",
                   "distributor compatible with structural maps", lhs, rhs)


def _product_preservation(functor, report, label, a_rank, b_rank):
    """F applied to a product square over the terminal is still a pullback."""
    cat = functor.cat
    total = a_rank + b_rank
    proj_a = nbullet.NMatrix(
        [[1 if c == r else 0 for c in range(total)] for r in range(a_rank)], a_rank, total
    )
    proj_b = nbullet.NMatrix(
        [[1 if c == a_rank + r else 0 for c in range(total)] for r in range(b_rank)],
        b_rank, total,
    )
    name = f"{label}:product-{a_rank}x{b_rank}"
    try:
        verify.check_pullback_square(
            cat, report, name, "functor preserves pullbacks over the terminal",
            functor.obj(total),
            functor.mor(proj_a),
            functor.mor(proj_b),
            functor.mor(nbullet.NMatrix.zeros(0, a_rank)),
            functor.mor(nbullet.NMatrix.zeros(0, b_rank)),
        )
    except (PullbackUnavailable, NonLinearComparison) as exc:
        report.add(name, "functor preserves pullbacks over the terminal", False,
                   {"kind": "comparison-unavailable", "reason": str(exc)})


def _cartesian_square(functor, report, label, algebra, gen):
    """Naturality square of alpha at a generator morphism is a pullback."""
    cat = functor.cat
    d_f = nbullet.weil_action_on_f(algebra, gen)
    name = f"{label}:cartesian-{verify._weil_label(algebra)}-{gen.rows}x{gen.cols}"
    try:
        verify.check_pullback_square(
            cat, report, name, "distributor is Cartesian on generators",
            functor.obj(algebra.dimension * gen.cols),
            functor.alpha(algebra, gen.cols),
            functor.mor(d_f),
            cat.weil_morphism(algebra, functor.mor(gen)),
            functor.alpha(algebra, gen.rows),
        )
    except (PullbackUnavailable, NonLinearComparison) as exc:
        report.add(name, "distributor is Cartesian on generators", False,
                   {"kind": "comparison-unavailable", "reason": str(exc)})


def _generator_matrices(k):
    """sigma_k, Delta_k, the projections out of N^k and the map to rank 0."""
    out = [nbullet.sigma_k(k), nbullet.delta_k(k), nbullet.NMatrix.zeros(0, 1)]
    out += [nbullet.proj(i, k) for i in range(1, k + 1)]
    out.append(nbullet.sigma_k(0))
    return out


def _random_matrix(rng, max_rank, rows=None, max_entry=3):
    r = rng.randint(0, max_rank) if rows is None else rows
    c = rng.randint(0, max_rank)
    return nbullet.NMatrix([[rng.randint(0, max_entry) for _ in range(c)] for _ in range(r)], r, c)


# -- the appendix suite -------------------------------------------------------------


def appendix_suite(functor: IndFunctor, seed=0, sample=10, report=None) -> verify.CheckReport:
    """Every naturality square of the distributor, by exact morphism equality.

    Matrix-direction squares are checked for the generators (k-fold sums,
    diagonals, projections, the map to rank 0) against alpha at W and W^2;
    algebra-direction squares for the five structural maps against alpha
    at rank 1; the tensor-expansion of alpha at W (x) W is compared with
    its closed form, and the two-subsquare pullback compatibility square
    is checked by comparison isomorphism.
    """
    cat = functor.cat
    if report is None:
        report = verify.CheckReport(seed=seed)
    label = functor.bundle.label

    small_gens = []
    for gen in _generator_matrices(2) + _generator_matrices(3):
        if all(gen != seen for seen in small_gens):
            small_gens.append(gen)
    plans = [
        (_W, small_gens),
        (weil.w_power(2), [g for g in small_gens if max(g.rows, g.cols) <= 2]),
    ]
    for algebra, gens in plans:
        tag = verify._weil_label(algebra)
        for gen in gens:
            d_f = nbullet.weil_action_on_f(algebra, gen)
            lhs = cat.compose(functor.alpha(algebra, gen.rows), functor.mor(d_f))
            rhs = cat.compose(
                cat.weil_morphism(algebra, functor.mor(gen)),
                functor.alpha(algebra, gen.cols),
            )
            verify._eq(
                report, cat,
                f"{label}:appendix:matrix-direction:{tag}:{_matrix_tag(gen)}",
                "distributor natural in the matrix direction", lhs, rhs,
            )

    shapes = {
        "zero": (_UNIT, _W),
        "p": (_W, _UNIT),
        "plus": (weil.w_power(2), _W),
        "ell": (_W, weil.tensor(_W, _W)),
        "c": (weil.tensor(_W, _W), weil.tensor(_W, _W)),
    }
    for kind, (src, dst) in shapes.items():
        theta = weil.structural_map(kind)
        lhs = cat.compose(
            functor.alpha(dst, 1), functor.mor(nbullet.weil_action_on_theta(theta, 1))
        )
        rhs = cat.compose(cat.weil_theta(theta, functor.obj(1)), functor.alpha(src, 1))
        verify._eq(report, cat, f"{label}:appendix:algebra-direction:{kind}",
                   "distributor natural in the algebra direction", lhs, rhs)

    _tensor_expansion_check(functor, report, label)

    for gen in (nbullet.sigma_k(2), nbullet.delta_k(2)):
        _subsquare_pullbacks(functor, report, label, gen)

    rng = random.Random(seed)
    for i in range(sample):
        f = _random_matrix(rng, 3)
        d_f = nbullet.weil_action_on_f(_W, f)
        lhs = cat.compose(functor.alpha(_W, f.rows), functor.mor(d_f))
        rhs = cat.compose(cat.weil_morphism(_W, functor.mor(f)), functor.alpha(_W, f.cols))
        verify._eq(report, cat, f"{label}:appendix:spot-{i}",
                   "distributor natural in the matrix direction", lhs, rhs,
                   context={"matrix": [list(r) for r in f.entries]})
    return report


def _matrix_tag(mat: nbullet.NMatrix) -> str:
    inner = ";".join(",".join(str(x) for x in row) for row in mat.entries)
    return f"{mat.rows}x{mat.cols}[{inner}]"


def _tensor_expansion_check(functor: IndFunctor, report, label):
    """alpha at (W (x) W, rank 1) equals its expanded closed form.

    In block coordinates (pair components listed base-block first) the
    expansion reads T^2(sigma . (sigma x_M sigma)) composed with the
    four-arm pairing <T(0).0.pi0, T(lift).0.pi1, T(0).lift.pi2,
    T(lift).lift.pi3>.
    """
    cat = functor.cat
    b = functor.bundle
    pis = b.provider.projections(4)
    sigma = b.add
    half1 = cat.compose(sigma, b.provider.pair(2, [pis[0], pis[1]]))
    half2 = cat.compose(sigma, b.provider.pair(2, [pis[2], pis[3]]))
    total_sum = cat.compose(sigma, b.provider.pair(2, [half1, half2]))
    t2_sum = cat.tangent_morphism(cat.tangent_morphism(total_sum))
    zero_e = cat.structural("zero", b.total)
    t_zero = cat.tangent_morphism(zero_e)
    t_lift = cat.tangent_morphism(b.lift)
    ops = [
        cat.compose(t_zero, zero_e),
        cat.compose(t_lift, zero_e),
        cat.compose(t_zero, b.lift),
        cat.compose(t_lift, b.lift),
    ]
    arms = [cat.compose(op, pi) for op, pi in zip(ops, pis)]
    legs = [
        cat.tangent_morphism(cat.tangent_morphism(pi)) for pi in b.provider.projections(4)
    ]
    paired = verify._guarded_pair(
        cat, report, f"{label}:appendix:tensor-expansion",
        "expanded distributor at the tensor square", legs, arms,
    )
    if paired is None:
        return
    expanded = cat.compose(t2_sum, paired)
    verify._eq(report, cat, f"{label}:appendix:tensor-expansion",
               "expanded distributor at the tensor square",
               functor.alpha(weil.tensor(_W, _W), 1), expanded)


def _subsquare_pullbacks(functor: IndFunctor, report, label, gen):
    """Both subsquares of the tensor-compatibility rectangle are pullbacks."""
    cat = functor.cat
    d_gen = nbullet.weil_action_on_f(_W, gen)
    dd_gen = nbullet.weil_action_on_f(_W, d_gen)
    name = f"{label}:appendix:subsquares:{_matrix_tag(gen)}"
    try:
        verify.check_pullback_square(
            cat, report, f"{name}:left", "tensor compatibility: left subsquare",
            functor.obj(4 * gen.cols),
            functor.alpha(_W, 2 * gen.cols),
            functor.mor(dd_gen),
            cat.weil_morphism(_W, functor.mor(d_gen)),
            functor.alpha(_W, 2 * gen.rows),
        )
        verify.check_pullback_square(
            cat, report, f"{name}:right", "tensor compatibility: right subsquare",
            cat.weil_object(_W, functor.obj(2 * gen.cols)),
            cat.weil_morphism(_W, functor.alpha(_W, gen.cols)),
            cat.weil_morphism(_W, functor.mor(d_gen)),
            cat.weil_morphism(_W, cat.weil_morphism(_W, functor.mor(gen))),
            cat.weil_morphism(_W, functor.alpha(_W, gen.rows)),
        )
    except (PullbackUnavailable, NonLinearComparison) as exc:
        report.add(name, "tensor compatibility subsquares", False,
                   {"kind": "comparison-unavailable", "reason": str(exc)})


def tensor_law_report(functor: DifferentialFunctor, max_dim_product=8, k=1,
                      report=None, label=None) -> verify.CheckReport:
    """The tensor composition law of the distributor for all small algebra pairs."""
    cat = functor.cat
    if report is None:
        report = verify.CheckReport()
    label = label or getattr(getattr(functor, "bundle", None), "label", "functor")
    algebras = weil.enumerate_by_dimension(max_dim_product)
    for a in algebras:
        for b_alg in algebras:
            if a.dimension * b_alg.dimension > max_dim_product:
                continue
            lhs = functor.alpha(weil.tensor(a, b_alg), k)
            rhs = cat.compose(
                cat.weil_morphism(a, functor.alpha(b_alg, k)),
                functor.alpha(a, b_alg.dimension * k),
            )
            verify._eq(
                report, cat,
                f"{label}:tensor-law:{verify._weil_label(a)}:{verify._weil_label(b_alg)}",
                "lineator tensor composition law", lhs, rhs,
            )
    return report


def lineator_uniqueness_report(bundle: DifferentialBundle, max_dim=8, k=1,
                               report=None) -> verify.CheckReport:
    """Two nesting choices of the distributor recursion produce equal tables."""
    if report is None:
        report = verify.CheckReport()
    left = ind(bundle, nesting="left")
    right = ind(bundle, nesting="right")
    cat = bundle.cat
    for algebra in weil.enumerate_by_dimension(max_dim):
        verify._eq(
            report, cat,
            f"{bundle.label}:lineator-unique:{verify._weil_label(algebra)}",
            "lineator determined by its dual-numbers component",
            left.alpha(algebra, k), right.alpha(algebra, k),
        )
    return report


def roundtrip_report(bundle: DifferentialBundle, max_power=3, report=None) -> verify.CheckReport:
    """eval(ind(b), 1) equals b in all six components and on the power data."""
    cat = bundle.cat
    if report is None:
        report = verify.CheckReport()
    functor = ind(bundle)
    evaluated = eval_functor(functor, 1, bound=bundle.provider.bound)
    label = bundle.label
    anchor = "evaluate after induce is the identity"
    pairs = [
        ("total", bundle.total == evaluated.total),
        ("base", bundle.base == evaluated.base),
    ]
    for tag, ok in pairs:
        report.add(f"{label}:roundtrip:{tag}", anchor, ok,
                   None if ok else {"kind": "comparison-unavailable", "reason": tag})
    for tag, lhs, rhs in [
        ("projection", bundle.projection, evaluated.projection),
        ("zero", bundle.zero, evaluated.zero),
        ("add", bundle.add, evaluated.add),
        ("lift", bundle.lift, evaluated.lift),
    ]:
        verify._eq(report, cat, f"{label}:roundtrip:{tag}", anchor, lhs, rhs)
    for n in range(2, max_power + 1):
        same_obj = cat.rank(bundle.provider.power(n)) == cat.rank(evaluated.provider.power(n))
        report.add(f"{label}:roundtrip:power-{n}-object", anchor, same_obj,
                   None if same_obj else {"kind": "comparison-unavailable",
                                          "reason": f"power {n} object"})
        for i, (p1, p2) in enumerate(
            zip(bundle.provider.projections(n), evaluated.provider.projections(n))
        ):
            verify._eq(report, cat, f"{label}:roundtrip:power-{n}-proj-{i}", anchor, p1, p2)
    return report
