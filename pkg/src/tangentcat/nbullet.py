"""The category of free finite-rank N-modules and natural-number matrices.

Objects are ranks k >= 0, morphisms N^m -> N^n are n x m matrices over N
composed by matrix product.  The tangent functor doubles the rank,
D(f) = f (+) f, and the structural maps p, 0, +, ell, c are the block
matrices below.  An algebra from :mod:`tangentcat.weil` acts through
Kronecker products: the monomial index is the outer (slowest) coordinate.
"""

from __future__ import annotations

from . import weil
from .errors import CompositionMismatch


class NMatrix:
    """A rows x cols matrix over N, i.e. a morphism N^cols -> N^rows."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, rows=None, cols=None):
        entries = tuple(tuple(row) for row in entries)
        if rows is None:
            rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise ValueError("inconsistent matrix shape")
        for row in entries:
            for x in row:
                if not isinstance(x, int) or x < 0:
                    raise ValueError(f"entry {x!r} is not a natural number")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows, cols):
        return cls(((0,) * cols,) * rows, rows, cols)

    @classmethod
    def identity(cls, k):
        return cls(tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k)), k, k)

    def __matmul__(self, other: "NMatrix") -> "NMatrix":
        """Composition: self after other."""
        if self.cols != other.rows:
            raise CompositionMismatch(
                f"cannot compose {self.rows}x{self.cols} after {other.rows}x{other.cols}"
            )
        out = [
            tuple(
                sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
                for j in range(other.cols)
            )
            for i in range(self.rows)
        ]
        return NMatrix(out, self.rows, other.cols)

    def __add__(self, other: "NMatrix") -> "NMatrix":
        assert self.rows == other.rows and self.cols == other.cols
        return NMatrix(
            tuple(
                tuple(a + b for a, b in zip(r1, r2))
                for r1, r2 in zip(self.entries, other.entries)
            )
        )

    def __eq__(self, other):
        return (
            isinstance(other, NMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"NMatrix({[list(r) for r in self.entries]})"

    def row(self, i):
        return self.entries[i]

    def with_entry(self, i, j, value) -> "NMatrix":
        rows = [list(r) for r in self.entries]
        rows[i][j] = value
        return NMatrix(rows, self.rows, self.cols)


def hstack(*mats: NMatrix) -> NMatrix:
    rows = mats[0].rows
    assert all(m.rows == rows for m in mats)
    cols = sum(m.cols for m in mats)
    return NMatrix(
        tuple(tuple(x for m in mats for x in m.entries[i]) for i in range(rows)), rows, cols
    )


def vstack(*mats: NMatrix) -> NMatrix:
    cols = mats[0].cols
    assert all(m.cols == cols for m in mats)
    rows = sum(m.rows for m in mats)
    return NMatrix(tuple(row for m in mats for row in m.entries), rows, cols)


def block_diag(*mats: NMatrix) -> NMatrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = [[0] * cols for _ in range(rows)]
    r = c = 0
    for m in mats:
        for i in range(m.rows):
            for j in range(m.cols):
                out[r + i][c + j] = m.entries[i][j]
        r += m.rows
        c += m.cols
    return NMatrix(out, rows, cols)


def kron(a: NMatrix, b: NMatrix) -> NMatrix:
    out = [
        [0] * (a.cols * b.cols) for _ in range(a.rows * b.rows)
    ]
    for i in range(a.rows):
        for j in range(a.cols):
            x = a.entries[i][j]
            if x == 0:
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    out[i * b.rows + k][j * b.cols + l] = x * b.entries[k][l]
    return NMatrix(out, a.rows * b.rows, a.cols * b.cols)


# -- tangent structure --------------------------------------------------------


def d_object(k: int) -> int:
    return 2 * k


def d_morphism(f: NMatrix) -> NMatrix:
    """D(f) = f (+) f on (point, tangent) blocks."""
    return block_diag(f, f)


def structural(kind: str, k: int) -> NMatrix:
    """Structural map of the tangent structure at rank k.

    p: [I|0], zero: [I;0], plus: (x,u,w) |-> (x,u+w),
    ell: (x,v) |-> (x,0,0,v), c: (x,u,v,w) |-> (x,v,u,w).
    """
    ident = NMatrix.identity(k)
    zero = NMatrix.zeros(k, k)
    if kind == "p":
        return hstack(ident, zero)
    if kind == "zero":
        return vstack(ident, zero)
    if kind == "plus":
        return vstack(hstack(ident, zero, zero), hstack(zero, ident, ident))
    if kind == "ell":
        return vstack(
            hstack(ident, zero), hstack(zero, zero), hstack(zero, zero), hstack(zero, ident)
        )
    if kind == "c":
        return vstack(
            hstack(ident, zero, zero, zero),
            hstack(zero, zero, ident, zero),
            hstack(zero, ident, zero, zero),
            hstack(zero, zero, zero, ident),
        )
    raise ValueError(f"unknown structural map kind {kind!r}")


def add_map(k: int) -> NMatrix:
    """Addition N^2k -> N^k, the matrix [I|I]."""
    return hstack(NMatrix.identity(k), NMatrix.identity(k))


# -- action of the monomial algebras ------------------------------------------


def weil_action(algebra: weil.WeilAlgebra, k: int) -> int:
    """Rank of T_A(N^k): one block of k coordinates per basis monomial."""
    return algebra.dimension * k


def weil_action_on_theta(theta: weil.WeilMorphism, k: int) -> NMatrix:
    """The algebra morphism theta acting at rank k: kron(basis matrix, I_k)."""
    return kron(NMatrix(theta.basis_matrix()), NMatrix.identity(k))


def weil_action_on_f(algebra: weil.WeilAlgebra, f: NMatrix) -> NMatrix:
    """T_A(f) = kron(I_dim(A), f): one copy of f per basis monomial."""
    return kron(NMatrix.identity(algebra.dimension), f)


# -- differential object ------------------------------------------------------


def diff_object(k: int):
    """Zero section, addition and lift making N^k a differential object.

    zeta: N^0 -> N^k, sigma = [I|I]: N^2k -> N^k, lambda = [0;I]: N^k -> N^2k.
    """
    zeta = NMatrix.zeros(k, 0)
    sigma = add_map(k)
    lam = vstack(NMatrix.zeros(k, k), NMatrix.identity(k))
    return zeta, sigma, lam


# -- generator decomposition ---------------------------------------------------


def sigma_k(k: int) -> NMatrix:
    """k-fold addition N^k -> N^1 (the all-ones row); the zero-fold sum is zeta."""
    return NMatrix([[1] * k], 1, k)


def delta_k(k: int) -> NMatrix:
    """Diagonal N^1 -> N^k (the all-ones column); the zero-fold diagonal is !."""
    return NMatrix([[1]] * k, k, 1)


def proj(i: int, m: int) -> NMatrix:
    """Projection N^m -> N^1 onto coordinate i (1-based)."""
    assert 1 <= i <= m
    return NMatrix([[1 if j == i - 1 else 0 for j in range(m)]], 1, m)


class GeneratorTerm:
    """Syntax tree over {Sigma, Delta, Proj, Pair, Compose} denoting a matrix.

    The constructors mirror the generating morphisms: Sigma(k) is the k-fold
    addition, Delta(k) the diagonal, Proj(i, m) a projection, Pair tuples
    terms with a common source and Compose chains them left to right (the
    leftmost factor is applied last).
    """

    def __init__(self, op: str, *args):
        self.op = op
        self.args = args
        self._check()

    @classmethod
    def sigma(cls, k):
        return cls("Sigma", k)

    @classmethod
    def delta(cls, k):
        return cls("Delta", k)

    @classmethod
    def projection(cls, i, m):
        return cls("Proj", i, m)

    @classmethod
    def pair(cls, terms):
        return cls("Pair", *terms)

    @classmethod
    def composite(cls, terms):
        return cls("Compose", *terms)

    def _check(self):
        if self.op in ("Sigma", "Delta"):
            assert len(self.args) == 1 and self.args[0] >= 0
        elif self.op == "Proj":
            i, m = self.args
            assert 1 <= i <= m
        elif self.op == "Pair":
            sources = {t.source_arity() for t in self.args}
            assert len(sources) <= 1, "paired terms must share a source"
        elif self.op == "Compose":
            assert self.args
            for left, right in zip(self.args, self.args[1:]):
                assert left.source_arity() == right.target_arity(), "arity mismatch in Compose"
        else:
            raise ValueError(f"unknown constructor {self.op!r}")

    def source_arity(self) -> int:
        if self.op == "Sigma":
            return self.args[0]
        if self.op == "Delta":
            return 1
        if self.op == "Proj":
            return self.args[1]
        if self.op == "Pair":
            return self.args[0].source_arity() if self.args else 0
        return self.args[-1].source_arity()

    def target_arity(self) -> int:
        if self.op == "Sigma":
            return 1
        if self.op == "Delta":
            return self.args[0]
        if self.op == "Proj":
            return 1
        if self.op == "Pair":
            return sum(t.target_arity() for t in self.args)
        return self.args[0].target_arity()

    def evaluate(self) -> NMatrix:
        if self.op == "Sigma":
            return sigma_k(self.args[0])
        if self.op == "Delta":
            return delta_k(self.args[0])
        if self.op == "Proj":
            return proj(self.args[0], self.args[1])
        if self.op == "Pair":
            if not self.args:
                return NMatrix.zeros(0, 0)
            return vstack(*(t.evaluate() for t in self.args))
        out = self.args[0].evaluate()
        for t in self.args[1:]:
            out = out @ t.evaluate()
        return out

    def __repr__(self):
        inner = ", ".join(map(repr, self.args))
        return f"{self.op}({inner})"


def decompose_matrix(f: NMatrix):
    """Each row i as sigma_m . < sigma_f_i1 . Delta_f_i1 . pi_1, ... >.

    Rewrites matrix application as iterated sums of the generators; the
    pairing of all returned components evaluates back to f exactly.
    """
    m = f.cols
    components = []
    for i in range(f.rows):
        inner = [
            GeneratorTerm.composite(
                [
                    GeneratorTerm.sigma(f.entries[i][j]),
                    GeneratorTerm.delta(f.entries[i][j]),
                    GeneratorTerm.projection(j + 1, m),
                ]
            )
            for j in range(m)
        ]
        components.append(
            GeneratorTerm.composite([GeneratorTerm.sigma(m), GeneratorTerm.pair(inner)])
        )
    return components


def evaluate_decomposition(components, cols: int) -> NMatrix:
    """Pair the row components back into a single matrix."""
    if not components:
        return NMatrix.zeros(0, cols)
    return vstack(*(t.evaluate() for t in components))
