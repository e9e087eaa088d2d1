"""Exact linear algebra over the rationals and prime fields.

Matrices are plain lists of lists.  Everything is small and exact, so the
implementation favors clarity over asymptotics: Gauss-Jordan with full
pivot search, fractions.Fraction for characteristic zero and canonical
representatives in [0, p) for GF(p).
"""

from __future__ import annotations

from fractions import Fraction


class QF:
    """Field view of the rationals (also used for matrices over the naturals)."""

    name = "rational"

    def of(self, x):
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a == 0

    zero = Fraction(0)
    one = Fraction(1)


class GF:
    """The prime field GF(p)."""

    def __init__(self, p):
        self.p = p
        self.name = f"zp:{p}"
        self.zero = 0
        self.one = 1 % p

    def of(self, x):
        return x % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def div(self, a, b):
        return (a * pow(b, -1, self.p)) % self.p

    def neg(self, a):
        return (-a) % self.p

    def is_zero(self, a):
        return a % self.p == 0


def mat_of(field, rows):
    return [[field.of(x) for x in row] for row in rows]


def rref(field, mat):
    """Reduced row echelon form.  Returns (rref matrix, pivot column list)."""
    m = [row[:] for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if not field.is_zero(m[i][c])), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [field.div(x, inv) for x in m[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(m[i][c]):
                factor = m[i][c]
                m[i] = [field.sub(m[i][j], field.mul(factor, m[r][j])) for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def kernel_basis(field, mat):
    """Basis of the right kernel, one vector per free column."""
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    if nrows == 0:
        return [[field.one if j == i else field.zero for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(field, mat)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        vec = [field.zero] * ncols
        vec[f] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(red[r][f])
        basis.append(vec)
    return basis


def solve(field, a, b):
    """Solve a @ x = b for matrices; require the solution to be unique.

    ``b`` has the same number of rows as ``a``; returns the solution matrix
    or None when the system is inconsistent or underdetermined.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    if nrows == 0:
        # No equations: solution unique only when there are no unknowns.
        return [] if ncols == 0 else None
    bcols = len(b[0])
    aug = [a[i][:] + b[i][:] for i in range(nrows)]
    red, pivots = rref(field, aug)
    pivots_in_a = [c for c in pivots if c < ncols]
    if len(pivots_in_a) < len(pivots):
        return None  # inconsistent: pivot in the b block
    if len(pivots_in_a) < ncols:
        return None  # underdetermined
    x = [[field.zero] * bcols for _ in range(ncols)]
    for r, pc in enumerate(pivots_in_a):
        for j in range(bcols):
            x[pc][j] = red[r][ncols + j]
    return x


def inverse(field, mat):
    """Two-sided inverse of a square matrix, or None."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        return None
    ident = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    return solve(field, mat, ident)


def matmul(field, a, b):
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    out = [[field.zero] * cols for _ in range(rows)]
    for i in range(rows):
        for k in range(inner):
            x = a[i][k]
            if field.is_zero(x):
                continue
            for j in range(cols):
                out[i][j] = field.add(out[i][j], field.mul(x, b[k][j]))
    return out


def to_nat(mat):
    """Convert a rational matrix to nonnegative ints, or None if impossible."""
    out = []
    for row in mat:
        new = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1 or f.numerator < 0:
                return None
            new.append(int(f))
        out.append(new)
    return out


def nat_kernel_basis(mat):
    """Free-module basis of the natural-number kernel of an integer matrix.

    Computes the rational kernel (trying both column elimination orders,
    since pivot choice decides the signs of the parametrization) and
    accepts a basis only when its columns are nonnegative integers and
    every column owns a pivot row: a row where it carries a 1 and all
    other columns are 0.  Under that condition the nonnegative solutions
    form a free module with exactly this basis.  Returns the columns or
    None; the validation is the soundness gate, the orders only widen
    coverage.
    """
    ncols = len(mat[0]) if mat else 0
    for order in (list(range(ncols - 1, -1, -1)), list(range(ncols))):
        basis = _nat_kernel_with_order(mat, order)
        if basis is not None:
            return basis
    return None


def _nat_kernel_with_order(mat, order):
    field = QF()
    permuted = [[row[c] for c in order] for row in mat]
    vecs = kernel_basis(field, mat_of(field, permuted))
    ncols = len(order)
    cols = []
    for vec in vecs:
        restored = [field.zero] * ncols
        for pos, c in enumerate(order):
            restored[c] = vec[pos]
        denom = 1
        for x in restored:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
        ints = [int(x * denom) for x in restored]
        if all(v <= 0 for v in ints):
            ints = [-v for v in ints]
        if any(v < 0 for v in ints):
            return None
        g = 0
        for v in ints:
            g = _gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        cols.append(ints)
    n = len(cols)
    for j, col in enumerate(cols):
        has_pivot = any(
            col[i] == 1 and all(cols[k][i] == 0 for k in range(n) if k != j)
            for i in range(ncols)
        )
        if not has_pivot:
            return None
    return cols


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)
