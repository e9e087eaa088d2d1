"""Concrete tangent category adapters.

Each adapter exposes the same capability surface: finite-rank objects,
morphisms with decidable equality and composition, the action of the
monomial algebras of :mod:`tangentcat.weil` on objects and morphisms,
pairing into pullbacks (by exact linear solving), linear-morphism
introspection, and a seeded morphism sampler.  The axiom engine in
:mod:`tangentcat.verify` is written against this surface only.
"""

from __future__ import annotations

from fractions import Fraction

from . import exactla, nbullet, polycat, weil
from .errors import NonLinearComparison, PullbackUnavailable

_W = weil.dual_numbers()
_UNIT = weil.unit_algebra()


class TangentCategoryBase:
    """Shared driver code: structural maps, tangent pullbacks, solving."""

    name = "base"
    scalar = "nat"

    def __init__(self, structural_overrides=None):
        self._overrides = dict(structural_overrides or {})

    # -- capabilities each subclass provides ---------------------------------
    #   terminal, rank, identity, compose, equal, source, target,
    #   weil_object, weil_morphism, weil_theta, as_matrix, from_matrix,
    #   pair, sample_object, sample_hom, obj_json/obj_from_json,
    #   mor_json/mor_from_json

    def tangent(self, x):
        return self.weil_object(_W, x)

    def tangent_morphism(self, f):
        return self.weil_morphism(_W, f)

    def structural(self, kind, x):
        """Structural transformation at x; mutations override by (kind, rank)."""
        override = self._overrides.get((kind, self.rank(x)))
        if override is not None:
            return override
        return self.weil_theta(weil.structural_map(kind), x)

    def tangent_pullback(self, x, n):
        """T_n(x) with its projections to T(x) (pullback of p over itself)."""
        wn = weil.w_power(n)
        apex = self.weil_object(wn, x)
        legs = [self.weil_theta(weil.projection(n, i), x) for i in range(1, n + 1)]
        return apex, legs

    def field(self):
        if self.scalar == "zp":
            return exactla.GF(self.domain.p)
        return exactla.QF()

    @property
    def nonneg(self):
        return self.scalar in ("nat", "weil")

    def matrix_or_raise(self, f):
        mat = self.as_matrix(f)
        if mat is None:
            raise NonLinearComparison(f"{f!r} is not linear")
        return mat

    def is_invertible_matrix(self, mat, nrows, ncols):
        """Two-sided invertibility in the category's scalar discipline.

        Over a field this is exact full rank; over the naturals a two-sided
        inverse must itself have natural-number entries.
        """
        if nrows != ncols:
            return False
        if nrows == 0:
            return True
        field = self.field()
        inv = exactla.inverse(field, exactla.mat_of(field, mat))
        if inv is None:
            return False
        if self.nonneg and exactla.to_nat(inv) is None:
            return False
        return True


def _stack_matrices(mats):
    return [list(row) for mat in mats for row in mat]


class NBulletCategory(TangentCategoryBase):
    """Free finite-rank N-modules with N-matrix morphisms."""

    name = "nbullet"
    scalar = "nat"

    def terminal(self):
        return 0

    def rank(self, x):
        return x

    def obj_label(self, x):
        return f"N^{x}"

    def identity(self, x):
        return nbullet.NMatrix.identity(x)

    def compose(self, g, f):
        return g @ f

    def equal(self, f, g):
        return f == g

    def source(self, f):
        return f.cols

    def target(self, f):
        return f.rows

    def weil_object(self, a, x):
        return a.dimension * x

    def weil_morphism(self, a, f):
        return nbullet.weil_action_on_f(a, f)

    def weil_theta(self, theta, x):
        return nbullet.weil_action_on_theta(theta, x)

    def as_matrix(self, f):
        return f.entries

    def from_matrix(self, x, y, mat):
        return nbullet.NMatrix(mat, y, x)

    def pair(self, legs, fs):
        """Unique h with legs[i] . h = fs[i], by exact rational solving."""
        field = exactla.QF()
        stacked = exactla.mat_of(field, _stack_matrices([l.entries for l in legs]))
        rhs = exactla.mat_of(field, _stack_matrices([f.entries for f in fs]))
        sol = exactla.solve(field, stacked, rhs)
        nat = exactla.to_nat(sol) if sol is not None else None
        if nat is None:
            raise PullbackUnavailable("no natural-number pairing solution")
        h = nbullet.NMatrix(nat, legs[0].cols, fs[0].cols)
        for leg, f in zip(legs, fs):
            if leg @ h != f:
                raise PullbackUnavailable("pairing components do not form a cone")
        return h

    def sample_object(self, rng, max_rank=4):
        return rng.randint(0, max_rank)

    def sample_hom(self, rng, max_rank=4, max_entry=3):
        x = rng.randint(0, max_rank)
        y = rng.randint(0, max_rank)
        entries = [[rng.randint(0, max_entry) for _ in range(x)] for _ in range(y)]
        return nbullet.NMatrix(entries, y, x)

    def obj_json(self, x):
        return {"rank": x}

    def obj_from_json(self, data):
        return data["rank"]

    def mor_json(self, f):
        return {"rows": f.rows, "cols": f.cols, "entries": [list(r) for r in f.entries]}

    def mor_from_json(self, data):
        return nbullet.NMatrix(data["entries"], data["rows"], data["cols"])


class PolyCategory(TangentCategoryBase):
    """Polynomial morphisms over an exact scalar domain."""

    def __init__(self, domain: polycat.Domain, structural_overrides=None):
        super().__init__(structural_overrides)
        self.domain = domain
        self.name = f"poly[{domain!r}]"
        self.scalar = domain.tag

    def terminal(self):
        return 0

    def rank(self, x):
        return x

    def obj_label(self, x):
        return f"F^{x}"

    def identity(self, x):
        return polycat.identity(self.domain, x)

    def compose(self, g, f):
        return polycat.compose(g, f)

    def equal(self, f, g):
        return f == g

    def source(self, f):
        return f.source_arity

    def target(self, f):
        return f.target_arity

    def weil_object(self, a, x):
        return a.dimension * x

    def weil_morphism(self, a, f):
        return polycat.weil_action_on_f(a, f)

    def weil_theta(self, theta, x):
        return polycat.weil_action_on_theta(theta, x, self.domain)

    def as_matrix(self, f):
        return f.as_matrix()

    def from_matrix(self, x, y, mat):
        return polycat.PolyMorphism.from_matrix(self.domain, mat, x)

    def pair(self, legs, fs):
        """Gaussian elimination with polynomial right-hand sides."""
        leg_mats = [self.matrix_or_raise(l) for l in legs]
        width = legs[0].source_arity
        nvars = fs[0].source_arity
        solve_domain = (
            polycat.Domain.rational() if self.domain.tag == "nat" else self.domain
        )
        field = exactla.GF(self.domain.p) if self.domain.tag == "zp" else exactla.QF()
        rows = []
        rhs = []
        for mat, f in zip(leg_mats, fs):
            for i, row in enumerate(mat):
                rows.append([field.of(x) for x in row])
                rhs.append(_poly_cast(f.components[i], solve_domain))
        comps = _solve_poly_system(field, rows, rhs, width, solve_domain, nvars)
        if comps is None:
            raise PullbackUnavailable("pairing components do not form a cone")
        if self.domain.tag == "nat":
            comps = [_poly_cast(c, self.domain) for c in comps]
        h = polycat.PolyMorphism(self.domain, nvars, comps)
        for leg, f in zip(legs, fs):
            if polycat.compose(leg, h) != f:
                raise PullbackUnavailable("pairing components do not form a cone")
        return h

    def sample_object(self, rng, max_rank=3):
        return rng.randint(0, max_rank)

    def sample_hom(self, rng, max_rank=3, max_degree=3, max_terms=3):
        x = rng.randint(0, max_rank)
        y = rng.randint(0, max_rank)
        comps = [self._sample_poly(rng, x, max_degree, max_terms) for _ in range(y)]
        return polycat.PolyMorphism(self.domain, x, comps)

    def _sample_poly(self, rng, nvars, max_degree, max_terms):
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            exps = [0] * nvars
            for _ in range(rng.randint(0, max_degree)):
                if nvars == 0:
                    break
                exps[rng.randrange(nvars)] += 1
            terms[tuple(exps)] = self._sample_scalar(rng)
        return polycat.Polynomial(self.domain, nvars, terms)

    def _sample_scalar(self, rng):
        if self.domain.tag == "zp":
            return rng.randint(1, self.domain.p - 1)
        if self.domain.tag == "nat":
            return rng.randint(1, 3)
        num = rng.choice([-3, -2, -1, 1, 2, 3])
        return Fraction(num, rng.randint(1, 3))

    def obj_json(self, x):
        return {"rank": x}

    def obj_from_json(self, data):
        return data["rank"]

    def mor_json(self, f):
        return {
            "source": f.source_arity,
            "components": [
                [[list(e), str(c)] for e, c in comp.sorted_terms()] for comp in f.components
            ],
        }

    def mor_from_json(self, data):
        comps = []
        for ser in data["components"]:
            terms = {}
            for exps, coeff in ser:
                terms[tuple(exps)] = self._scalar_from_str(coeff)
            comps.append(polycat.Polynomial(self.domain, data["source"], terms))
        return polycat.PolyMorphism(self.domain, data["source"], comps)

    def _scalar_from_str(self, text):
        if self.domain.tag == "rational":
            return Fraction(text)
        return int(text)


def _poly_cast(poly, domain):
    return polycat.Polynomial(domain, poly.nvars, dict(poly.terms))


def _solve_poly_system(field, rows, rhs, width, domain, nvars):
    """Solve rows . h = rhs for polynomials h (unique solution required)."""
    zero = polycat.Polynomial(domain, nvars, {})
    rows = [row[:] for row in rows]
    rhs = rhs[:]
    nrows = len(rows)
    pivots = {}
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, nrows) if not field.is_zero(rows[i][c])), None)
        if pivot is None:
            return None  # not full column rank: pairing not unique
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
        inv = field.div(field.one, rows[r][c])
        rows[r] = [field.mul(x, inv) for x in rows[r]]
        rhs[r] = rhs[r].scale(_field_to_domain(field, inv, domain))
        for i in range(nrows):
            if i != r and not field.is_zero(rows[i][c]):
                factor = rows[i][c]
                rows[i] = [field.sub(rows[i][j], field.mul(factor, rows[r][j])) for j in range(width)]
                rhs[i] = rhs[i] + rhs[r].scale(
                    _field_to_domain(field, field.neg(factor), domain)
                )
        pivots[c] = r
        r += 1
    for i in range(r, nrows):
        if not rhs[i].is_zero():
            return None  # inconsistent
    return [rhs[pivots[c]] for c in range(width)]


def _field_to_domain(field, value, domain):
    if domain.tag == "zp":
        return value
    return Fraction(value)


class WeilSelfCategory(TangentCategoryBase):
    """The monomial algebras acting on themselves by tensoring."""

    name = "weil"
    scalar = "weil"

    def terminal(self):
        return _UNIT

    def rank(self, x):
        return x.dimension

    def obj_label(self, x):
        blocks = weil.decompose(x)
        if not blocks:
            return "N"
        return "(x)".join(f"W^{n}" if n > 1 else "W" for n in blocks)

    def identity(self, x):
        return weil.identity(x)

    def compose(self, g, f):
        return weil.compose(g, f)

    def equal(self, f, g):
        return f == g

    def source(self, f):
        return f.source

    def target(self, f):
        return f.target

    def weil_object(self, a, x):
        return weil.tensor(a, x)

    def weil_morphism(self, a, f):
        return weil.tensor_morphism(weil.identity(a), f)

    def weil_theta(self, theta, x):
        return weil.tensor_morphism(theta, weil.identity(x))

    def as_matrix(self, f):
        return f.basis_matrix()

    def from_matrix(self, x, y, mat):
        images = []
        for g in range(1, x.generator_count + 1):
            col = x.basis_index[(g,)]
            coeffs = {}
            for i, mono in enumerate(y.basis):
                if mat[i][col]:
                    coeffs[mono] = mat[i][col]
            images.append(weil.WeilElement(y, coeffs))
        candidate = weil.WeilMorphism(x, y, images)
        if candidate.basis_matrix() != tuple(tuple(row) for row in mat):
            raise ValueError("matrix is not multiplicative on the basis")
        return candidate

    def pair(self, legs, fs):
        field = exactla.QF()
        stacked = exactla.mat_of(
            field, _stack_matrices([l.basis_matrix() for l in legs])
        )
        source = fs[0].source
        target = legs[0].source
        images = []
        for g in range(1, source.generator_count + 1):
            rhs = [
                [Fraction(v)]
                for f in fs
                for v in f.generator_images[g - 1].vector()
            ]
            sol = exactla.solve(field, stacked, rhs)
            nat = exactla.to_nat(sol) if sol is not None else None
            if nat is None:
                raise PullbackUnavailable("no natural-number pairing solution")
            coeffs = {target.basis[i]: nat[i][0] for i in range(target.dimension) if nat[i][0]}
            images.append(weil.WeilElement(target, coeffs))
        h = weil.WeilMorphism(source, target, images)
        for leg, f in zip(legs, fs):
            if weil.compose(leg, h) != f:
                raise PullbackUnavailable("pairing components do not form a cone")
        return h

    def sample_object(self, rng, max_rank=3):
        algebras = weil.enumerate_algebras(max_rank)
        return rng.choice(algebras)

    def sample_hom(self, rng, max_rank=3):
        algebras = weil.enumerate_algebras(max_rank)
        source = rng.choice(algebras)
        target = rng.choice(algebras)
        return self._sample_morphism(rng, source, target)

    def _sample_morphism(self, rng, source, target):
        nil_monos = [m for m in target.basis if m]
        for _ in range(20):
            images = []
            for _ in range(source.generator_count):
                if not nil_monos or rng.random() < 0.25:
                    images.append(target.zero_element())
                else:
                    mono = rng.choice(nil_monos)
                    images.append(weil.WeilElement(target, {mono: rng.randint(1, 2)}))
            try:
                return weil.WeilMorphism(source, target, images)
            except ValueError:
                continue
        # always-valid fallback: every generator lands on one common monomial
        if nil_monos:
            mono = rng.choice(nil_monos)
            images = [
                weil.WeilElement(target, {mono: rng.randint(0, 2)})
                for _ in range(source.generator_count)
            ]
        else:
            images = [target.zero_element()] * source.generator_count
        return weil.WeilMorphism(source, target, images)

    def obj_json(self, x):
        return {
            "generators": x.generator_count,
            "pairs": sorted(sorted(p) for p in x.related_pairs),
        }

    def obj_from_json(self, data):
        return weil.WeilAlgebra(data["generators"], [tuple(p) for p in data["pairs"]])

    def mor_json(self, f):
        return {
            "source": self.obj_json(f.source),
            "target": self.obj_json(f.target),
            "images": [
                sorted((list(m), c) for m, c in img.coefficients.items())
                for img in f.generator_images
            ],
        }

    def mor_from_json(self, data):
        source = self.obj_from_json(data["source"])
        target = self.obj_from_json(data["target"])
        images = [
            weil.WeilElement(target, {tuple(m): c for m, c in img})
            for img in data["images"]
        ]
        return weil.WeilMorphism(source, target, images)


class TrivialTangentCategory(NBulletCategory):
    """Identity-functor tangent structure on the matrix category.

    Degenerate instance used by the checker self-tests: every structural
    transformation is an identity, all axioms hold vacuously.
    """

    name = "trivial"

    def weil_object(self, a, x):
        return x

    def weil_morphism(self, a, f):
        return f

    def weil_theta(self, theta, x):
        return nbullet.NMatrix.identity(x)

    def structural(self, kind, x):
        return nbullet.NMatrix.identity(x)
