"""Differential bundles: data, axiom checking, morphism classification.

A bundle packages (E, M, q, zeta, sigma, lambda) together with a provider
for the pullback powers E_n of q (the powers are data, not something the
concrete categories could compute for arbitrary q).  Trivial bundles
M x V -> M over a differential object V get their provider for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

from . import nbullet, verify
from .errors import ProviderBoundTooSmall


class ProductProvider:
    """Pullback powers of a trivial bundle: power n is base x fiber^n."""

    def __init__(self, cat, base_rank, fiber_rank, bound=4):
        self.cat = cat
        self.base_rank = base_rank
        self.fiber_rank = fiber_rank
        self.bound = bound

    def power(self, n):
        self._check(n)
        return self.base_rank + n * self.fiber_rank

    def projections(self, n):
        self._check(n)
        m, v = self.base_rank, self.fiber_rank
        out = []
        for i in range(n):
            rows = []
            for r in range(m):
                rows.append([1 if c == r else 0 for c in range(m + n * v)])
            for r in range(v):
                col = m + i * v + r
                rows.append([1 if c == col else 0 for c in range(m + n * v)])
            out.append(self.cat.from_matrix(self.power(n), m + v, rows))
        return out

    def pair(self, n, fs):
        self._check(n)
        return self.cat.pair(self.projections(n), fs)

    def base_map(self, n):
        """The common projection power n -> base."""
        m, v = self.base_rank, self.fiber_rank
        rows = [[1 if c == r else 0 for c in range(m + n * v)] for r in range(m)]
        return self.cat.from_matrix(self.power(n), m, rows)

    def _check(self, n):
        if n > self.bound:
            raise ProviderBoundTooSmall(f"power {n} exceeds provider bound {self.bound}")


@dataclass
class DifferentialBundle:
    """The tuple (E, M, q, zeta, sigma, lambda) plus its pullback powers."""

    cat: object
    total: object
    base: object
    projection: object
    zero: object
    add: object
    lift: object
    provider: object
    label: str = "bundle"

    def powers_adapter(self):
        bundle = self

        class _Powers:
            @staticmethod
            def power(n):
                return bundle.provider.power(n), bundle.provider.projections(n)

            @staticmethod
            def pair(n, fs):
                return bundle.provider.pair(n, fs)

        return _Powers

    def base_map(self, n):
        if n == 0:
            return self.cat.identity(self.base)
        return self.cat.compose(self.projection, self.provider.projections(n)[0])

    def vertical_map(self, flip=False):
        """T(sigma) . <lift . pi0, 0 . pi1> : E_2 -> T(E) (or the flipped arm order)."""
        cat = self.cat
        pi0, pi1 = self.provider.projections(2)
        zero_e = cat.structural("zero", self.total)
        arms = [cat.compose(self.lift, pi0), cat.compose(zero_e, pi1)]
        if flip:
            arms = [cat.compose(zero_e, pi0), cat.compose(self.lift, pi1)]
        t_legs = [cat.tangent_morphism(p) for p in self.provider.projections(2)]
        inner = cat.pair(t_legs, arms)
        return cat.compose(cat.tangent_morphism(self.add), inner)


def trivial_bundle(cat, base_object, fiber_object, bound=4, label=None) -> DifferentialBundle:
    """M x V -> M with fiberwise structure from the differential object V.

    Total space M x V, projection onto M, addition 1 x sigma, zero section
    1 x zeta and lift 0_M x lambda, all written out in block coordinates
    (x, e) with tangent coordinates (x, e, dx, de).
    """
    m = cat.rank(base_object)
    v = cat.rank(fiber_object)
    ident_m = nbullet.NMatrix.identity(m)
    ident_v = nbullet.NMatrix.identity(v)
    zmv = nbullet.NMatrix.zeros(m, v)
    zvm = nbullet.NMatrix.zeros(v, m)
    zvv = nbullet.NMatrix.zeros(v, v)
    total = m + v
    q = nbullet.hstack(ident_m, zmv)
    zeta = nbullet.vstack(ident_m, zvm)
    sigma = nbullet.vstack(
        nbullet.hstack(ident_m, zmv, zmv), nbullet.hstack(zvm, ident_v, ident_v)
    )
    lift = nbullet.vstack(
        nbullet.hstack(ident_m, zmv),
        nbullet.NMatrix.zeros(v, total),
        nbullet.NMatrix.zeros(m, total),
        nbullet.hstack(zvm, ident_v),
    )
    provider = ProductProvider(cat, m, v, bound)
    return DifferentialBundle(
        cat=cat,
        total=total,
        base=base_object,
        projection=cat.from_matrix(total, m, q.entries),
        zero=cat.from_matrix(m, total, zeta.entries),
        add=cat.from_matrix(m + 2 * v, total, sigma.entries),
        lift=cat.from_matrix(total, 2 * total, lift.entries),
        provider=provider,
        label=label or f"trivial[{cat.obj_label(base_object)}x{cat.obj_label(fiber_object)}]",
    )


def diff_object_bundle(cat, k, bound=4, label=None) -> DifferentialBundle:
    """The rank-k object as a differential bundle over the terminal object."""
    return trivial_bundle(
        cat, cat.terminal(), k, bound, label=label or f"diffobj[{cat.obj_label(k)}]"
    )


def check_differential_bundle(
    bundle: DifferentialBundle,
    tangent_power=2,
    check_both_orientations=False,
    informational=False,
    report=None,
) -> verify.CheckReport:
    """All bundle laws: additive structure, lift compatibility, universality.

    Needs provider bound >= 3.  ``tangent_power`` bounds the powers of the
    tangent functor under which preservation of the E_n pullbacks is
    checked; ``informational`` adds the invertibility of the vertical map
    for bundles over the terminal object (a finer property, not a law).
    """
    if bundle.provider.bound < 3:
        raise ProviderBoundTooSmall("bundle checks need pullback powers up to 3")
    cat = bundle.cat
    if report is None:
        report = verify.CheckReport()
    prefix = bundle.label
    powers = bundle.powers_adapter()
    verify.check_additive_bundle(
        cat, powers, bundle.projection, bundle.add, bundle.zero,
        report, prefix=f"{prefix}:additive:",
    )

    t_total = cat.tangent(bundle.total)
    t_q = cat.tangent_morphism(bundle.projection)
    t_sigma = cat.tangent_morphism(bundle.add)
    t_zeta = cat.tangent_morphism(bundle.zero)

    class _TProviderPowers:
        @staticmethod
        def power(n):
            return (
                cat.tangent(bundle.provider.power(n)),
                [cat.tangent_morphism(p) for p in bundle.provider.projections(n)],
            )

        @staticmethod
        def pair(n, fs):
            _, legs = _TProviderPowers.power(n)
            return cat.pair(legs, fs)

    src = {
        "projection": bundle.projection,
        "plus": bundle.add,
        "zero": bundle.zero,
        "powers": powers,
    }
    t_dst = {"projection": t_q, "plus": t_sigma, "zero": t_zeta, "powers": _TProviderPowers}
    verify._additive_morphism_checks(
        cat, report, f"{prefix}:lift-vs-T", bundle.lift,
        cat.structural("zero", bundle.base), src, t_dst,
    )
    fiber_dst = {
        "projection": cat.structural("p", bundle.total),
        "plus": cat.structural("plus", bundle.total),
        "zero": cat.structural("zero", bundle.total),
        "powers": verify.TangentFiberPowers(cat, bundle.total),
    }
    verify._additive_morphism_checks(
        cat, report, f"{prefix}:lift-vs-fiber", bundle.lift, bundle.zero, src, fiber_dst
    )

    ell_e = cat.structural("ell", bundle.total)
    t_lift = cat.tangent_morphism(bundle.lift)
    verify._eq(report, cat, f"{prefix}:lift-coassoc", "bundle: lift coassociativity",
               cat.compose(ell_e, bundle.lift), cat.compose(t_lift, bundle.lift))

    orientations = [(False, "")] + ([(True, ":flipped")] if check_both_orientations else [])
    e2 = bundle.provider.power(2)
    pi0 = bundle.provider.projections(2)[0]
    for flip, suffix in orientations:
        try:
            nu = bundle.vertical_map(flip=flip)
        except Exception as exc:  # broken data: record, do not crash the suite
            report.add(
                f"{prefix}:universality{suffix}:commutes",
                "bundle: universality of the vertical lift",
                False,
                {"kind": "comparison-unavailable", "reason": str(exc),
                 "context": {"bundle": prefix}},
            )
            continue
        verify.check_pullback_square(
            cat,
            report,
            f"{prefix}:universality{suffix}",
            "bundle: universality of the vertical lift",
            e2,
            nu,
            cat.compose(bundle.projection, pi0),
            t_q,
            cat.structural("zero", bundle.base),
            tangent_depth=0,
            context={"bundle": prefix},
        )

    for n in range(2, min(bundle.provider.bound, 3) + 1):
        legs = bundle.provider.projections(n)
        apex = bundle.provider.power(n)
        q = bundle.projection
        for depth in range(tangent_power + 1):
            name = f"{prefix}:powers:E_{n}" + ("" if depth == 0 else f":T^{depth}")
            _check_wide_pullback(cat, report, name, apex, legs, q)
            apex = cat.tangent(apex)
            legs = [cat.tangent_morphism(leg) for leg in legs]
            q = cat.tangent_morphism(q)

    if informational and cat.rank(bundle.base) == 0:
        nu = bundle.vertical_map()
        mat = cat.as_matrix(nu)
        ok = mat is not None and cat.is_invertible_matrix(
            mat, cat.rank(cat.tangent(bundle.total)), cat.rank(e2)
        )
        report.add(
            f"{prefix}:info:vertical-iso",
            "informational: vertical map of a differential object is invertible",
            ok,
            None if ok else {"kind": "comparison-unavailable", "reason": "vertical map not invertible"},
        )
    return report


def _check_wide_pullback(cat, report, name, apex, legs, q):
    """apex with legs is the wide pullback of q along itself."""
    from . import exactla
    from .errors import NonLinearComparison, PullbackUnavailable

    anchor = "bundle: pullback powers preserved"
    try:
        qm = cat.matrix_or_raise(q)
        leg_mats = [cat.matrix_or_raise(leg) for leg in legs]
    except NonLinearComparison as exc:
        report.add(name, anchor, False, {"kind": "comparison-unavailable", "reason": str(exc)})
        return
    e_rank = cat.rank(cat.source(q))
    m_rank = cat.rank(cat.target(q))
    n = len(legs)
    fld = cat.field()
    system = []
    for i in range(n - 1):
        for r in range(m_rank):
            row = [fld.zero] * (n * e_rank)
            for ccol in range(e_rank):
                row[i * e_rank + ccol] = fld.of(qm[r][ccol])
                row[(i + 1) * e_rank + ccol] = fld.neg(fld.of(qm[r][ccol]))
            system.append(row)
    apex_rank = cat.rank(apex)
    if not system:
        basis = [
            [fld.one if i == j else fld.zero for j in range(n * e_rank)]
            for i in range(n * e_rank)
        ]
    elif cat.nonneg:
        ints = [[int(x) for x in row] for row in system]
        nat_basis = exactla.nat_kernel_basis(ints)
        if nat_basis is None:
            report.add(name, anchor, False,
                       {"kind": "comparison-unavailable", "reason": "pullback not free"})
            return
        basis = [[fld.of(x) for x in col] for col in nat_basis]
    else:
        basis = exactla.kernel_basis(fld, system)
    cone = []
    for mat in leg_mats:
        for r in range(e_rank):
            cone.append([fld.of(mat[r][j]) for j in range(apex_rank)])
    if not basis:
        ok = apex_rank == 0 and all(all(fld.is_zero(x) for x in row) for row in cone)
        report.add(name, anchor, ok, None if ok else {"kind": "comparison-unavailable",
                                                      "reason": "empty pullback"})
        return
    z = [[col[i] for col in basis] for i in range(n * e_rank)]
    comparison = exactla.solve(fld, z, cone)
    ok = comparison is not None and cat.is_invertible_matrix(
        comparison, len(basis), apex_rank
    )
    payload = None
    if not ok:
        payload = {
            "kind": "comparison-not-invertible",
            "category": verify._cat_descriptor(cat),
            "comparison": [[str(x) for x in row] for row in (comparison or [])],
            "shape": [len(basis), apex_rank],
        }
    report.add(name, anchor, ok, payload)


@dataclass
class BundleMorphism:
    """(f, g) between bundles, with its classification cached once computed."""

    source: DifferentialBundle
    target: DifferentialBundle
    total_map: object
    base_map: object
    flags: dict = dataclass_field(default_factory=dict)

    @property
    def classification(self):
        if "class" not in self.flags:
            self.flags["class"] = classify_morphism(
                self.source, self.target, self.total_map, self.base_map
            )
        return self.flags["class"]

    def is_additive(self):
        return self.classification in ("additive", "linear")

    def is_linear(self):
        return self.classification == "linear"


def classify_morphism(b, b2, f, g) -> str:
    """Strongest class of (f, g): none, bundle, additive or linear.

    Linearity is only reported together with additivity (a linear bundle
    morphism is always additive, and the return lattice enforces it).
    """
    cat = b.cat
    if not cat.equal(cat.compose(b2.projection, f), cat.compose(g, b.projection)):
        return "none"
    pi = b.provider.projections(2)
    f2 = b2.provider.pair(2, [cat.compose(f, pi[0]), cat.compose(f, pi[1])])
    additive = cat.equal(
        cat.compose(b2.add, f2), cat.compose(f, b.add)
    ) and cat.equal(cat.compose(b2.zero, g), cat.compose(f, b.zero))
    if not additive:
        return "bundle"
    linear = cat.equal(
        cat.compose(b2.lift, f), cat.compose(cat.tangent_morphism(f), b.lift)
    )
    return "linear" if linear else "additive"
