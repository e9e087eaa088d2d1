"""Axiom engine for concrete tangent categories.

Runs the tangent-category laws against any registered instance: additive
bundle laws on each tangent fiber, the lift/flip compatibility squares,
naturality of the five structural transformations on sampled morphisms,
and universality of the vertical lift decided by invertibility of the
comparison into the coordinate pullback.  Every failing check carries a
serialized counterexample that replays deterministically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import exactla, weil
from .errors import NonLinearComparison, PullbackUnavailable


@dataclass
class CheckResult:
    name: str
    anchor: str
    status: str
    counterexample: dict | None = None

    @property
    def ok(self):
        return self.status == "pass"


@dataclass
class CheckReport:
    """Outcome list for one verification run."""

    results: list = field(default_factory=list)
    seed: int | None = None

    def add(self, name, anchor, ok, counterexample=None):
        self.results.append(
            CheckResult(name, anchor, "pass" if ok else "fail", None if ok else counterexample)
        )

    def extend(self, other: "CheckReport"):
        self.results.extend(other.results)

    @property
    def total(self):
        return len(self.results)

    @property
    def failed(self):
        return sum(1 for r in self.results if not r.ok)

    @property
    def passed(self):
        return self.total - self.failed

    def failures(self):
        return [r for r in self.results if not r.ok]

    def __bool__(self):
        return self.failed == 0

    def to_json(self):
        checks = []
        for r in sorted(self.results, key=lambda r: r.name):
            entry = {"name": r.name, "anchor": r.anchor, "status": r.status}
            if r.counterexample is not None:
                entry["counterexample"] = r.counterexample
            checks.append(entry)
        return {
            "version": 1,
            "seed": self.seed,
            "checks": checks,
            "summary": {"total": self.total, "passed": self.passed, "failed": self.failed},
        }


def _cat_descriptor(cat):
    desc = {"name": cat.name}
    domain = getattr(cat, "domain", None)
    if domain is not None:
        desc["domain"] = repr(domain)
    return desc


def _guarded_pair(cat, report, name, anchor, legs, arms, context=None):
    """Pair arms into a pullback; on failure record a replayable counterexample."""
    try:
        return cat.pair(legs, arms)
    except (PullbackUnavailable, NonLinearComparison) as exc:
        report.add(
            name,
            anchor,
            False,
            {
                "kind": "pairing-failed",
                "category": _cat_descriptor(cat),
                "reason": str(exc),
                "legs": [cat.mor_json(l) for l in legs],
                "arms": [cat.mor_json(a) for a in arms],
                "context": context,
            },
        )
        return None


def _eq(report, cat, name, anchor, lhs, rhs, context=None):
    ok = cat.equal(lhs, rhs)
    payload = None
    if not ok:
        payload = {
            "kind": "morphism-equality",
            "category": _cat_descriptor(cat),
            "lhs": cat.mor_json(lhs),
            "rhs": cat.mor_json(rhs),
        }
        if context:
            payload["context"] = context
    report.add(name, anchor, ok, payload)
    return ok


def comparison_into_pullback(cat, apex, f, g, h, k):
    """Comparison of a commuting square into the coordinate pullback of (h, k).

    Returns (matrix, nrows, ncols) of the comparison in a chosen kernel
    basis.  Raises NonLinearComparison when a matrix extraction fails and
    PullbackUnavailable when the coordinate pullback is not a free object.
    """
    hm = cat.matrix_or_raise(h)
    km = cat.matrix_or_raise(k)
    fm = cat.matrix_or_raise(f)
    gm = cat.matrix_or_raise(g)
    a = cat.rank(cat.source(h))
    b = cat.rank(cat.source(k))
    fld = cat.field()
    rows = cat.rank(cat.target(h))
    system = []
    for i in range(rows):
        hr = hm[i] if i < len(hm) else ()
        kr = km[i] if i < len(km) else ()
        system.append([fld.of(x) for x in hr] + [fld.neg(fld.of(x)) for x in kr])
    if rows == 0:
        basis = [
            [fld.one if i == j else fld.zero for j in range(a + b)] for i in range(a + b)
        ]
    elif cat.nonneg:
        int_system = [[int(x) for x in row] for row in system]
        basis = exactla.nat_kernel_basis(int_system)
        if basis is None:
            raise PullbackUnavailable("coordinate pullback is not free over the naturals")
        basis = [[fld.of(x) for x in col] for col in basis]
    else:
        basis = exactla.kernel_basis(fld, system)
    z = [[col[i] for col in basis] for i in range(a + b)]
    apex_rank = cat.rank(apex)
    cone = [
        [fld.of(fm[i][j]) if i < len(fm) else fld.zero for j in range(apex_rank)]
        for i in range(a)
    ] + [
        [fld.of(gm[i][j]) if i < len(gm) else fld.zero for j in range(apex_rank)]
        for i in range(b)
    ]
    if not basis:
        comparison = []
        if any(any(not fld.is_zero(x) for x in row) for row in cone):
            raise PullbackUnavailable("cone does not factor through the empty pullback")
        return comparison, 0, apex_rank
    comparison = exactla.solve(fld, z, cone)
    if comparison is None:
        raise PullbackUnavailable("cone does not factor through the coordinate pullback")
    return comparison, len(basis), apex_rank


def check_pullback_square(
    cat, report, name, anchor, apex, f, g, h, k, tangent_depth=0, context=None
):
    """Commutativity plus comparison-isomorphism, optionally after T powers."""
    for depth in range(tangent_depth + 1):
        label = name if depth == 0 else f"{name}:T^{depth}"
        ok = _eq(
            report,
            cat,
            f"{label}:commutes",
            anchor,
            cat.compose(h, f),
            cat.compose(k, g),
            context,
        )
        if not ok:
            continue
        try:
            comparison, nrows, ncols = comparison_into_pullback(cat, apex, f, g, h, k)
            iso = cat.is_invertible_matrix(comparison, nrows, ncols)
            payload = None
            if not iso:
                payload = {
                    "kind": "comparison-not-invertible",
                    "category": _cat_descriptor(cat),
                    "comparison": [[str(x) for x in row] for row in comparison],
                    "shape": [nrows, ncols],
                }
                if context:
                    payload["context"] = context
            report.add(f"{label}:pullback", anchor, iso, payload)
        except (NonLinearComparison, PullbackUnavailable) as exc:
            report.add(
                f"{label}:pullback",
                anchor,
                False,
                {"kind": "comparison-unavailable", "reason": str(exc), "context": context},
            )
        apex = cat.tangent(apex)
        f = cat.tangent_morphism(f)
        g = cat.tangent_morphism(g)
        h = cat.tangent_morphism(h)
        k = cat.tangent_morphism(k)


class TangentFiberPowers:
    """Pullback powers of p over an object, with pairing, for the engine."""

    def __init__(self, cat, base_object):
        self.cat = cat
        self.base = base_object

    def power(self, n):
        return self.cat.tangent_pullback(self.base, n)

    def pair(self, n, fs):
        _, legs = self.power(n)
        return self.cat.pair(legs, fs)


def _powers_pair(cat, report, powers, name, anchor, n, arms, context=None):
    _, legs = powers.power(n)
    return _guarded_pair(cat, report, name, anchor, legs, arms, context)


def check_additive_bundle(cat, powers, projection, plus, zero, report=None, prefix=""):
    """Projection, unit and the three addition diagrams for an additive bundle.

    ``powers`` provides the pullback powers of the projection (with legs
    and pairing); ``plus`` is defined on power 2 and ``zero`` on the base.
    """
    if report is None:
        report = CheckReport()
    cat_id = cat.identity
    total = cat.source(projection)
    base = cat.target(projection)
    _, legs2 = powers.power(2)
    pi0, pi1 = legs2
    anchor = "additive bundle: projection compatibility"
    _eq(report, cat, f"{prefix}proj-plus", anchor, cat.compose(projection, plus),
        cat.compose(projection, pi0))
    _eq(report, cat, f"{prefix}proj-proj1", anchor, cat.compose(projection, pi0),
        cat.compose(projection, pi1))
    _eq(report, cat, f"{prefix}proj-zero", "additive bundle: section",
        cat.compose(projection, zero), cat_id(base))
    _, legs3 = powers.power(3)
    q0, q1, q2 = legs3
    anchor = "additive bundle: associativity"
    first = _powers_pair(cat, report, powers, f"{prefix}assoc", anchor, 2, [q0, q1])
    second = _powers_pair(cat, report, powers, f"{prefix}assoc", anchor, 2, [q1, q2])
    if first is not None and second is not None:
        left_arm = _powers_pair(
            cat, report, powers, f"{prefix}assoc", anchor, 2,
            [cat.compose(plus, first), q2],
        )
        right_arm = _powers_pair(
            cat, report, powers, f"{prefix}assoc", anchor, 2,
            [q0, cat.compose(plus, second)],
        )
        if left_arm is not None and right_arm is not None:
            _eq(report, cat, f"{prefix}assoc", anchor,
                cat.compose(plus, left_arm), cat.compose(plus, right_arm))
    anchor = "additive bundle: commutativity"
    swapped = _powers_pair(cat, report, powers, f"{prefix}comm", anchor, 2, [pi1, pi0])
    if swapped is not None:
        _eq(report, cat, f"{prefix}comm", anchor, cat.compose(plus, swapped), plus)
    anchor = "additive bundle: unitality"
    unit_arm = _powers_pair(
        cat, report, powers, f"{prefix}unit", anchor, 2,
        [cat.compose(zero, projection), cat_id(total)],
    )
    if unit_arm is not None:
        _eq(report, cat, f"{prefix}unit", anchor,
            cat.compose(plus, unit_arm), cat_id(total))
    return report


def _additive_morphism_checks(cat, report, prefix, f, g, src, dst):
    """The three squares making (f, g) a morphism of additive bundles.

    src and dst are dicts with projection/plus/zero/powers entries.
    """
    anchor = "additive bundle morphism"
    _eq(report, cat, f"{prefix}:proj", anchor,
        cat.compose(dst["projection"], f), cat.compose(g, src["projection"]))
    _, src_legs = src["powers"].power(2)
    f2 = _powers_pair(
        cat, report, dst["powers"], f"{prefix}:add", anchor, 2,
        [cat.compose(f, leg) for leg in src_legs],
    )
    if f2 is not None:
        _eq(report, cat, f"{prefix}:add", anchor,
            cat.compose(dst["plus"], f2), cat.compose(f, src["plus"]))
    _eq(report, cat, f"{prefix}:zero", anchor,
        cat.compose(dst["zero"], g), cat.compose(f, src["zero"]))


def vertical_lift_map(cat, m):
    """nu = T(+) . <ell . pi0, 0_T . pi1> : T_2(M) -> T^2(M)."""
    t2, legs = cat.tangent_pullback(m, 2)
    pi0, pi1 = legs
    tm = cat.tangent(m)
    ell = cat.structural("ell", m)
    zero_tm = cat.structural("zero", tm)
    t_plus = cat.tangent_morphism(cat.structural("plus", m))
    t_legs = [cat.tangent_morphism(leg) for leg in legs]
    inner = cat.pair(t_legs, [cat.compose(ell, pi0), cat.compose(zero_tm, pi1)])
    return cat.compose(t_plus, inner), t2, legs


def check_tangent_object(cat, m, report, tangent_depth=2):
    """All object-level tangent laws at m."""
    label = cat.obj_label(m)
    tm = cat.tangent(m)
    p = cat.structural("p", m)
    plus = cat.structural("plus", m)
    zero = cat.structural("zero", m)
    ell = cat.structural("ell", m)
    c = cat.structural("c", m)
    fiber = TangentFiberPowers(cat, m)
    tfiber = TangentFiberPowers(cat, tm)
    check_additive_bundle(cat, fiber, p, plus, zero, report, prefix=f"{label}:bundle:")

    t_p = cat.tangent_morphism(p)
    t_plus = cat.tangent_morphism(plus)
    t_zero = cat.tangent_morphism(zero)

    class _TPowers:
        """Powers of T(p): images T(T_n M) of the preserved fiber powers."""

        @staticmethod
        def power(n):
            apex, legs = cat.tangent_pullback(m, n)
            return cat.tangent(apex), [cat.tangent_morphism(leg) for leg in legs]

        @staticmethod
        def pair(n, fs):
            _, legs = _TPowers.power(n)
            return cat.pair(legs, fs)

    src = {"projection": p, "plus": plus, "zero": zero, "powers": fiber}
    t_dst = {"projection": t_p, "plus": t_plus, "zero": t_zero, "powers": _TPowers}
    _additive_morphism_checks(
        cat, report, f"{label}:lift-morphism", ell, zero, src, t_dst
    )

    p_tm = cat.structural("p", tm)
    plus_tm = cat.structural("plus", tm)
    zero_tm = cat.structural("zero", tm)
    t2_src = {"projection": t_p, "plus": t_plus, "zero": t_zero, "powers": _TPowers}
    t2_dst = {"projection": p_tm, "plus": plus_tm, "zero": zero_tm, "powers": tfiber}
    _additive_morphism_checks(
        cat, report, f"{label}:flip-morphism", c, cat.identity(tm), t2_src, t2_dst
    )

    _eq(report, cat, f"{label}:flip-involution", "tangent: c . c = 1",
        cat.compose(c, c), cat.identity(cat.tangent(tm)))
    _eq(report, cat, f"{label}:flip-lift", "tangent: c . ell = ell",
        cat.compose(c, ell), ell)

    ell_tm = cat.structural("ell", tm)
    t_ell = cat.tangent_morphism(ell)
    _eq(report, cat, f"{label}:lift-coassoc", "tangent: lift coassociativity",
        cat.compose(t_ell, ell), cat.compose(ell_tm, ell))
    c_tm = cat.structural("c", tm)
    t_c = cat.tangent_morphism(c)
    _eq(report, cat, f"{label}:flip-braid", "tangent: flip braid relation",
        cat.compose(t_c, cat.compose(c_tm, t_c)), cat.compose(c_tm, cat.compose(t_c, c_tm)))
    _eq(report, cat, f"{label}:lift-flip-square", "tangent: lift/flip compatibility",
        cat.compose(c_tm, cat.compose(t_c, ell_tm)), cat.compose(t_ell, c))

    try:
        nu, t2, legs = vertical_lift_map(cat, m)
    except (PullbackUnavailable, NonLinearComparison) as exc:
        report.add(
            f"{label}:vertical-lift:commutes",
            "tangent: universality of the vertical lift",
            False,
            {"kind": "comparison-unavailable", "reason": str(exc),
             "context": {"object": cat.obj_json(m)}},
        )
        return
    check_pullback_square(
        cat,
        report,
        f"{label}:vertical-lift",
        "tangent: universality of the vertical lift",
        t2,
        nu,
        cat.compose(p, legs[0]),
        cat.tangent_morphism(p),
        zero,
        tangent_depth=tangent_depth,
        context={"object": cat.obj_json(m)},
    )


def check_naturality(cat, f, report, prefix=""):
    """Naturality of p, 0, +, ell, c with respect to one morphism."""
    x = cat.source(f)
    y = cat.target(f)
    tf = cat.tangent_morphism(f)
    t2f = cat.tangent_morphism(tf)
    anchor = "tangent: naturality of structural transformations"
    _eq(report, cat, f"{prefix}nat-p", anchor,
        cat.compose(cat.structural("p", y), tf), cat.compose(f, cat.structural("p", x)),
        context={"morphism": cat.mor_json(f)})
    _eq(report, cat, f"{prefix}nat-zero", anchor,
        cat.compose(cat.structural("zero", y), f), cat.compose(tf, cat.structural("zero", x)),
        context={"morphism": cat.mor_json(f)})
    _, legs_x = cat.tangent_pullback(x, 2)
    _, legs_y = cat.tangent_pullback(y, 2)
    t2_f = _guarded_pair(
        cat, report, f"{prefix}nat-plus", anchor, legs_y,
        [cat.compose(tf, leg) for leg in legs_x],
        context={"morphism": cat.mor_json(f)},
    )
    if t2_f is not None:
        _eq(report, cat, f"{prefix}nat-plus", anchor,
            cat.compose(cat.structural("plus", y), t2_f),
            cat.compose(tf, cat.structural("plus", x)),
            context={"morphism": cat.mor_json(f)})
    _eq(report, cat, f"{prefix}nat-ell", anchor,
        cat.compose(cat.structural("ell", y), tf), cat.compose(t2f, cat.structural("ell", x)),
        context={"morphism": cat.mor_json(f)})
    _eq(report, cat, f"{prefix}nat-c", anchor,
        cat.compose(cat.structural("c", y), t2f), cat.compose(t2f, cat.structural("c", x)),
        context={"morphism": cat.mor_json(f)})


def _category_sanity(cat, m, f, report, prefix):
    """Spot checks that the instance is a category at all: units, associativity,
    reflexive equality.  Structural maps give a composable triple at m."""
    anchor = "category sanity"
    ident_src = cat.identity(cat.source(f))
    ident_tgt = cat.identity(cat.target(f))
    _eq(report, cat, f"{prefix}unit-right", anchor, cat.compose(f, ident_src), f)
    _eq(report, cat, f"{prefix}unit-left", anchor, cat.compose(ident_tgt, f), f)
    report.add(f"{prefix}equality-reflexive", anchor, cat.equal(f, f))
    ell = cat.structural("ell", m)
    flip = cat.structural("c", m)
    t_p = cat.tangent_morphism(cat.structural("p", m))
    _eq(report, cat, f"{prefix}assoc", anchor,
        cat.compose(cat.compose(t_p, flip), ell),
        cat.compose(t_p, cat.compose(flip, ell)))


def check_tangent_category(
    cat, objects, morphism_sample_size=50, seed=0, tangent_depth=2, sampler=None
):
    """Full object-law and sampled-naturality suite for one instance."""
    report = CheckReport(seed=seed)
    if not objects:
        raise ValueError("object sample must be nonempty")
    for m in objects:
        check_tangent_object(cat, m, report, tangent_depth=tangent_depth)
    rng = random.Random(seed)
    for i in range(morphism_sample_size):
        f = sampler(rng) if sampler is not None else cat.sample_hom(rng)
        check_naturality(cat, f, report, prefix=f"sample-{i}:")
        if i < 3:
            _category_sanity(cat, objects[0], f, report, prefix=f"sanity-{i}:")
    return report


def check_foundational_pullbacks(cat, a, b, c, objects, tangent_depth=0, seed=0):
    """The tensor-of-product squares, checked at each object.

    b and c must be single powers of the dual numbers.
    """
    report = CheckReport(seed=seed)
    nb = b.generator_count
    nc = c.generator_count
    for alg in (b, c):
        if len(alg.cliques) > 1:
            raise PullbackUnavailable(f"{alg!r} is not a power of the dual numbers")
    bc = weil.w_power(nb + nc)
    pi_b = weil.WeilMorphism(
        bc, b, [b.generator(i) if i <= nb else b.zero_element() for i in range(1, nb + nc + 1)]
    )
    pi_c = weil.WeilMorphism(
        bc,
        c,
        [c.zero_element() if i <= nb else c.generator(i - nb) for i in range(1, nb + nc + 1)],
    )
    ident_a = weil.identity(a)
    leg_b = weil.tensor_morphism(ident_a, pi_b)
    leg_c = weil.tensor_morphism(ident_a, pi_c)
    eps_b = weil.tensor_morphism(ident_a, weil.augmentation(b))
    eps_c = weil.tensor_morphism(ident_a, weil.augmentation(c))
    for x in objects:
        apex = cat.weil_object(weil.tensor(a, bc), x)
        name = (
            f"foundational:{cat.obj_label(x)}:"
            f"A={_weil_label(a)},B={_weil_label(b)},C={_weil_label(c)}"
        )
        check_pullback_square(
            cat,
            report,
            name,
            "tensor of a product square is a pullback",
            apex,
            cat.weil_theta(leg_b, x),
            cat.weil_theta(leg_c, x),
            cat.weil_theta(eps_b, x),
            cat.weil_theta(eps_c, x),
            tangent_depth=tangent_depth,
            context={"object": cat.obj_json(x)},
        )
    return report


def _weil_label(a):
    blocks = weil.decompose(a)
    if not blocks:
        return "N"
    return "(x)".join(f"W^{n}" if n > 1 else "W" for n in blocks)


def replay_counterexample(payload, category=None):
    """Re-run a serialized counterexample; True when the failure reproduces."""
    from .cli import category_from_descriptor  # local import, cli owns builtins

    kind = payload.get("kind")
    if kind == "morphism-equality":
        cat = category or category_from_descriptor(payload["category"])
        lhs = cat.mor_from_json(payload["lhs"])
        rhs = cat.mor_from_json(payload["rhs"])
        return not cat.equal(lhs, rhs)
    if kind == "comparison-not-invertible":
        cat = category or category_from_descriptor(payload["category"])
        nrows, ncols = payload["shape"]
        mat = [[_parse_scalar(x) for x in row] for row in payload["comparison"]]
        return not cat.is_invertible_matrix(mat, nrows, ncols)
    if kind == "pairing-failed":
        cat = category or category_from_descriptor(payload["category"])
        legs = [cat.mor_from_json(l) for l in payload["legs"]]
        arms = [cat.mor_from_json(a) for a in payload["arms"]]
        try:
            cat.pair(legs, arms)
        except (PullbackUnavailable, NonLinearComparison):
            return True
        return False
    if kind == "comparison-unavailable":
        return True
    return False


def _parse_scalar(text):
    from fractions import Fraction

    return Fraction(text)
