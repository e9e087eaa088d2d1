"""Mutation sensitivity: broken structural data must make some check fail.

Each builtin mutation perturbs a single entry (or generator image) of one
piece of structural data and runs the checker that is supposed to catch
it.  A healthy engine reports at least one failure per mutation, and every
failure carries a counterexample that replays.
"""

from __future__ import annotations

from . import nbullet, polycat, verify, weil
from .bundles import check_differential_bundle, diff_object_bundle, trivial_bundle
from .categories import NBulletCategory, PolyCategory, WeilSelfCategory
from .equivalence import appendix_suite, ind


def _bump(mat: nbullet.NMatrix, i, j):
    return mat.with_entry(i, j, mat.entries[i][j] + 1)


def _tangent_mutation(make_cat):
    def run(seed=0):
        cat = make_cat()
        return verify.check_tangent_category(
            cat, objects=[1], morphism_sample_size=5, seed=seed, tangent_depth=1
        )

    return run


def _nbullet_structural(kind):
    def make():
        base = nbullet.structural(kind, 1)
        return NBulletCategory(structural_overrides={(kind, 1): _bump(base, base.rows - 1, 0)})

    return _tangent_mutation(make)


def _poly_structural(kind, p):
    def make():
        domain = polycat.Domain.zp(p)
        base = nbullet.structural(kind, 1)
        broken = _bump(base, base.rows - 1, 0)
        cat = PolyCategory(domain)
        return PolyCategory(
            domain,
            structural_overrides={
                (kind, 1): polycat.PolyMorphism.from_matrix(domain, broken.entries, broken.cols)
            },
        )

    return _tangent_mutation(make)


def _weil_ell_mutation(seed=0):
    w = weil.dual_numbers()
    ww = weil.tensor(w, w)
    broken = weil.WeilMorphism(w, ww, [ww.element({(1, 2): 1, (1,): 1})])
    cat = WeilSelfCategory(structural_overrides={("ell", 1): broken})
    return verify.check_tangent_category(
        cat, objects=[weil.unit_algebra()], morphism_sample_size=3,
        seed=seed, tangent_depth=1,
    )


def _bundle_lift_mutation(seed=0):
    cat = NBulletCategory()
    bundle = diff_object_bundle(cat, 1)
    bundle.lift = cat.from_matrix(1, 2, [[1], [1]])
    return check_differential_bundle(bundle)


def _bundle_add_mutation(seed=0):
    cat = NBulletCategory()
    bundle = diff_object_bundle(cat, 1)
    bundle.add = cat.from_matrix(2, 1, [[1, 2]])
    return check_differential_bundle(bundle)


def _bundle_zero_mutation(seed=0):
    cat = NBulletCategory()
    bundle = trivial_bundle(cat, 1, 1)
    bundle.zero = cat.from_matrix(1, 2, [[1], [1]])
    return check_differential_bundle(bundle)


def _ind_vertical_mutation(seed=0):
    cat = NBulletCategory()
    bundle = diff_object_bundle(cat, 1, bound=8)
    broken = cat.from_matrix(2, 2, [[1, 0], [1, 1]])
    functor = ind(bundle, vertical_override=broken)
    return appendix_suite(functor, seed=seed, sample=3)


BUILTIN_MUTATIONS = [
    ("nbullet-ell-entry", _nbullet_structural("ell")),
    ("nbullet-c-entry", _nbullet_structural("c")),
    ("nbullet-plus-entry", _nbullet_structural("plus")),
    ("nbullet-p-entry", _nbullet_structural("p")),
    ("nbullet-zero-entry", _nbullet_structural("zero")),
    ("nbullet-lift-entry", _bundle_lift_mutation),
    ("nbullet-add-entry", _bundle_add_mutation),
    ("nbullet-base-zero-entry", _bundle_zero_mutation),
    ("poly-z5-ell-entry", _poly_structural("ell", 5)),
    ("ind-vertical-generator", _ind_vertical_mutation),
]


def mutation_report(seed=0) -> verify.CheckReport:
    """Run every builtin mutation; pass means the mutation WAS detected."""
    report = verify.CheckReport(seed=seed)
    for name, runner in BUILTIN_MUTATIONS:
        inner = runner(seed=seed)
        failures = inner.failures()
        detected = bool(failures)
        replayable = detected and all(
            f.counterexample is not None and verify.replay_counterexample(f.counterexample)
            for f in failures
        )
        report.add(
            f"mutation:{name}",
            "mutation sensitivity: a perturbed law must be caught",
            detected and replayable,
            None
            if detected and replayable
            else {"kind": "comparison-unavailable",
                  "reason": "mutation not detected" if not detected
                  else "counterexample did not replay"},
        )
    return report
