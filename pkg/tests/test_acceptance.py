"""Acceptance gate: every criterion runs at its stated size and tolerance.

Each test prints one PASS/FAIL line (run with -s to see them inline).
All equalities are exact; there are no numeric tolerances anywhere.
"""

import json
import random
import time

import pytest

from tangentcat import nbullet, polycat, verify, weil
from tangentcat.bundles import classify_morphism, diff_object_bundle, trivial_bundle
from tangentcat.categories import NBulletCategory, PolyCategory, WeilSelfCategory
from tangentcat.equivalence import (
    appendix_suite,
    ind,
    lineator_uniqueness_report,
    roundtrip_report,
    tensor_law_report,
)
from tangentcat.nbullet import NMatrix
from tangentcat.polycat import Domain, Polynomial, PolyMorphism
from tangentcat.selftest import BUILTIN_MUTATIONS, mutation_report

SEED = 7


def criterion(n, description, ok):
    print(f"ACCEPTANCE {n} [{description}]: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {n} failed: {description}"


def roundtrip_fixtures():
    """The shared fixture list: diff objects in the matrix category and
    trivial bundles over the rationals and Z/5."""
    ncat = NBulletCategory()
    fixtures = [diff_object_bundle(ncat, k, bound=8) for k in range(5)]
    for domain in (Domain.rational(), Domain.zp(5)):
        cat = PolyCategory(domain)
        for m in range(3):
            for v in range(3):
                fixtures.append(trivial_bundle(cat, m, v, bound=8))
    return fixtures


def test_criterion_1_tangent_axiom_suite():
    start = time.time()
    failures = []

    report = verify.check_tangent_category(
        NBulletCategory(), objects=[0, 1, 2, 3, 4],
        morphism_sample_size=100, seed=SEED, tangent_depth=2,
    )
    failures += report.failures()

    for domain in (Domain.rational(), Domain.zp(2), Domain.zp(3), Domain.zp(5)):
        report = verify.check_tangent_category(
            PolyCategory(domain), objects=[0, 1, 2, 3],
            morphism_sample_size=100, seed=SEED, tangent_depth=2,
        )
        failures += report.failures()

    report = verify.check_tangent_category(
        WeilSelfCategory(), objects=weil.enumerate_algebras(3),
        morphism_sample_size=50, seed=SEED, tangent_depth=2,
    )
    failures += report.failures()

    elapsed = time.time() - start
    ok = not failures and elapsed < 60.0
    criterion(
        1,
        f"tangent axiom suite, {elapsed:.1f}s, {len(failures)} failures",
        ok,
    )


def test_criterion_2_chain_rule():
    bad = 0
    total = 0
    for domain in (Domain.rational(), Domain.zp(2), Domain.zp(3), Domain.zp(5), Domain.nat()):
        cat = PolyCategory(domain)
        rng = random.Random(SEED)
        for _ in range(500):
            f = cat.sample_hom(rng)
            comps = [
                cat._sample_poly(rng, f.target_arity, 3, 3)
                for _ in range(rng.randint(0, 3))
            ]
            g = PolyMorphism(domain, f.target_arity, comps)
            total += 1
            lhs = polycat.tangent(polycat.compose(g, f))
            rhs = polycat.compose(polycat.tangent(g), polycat.tangent(f))
            if lhs != rhs:
                bad += 1
    criterion(2, f"chain rule exact on {total} composable pairs", bad == 0 and total == 2500)


def test_criterion_3_generator_reconstruction():
    rng = random.Random(SEED)
    bad = 0
    for _ in range(200):
        rows, cols = rng.randint(0, 4), rng.randint(0, 4)
        f = NMatrix(
            [[rng.randint(0, 5) for _ in range(cols)] for _ in range(rows)], rows, cols
        )
        terms = nbullet.decompose_matrix(f)
        if nbullet.evaluate_decomposition(terms, cols) != f:
            bad += 1
    criterion(3, "matrix reconstruction from generator terms, 200 samples", bad == 0)


def test_criterion_4_frobenius_witness():
    ok = True
    for p in (2, 3, 5):
        cat = PolyCategory(Domain.zp(p))
        bundle = diff_object_bundle(cat, 1)
        frob = PolyMorphism(cat.domain, 1, [Polynomial(cat.domain, 1, {(p,): 1})])
        ok = ok and classify_morphism(bundle, bundle, frob, cat.identity(0)) == "additive"
        ok = ok and classify_morphism(
            bundle, bundle, cat.identity(1), cat.identity(0)
        ) == "linear"
    criterion(4, "p-power map additive-not-linear, identity linear", ok)


def test_criterion_5_roundtrip():
    fixtures = roundtrip_fixtures()
    failures = []
    for bundle in fixtures:
        report = roundtrip_report(bundle, max_power=3)
        failures += report.failures()
    criterion(
        5,
        f"evaluate-after-induce identity on {len(fixtures)} fixtures",
        len(fixtures) >= 5 and not failures,
    )


def test_criterion_6_appendix_suite():
    failures = []
    count = 0
    for bundle in roundtrip_fixtures():
        report = appendix_suite(ind(bundle), seed=SEED, sample=5)
        count += report.total
        failures += report.failures()
    criterion(6, f"distributor naturality squares, {count} checks", not failures)


def test_criterion_7_tensor_law_and_uniqueness():
    failures = []
    for bundle in roundtrip_fixtures():
        failures += tensor_law_report(ind(bundle), max_dim_product=8).failures()
        failures += lineator_uniqueness_report(bundle, max_dim=8).failures()
    criterion(7, "distributor tensor law and nesting independence", not failures)


def test_criterion_8_mutation_sensitivity():
    report = mutation_report(seed=SEED)
    ok = report.total == len(BUILTIN_MUTATIONS) == 10 and report.failed == 0
    criterion(8, "ten structural mutations all detected with replayable witnesses", ok)


def test_criterion_9_deterministic_reports():
    def run_once():
        cat = PolyCategory(Domain.zp(5))
        report = verify.check_tangent_category(
            cat, objects=[0, 1, 2], morphism_sample_size=25, seed=SEED
        )
        report.extend(
            verify.check_foundational_pullbacks(
                cat, weil.dual_numbers(), weil.dual_numbers(), weil.dual_numbers(),
                objects=[1], seed=SEED,
            )
        )
        return json.dumps(report.to_json(), indent=2, sort_keys=True).encode()

    criterion(9, "identical seeds produce byte-identical JSON reports", run_once() == run_once())
