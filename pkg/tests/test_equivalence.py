import random

import pytest

from tangentcat import equivalence, nbullet, polycat, verify, weil
from tangentcat.bundles import classify_morphism, diff_object_bundle, trivial_bundle
from tangentcat.categories import NBulletCategory, PolyCategory
from tangentcat.equivalence import (
    DiffNatTransformation,
    appendix_suite,
    check_differential_functor,
    determinism_check,
    entry_embedding,
    eval_functor,
    eval_morphism,
    hom_add,
    hom_projection,
    hom_scale,
    hom_zero,
    ind,
    ind_morphism,
    lineator_uniqueness_report,
    naturality_report,
    roundtrip_report,
    tensor_law_report,
)
from tangentcat.errors import NotAdditive, ProviderBoundTooSmall
from tangentcat.nbullet import NMatrix
from tangentcat.polycat import Domain, Polynomial, PolyMorphism

W = weil.dual_numbers()
UNIT = weil.unit_algebra()


# -- hom module ------------------------------------------------------------------


def test_hom_add_unit_law(ncat):
    b = diff_object_bundle(ncat, 1)
    pi0 = hom_projection(b, 1, 1)
    assert hom_add(pi0, hom_zero(b, 1)) == pi0


def test_hom_scale_matches_matrix(ncat):
    b = diff_object_bundle(ncat, 1)
    tripled = hom_scale(3, hom_projection(b, 2, 1))
    assert tripled.morphism == NMatrix([[3, 0]])


def test_hom_add_commutative_random(qcat):
    rng = random.Random(13)
    b = trivial_bundle(qcat, 1, 1)
    for _ in range(20):
        coeffs = [rng.randint(0, 3) for _ in range(4)]
        f = hom_add(
            hom_scale(coeffs[0], hom_projection(b, 2, 1)),
            hom_scale(coeffs[1], hom_projection(b, 2, 2)),
        )
        g = hom_add(
            hom_scale(coeffs[2], hom_projection(b, 2, 1)),
            hom_scale(coeffs[3], hom_projection(b, 2, 2)),
        )
        assert hom_add(f, g) == hom_add(g, f)


def test_hom_add_associative(ncat):
    b = diff_object_bundle(ncat, 2)
    f = hom_projection(b, 3, 1)
    g = hom_projection(b, 3, 2)
    h = hom_projection(b, 3, 3)
    assert hom_add(hom_add(f, g), h) == hom_add(f, hom_add(g, h))


# -- the induced functor ------------------------------------------------------------


def test_functor_on_objects(ncat):
    F = ind(diff_object_bundle(ncat, 1, bound=6))
    assert F.obj(0) == 0 and F.obj(3) == 3


def test_functor_identity_law(ncat, qcat):
    for cat, bundle in [
        (ncat, diff_object_bundle(ncat, 1)),
        (qcat, trivial_bundle(qcat, 1, 1)),
    ]:
        F = ind(bundle)
        for k in range(4):
            assert cat.equal(F.mor(NMatrix.identity(k)), cat.identity(F.obj(k)))


def test_functor_composition_random(qcat):
    rng = random.Random(19)
    F = ind(trivial_bundle(qcat, 1, 1, bound=4))
    for _ in range(25):
        r, k, c = (rng.randint(0, 4) for _ in range(3))
        a = NMatrix([[rng.randint(0, 3) for _ in range(k)] for _ in range(r)], r, k)
        b = NMatrix([[rng.randint(0, 3) for _ in range(c)] for _ in range(k)], k, c)
        assert qcat.equal(F.mor(a @ b), qcat.compose(F.mor(a), F.mor(b)))


def test_functor_mor_matches_matrix_for_diff_object(ncat):
    # over the rank-1 differential object, F is the identity embedding
    F = ind(diff_object_bundle(ncat, 1, bound=4))
    mat = NMatrix([[2, 1], [0, 3]])
    assert F.mor(mat) == mat


# -- the distributor table ------------------------------------------------------------


def test_alpha_generating_component_pinned(ncat):
    b = diff_object_bundle(ncat, 1, bound=4)
    pairing = ncat.pair(
        [ncat.tangent_morphism(p) for p in b.provider.projections(2)],
        [
            ncat.compose(ncat.structural("zero", 1), b.provider.projections(2)[0]),
            ncat.compose(b.lift, b.provider.projections(2)[1]),
        ],
    )
    assert pairing.entries == ((1, 0), (0, 0), (0, 0), (0, 1))
    F = ind(b)
    assert F.alpha(W, 1) == NMatrix.identity(2)


def test_alpha_unit_is_identity(ncat, z5cat):
    for cat, bundle in [
        (ncat, diff_object_bundle(ncat, 2, bound=6)),
        (z5cat, trivial_bundle(z5cat, 1, 1, bound=6)),
    ]:
        F = ind(bundle)
        for k in range(3):
            assert cat.equal(F.alpha(UNIT, k), cat.identity(F.obj(k)))


def test_alpha_tensor_law_all_fixtures(ncat, qcat, z5cat):
    fixtures = [
        diff_object_bundle(ncat, 1, bound=8),
        trivial_bundle(qcat, 1, 1, bound=8),
        trivial_bundle(z5cat, 2, 1, bound=8),
    ]
    for bundle in fixtures:
        report = tensor_law_report(ind(bundle))
        assert report.failed == 0, [r.name for r in report.failures()]


def test_lineator_uniqueness(ncat, z5cat):
    for bundle in [
        diff_object_bundle(ncat, 1, bound=8),
        trivial_bundle(z5cat, 1, 1, bound=8),
    ]:
        report = lineator_uniqueness_report(bundle)
        assert report.failed == 0, [r.name for r in report.failures()]


# -- functor verification ---------------------------------------------------------------


def test_ind_passes_functor_checks_lax(qcat):
    F = ind(trivial_bundle(qcat, 1, 1, bound=8))
    assert not F.strong
    report = check_differential_functor(F, sample=5)
    assert report.failed == 0, [r.name for r in report.failures()]


def test_ind_of_diff_object_is_strong(ncat):
    F = ind(diff_object_bundle(ncat, 1, bound=8))
    assert F.strong
    report = check_differential_functor(F, sample=5)
    assert report.failed == 0, [r.name for r in report.failures()]


def test_entry_embedding_is_strong_differential(qcat):
    F = entry_embedding(qcat)
    assert F.strong
    report = check_differential_functor(F, sample=5)
    assert report.failed == 0, [r.name for r in report.failures()]


# -- evaluation and the round trip ----------------------------------------------------


def test_eval_of_identity_functor_is_diff_object(ncat):
    F = entry_embedding(ncat)  # the identity functor on the matrix category
    b = eval_functor(F, 1)
    expected = diff_object_bundle(ncat, 1)
    assert b.total == expected.total and b.base == expected.base
    for attr in ("projection", "zero", "add", "lift"):
        assert getattr(b, attr) == getattr(expected, attr)


def test_eval_of_entry_embedding_into_poly(qcat):
    b = eval_functor(entry_embedding(qcat), 1)
    expected = diff_object_bundle(qcat, 1)
    for attr in ("projection", "zero", "add", "lift"):
        assert qcat.equal(getattr(b, attr), getattr(expected, attr))


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_roundtrip_diff_objects_nbullet(ncat, k):
    report = roundtrip_report(diff_object_bundle(ncat, k, bound=4))
    assert report.failed == 0, [r.name for r in report.failures()]


@pytest.mark.parametrize("m,v", [(0, 0), (1, 1), (2, 2), (2, 1), (0, 2)])
def test_roundtrip_trivial_bundles(qcat, z5cat, m, v):
    for cat in (qcat, z5cat):
        report = roundtrip_report(trivial_bundle(cat, m, v, bound=4))
        assert report.failed == 0, (cat.name, [r.name for r in report.failures()])


def test_eval_provider_bound(ncat):
    F = ind(diff_object_bundle(ncat, 1, bound=3))
    bundle = eval_functor(F, 1, bound=3)
    with pytest.raises(ProviderBoundTooSmall):
        bundle.provider.power(4)


def test_eval_verify_first_accepts_and_rejects(ncat):
    from tangentcat.errors import NotADifferentialFunctor

    good = ind(diff_object_bundle(ncat, 1, bound=8))
    eval_functor(good, 1, verify_first=True)
    broken = ind(
        diff_object_bundle(ncat, 1, bound=8),
        vertical_override=ncat.from_matrix(2, 2, [[1, 0], [1, 1]]),
    )
    with pytest.raises(NotADifferentialFunctor):
        eval_functor(broken, 1, verify_first=True)


# -- transformations ---------------------------------------------------------------------


def test_ind_morphism_identity(ncat):
    b = diff_object_bundle(ncat, 1)
    phi = ind_morphism(b, b, ncat.identity(1), ncat.identity(0))
    assert phi.linear
    for k in range(4):
        assert phi.component(k) == NMatrix.identity(k)


def test_ind_morphism_doubling(ncat):
    b = diff_object_bundle(ncat, 1)
    phi = ind_morphism(b, b, NMatrix([[2]]), ncat.identity(0))
    for k in range(1, 4):
        doubled = NMatrix([[2 if i == j else 0 for j in range(k)] for i in range(k)])
        assert phi.component(k) == doubled
    assert phi.linear


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ind_morphism_frobenius(p):
    cat = PolyCategory(Domain.zp(p))
    b = diff_object_bundle(cat, 1)
    frob = PolyMorphism(cat.domain, 1, [Polynomial(cat.domain, 1, {(p,): 1})])
    phi = ind_morphism(b, b, frob, cat.identity(0))
    assert not phi.linear
    assert phi.component(1) == frob
    report = naturality_report(
        phi,
        [NMatrix([[1, 1]]), NMatrix([[1], [1]]), NMatrix([[2, 0], [1, 3]]), NMatrix.zeros(0, 1)],
    )
    assert report.failed == 0, [r.name for r in report.failures()]


def test_ind_morphism_requires_additive(qcat):
    b = diff_object_bundle(qcat, 1)
    square_plus_x = polycat.parse_morphism(["x0^2 + x0"], 1, qcat.domain)
    with pytest.raises(NotAdditive):
        ind_morphism(b, b, square_plus_x, qcat.identity(0))


def test_ind_functorial_on_composites(ncat):
    b = diff_object_bundle(ncat, 1)
    f1 = NMatrix([[2]])
    f2 = NMatrix([[3]])
    phi1 = ind_morphism(b, b, f1, ncat.identity(0), k_max=3)
    phi2 = ind_morphism(b, b, f2, ncat.identity(0), k_max=3)
    composite = ind_morphism(b, b, f1 @ f2, ncat.identity(0), k_max=3)
    chained = phi1.compose(phi2)
    for k in range(4):
        assert composite.component(k) == chained.component(k)


def test_naturality_on_generators_and_samples(ncat):
    b = diff_object_bundle(ncat, 2)
    phi = ind_morphism(b, b, NMatrix([[1, 0], [1, 1]]), ncat.identity(0))
    rng = random.Random(3)
    mats = [nbullet.sigma_k(2), nbullet.delta_k(3), nbullet.proj(1, 2), NMatrix.zeros(0, 1)]
    for _ in range(10):
        r, c = rng.randint(0, 4), rng.randint(0, 4)
        mats.append(NMatrix([[rng.randint(0, 3) for _ in range(c)] for _ in range(r)], r, c))
    report = naturality_report(phi, mats)
    assert report.failed == 0


def test_determinism_check_same_input_twice(ncat):
    b = diff_object_bundle(ncat, 1)
    phi = ind_morphism(b, b, NMatrix([[2]]), ncat.identity(0))
    psi = ind_morphism(b, b, NMatrix([[2]]), ncat.identity(0))
    report = determinism_check(phi, psi, 4)
    assert report.failed == 0


def test_determinism_check_detects_perturbation(ncat):
    b = diff_object_bundle(ncat, 1)
    phi = ind_morphism(b, b, NMatrix([[2]]), ncat.identity(0))
    comps = {k: phi.component(k) for k in phi.known_ranks()}
    comps[2] = comps[2].with_entry(0, 1, 1)
    psi = DiffNatTransformation(phi.source_functor, phi.target_functor, comps, phi.linear)
    report = determinism_check(phi, psi, 4)
    assert any("rank-2" in r.name for r in report.failures())


def test_eval_morphism_classification(ncat):
    cat = PolyCategory(Domain.zp(3))
    b = diff_object_bundle(cat, 1)
    frob = PolyMorphism(cat.domain, 1, [Polynomial(cat.domain, 1, {(3,): 1})])
    phi = ind_morphism(b, b, frob, cat.identity(0))
    assert eval_morphism(phi, NMatrix.identity(1)).classification == "additive"
    psi = ind_morphism(b, b, cat.from_matrix(1, 1, [[2]]), cat.identity(0))
    assert eval_morphism(psi, NMatrix.identity(1)).classification == "linear"


# -- appendix suite -----------------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["nbullet-diffobj", "z5-trivial", "q-trivial"])
def test_appendix_suite_passes(ncat, qcat, z5cat, fixture):
    bundle = {
        "nbullet-diffobj": lambda: diff_object_bundle(ncat, 1, bound=8),
        "z5-trivial": lambda: trivial_bundle(z5cat, 2, 1, bound=8),
        "q-trivial": lambda: trivial_bundle(qcat, 1, 2, bound=8),
    }[fixture]()
    report = appendix_suite(ind(bundle), sample=5)
    assert report.failed == 0, [r.name for r in report.failures()]


def test_appendix_detects_mutated_lift(ncat):
    bundle = diff_object_bundle(ncat, 1, bound=8)
    broken = ncat.from_matrix(2, 2, [[1, 0], [1, 1]])
    report = appendix_suite(ind(bundle, vertical_override=broken), sample=3)
    failing = {r.name for r in report.failures()}
    assert any("algebra-direction:ell" in n for n in failing)


def test_appendix_matrix_direction_counts(ncat):
    report = appendix_suite(ind(diff_object_bundle(ncat, 1, bound=8)), sample=2)
    names = [r.name for r in report.results]
    assert any("matrix-direction:W:" in n for n in names)
    assert any("matrix-direction:W^2:" in n for n in names)
    assert any("tensor-expansion" in n for n in names)
    assert any("subsquares" in n for n in names)
