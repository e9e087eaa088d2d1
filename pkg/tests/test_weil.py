import itertools
import random

import pytest

from tangentcat import weil
from tangentcat.errors import CompositionMismatch, ProductUndefined, RelationNotEquivalence
from tangentcat.nbullet import NMatrix, kron
from tangentcat.verify import check_foundational_pullbacks

W = weil.dual_numbers()
UNIT = weil.unit_algebra()


def brute_force_basis(n, pairs):
    """Oracle: subsets of {1..n} with no two distinct members related."""
    related = {frozenset(p) for p in pairs}
    out = []
    for size in range(n + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            if all(
                frozenset((a, b)) not in related
                for a, b in itertools.combinations(subset, 2)
            ):
                out.append(subset)
    return out


def test_dual_numbers_basis():
    assert W.basis == ((), (1,))
    assert W.dimension == 2


def test_unit_presentation():
    assert UNIT.basis == ((),)
    assert UNIT.dimension == 1


def test_two_free_generators_basis():
    ww = weil.make_algebra(2, [(1, 1), (2, 2)])
    assert set(ww.basis) == {(), (1,), (2,), (1, 2)}
    assert ww == weil.tensor(W, W)


def test_relation_must_contain_diagonal():
    with pytest.raises(RelationNotEquivalence):
        weil.make_algebra(2, [(1, 2), (1, 1)])


def test_relation_must_be_transitive():
    with pytest.raises(RelationNotEquivalence):
        weil.make_algebra(3, [(1, 1), (2, 2), (3, 3), (1, 2), (2, 3)])


def test_relation_out_of_range():
    with pytest.raises(RelationNotEquivalence):
        weil.make_algebra(1, [(1, 2)])


@pytest.mark.parametrize("n,pairs", [
    (1, [(1, 1)]),
    (2, [(1, 1), (2, 2)]),
    (2, [(1, 1), (2, 2), (1, 2)]),
    (3, [(1, 1), (2, 2), (3, 3), (1, 2)]),
    (4, [(1, 1), (2, 2), (3, 3), (4, 4), (1, 3), (2, 4)]),
])
def test_basis_matches_enumeration_oracle(n, pairs):
    alg = weil.make_algebra(n, pairs)
    assert sorted(alg.basis) == sorted(brute_force_basis(n, pairs))


def test_basis_closed_under_subsets():
    alg = weil.make_algebra(4, [(i, i) for i in range(1, 5)] + [(1, 2)])
    monomials = set(alg.basis)
    for mono in monomials:
        for size in range(len(mono)):
            for sub in itertools.combinations(mono, size):
                assert tuple(sub) in monomials


def test_tensor_unit_law():
    assert weil.tensor(W, UNIT) == W
    assert weil.tensor(UNIT, W) == W


def test_product_of_powers():
    ww = weil.product(W, W)
    assert ww.basis == ((), (1,), (2,))
    assert ww == weil.w_power(2)


def test_product_undefined_for_tensors():
    with pytest.raises(ProductUndefined):
        weil.product(weil.tensor(W, W), W)


def test_tensor_dimension():
    assert weil.tensor(W, W).dimension == 4
    a = weil.w_power(2)
    b = weil.tensor(W, weil.w_power(3))
    assert weil.tensor(a, b).dimension == a.dimension * b.dimension


def test_decompose_examples():
    assert weil.decompose(weil.tensor(W, W)) == [1, 1]
    assert weil.decompose(weil.w_power(2)) == [2]
    assert weil.decompose(UNIT) == []


def test_decompose_recompose_exhaustive_up_to_six_generators():
    for alg in weil.enumerate_algebras(6):
        iso = weil.decompose_iso(alg)
        assert iso.source == weil.recompose(weil.decompose(alg))
        assert iso.target == alg
        mat = NMatrix(iso.basis_matrix())
        # generator permutation: the basis matrix is a permutation matrix
        assert all(sum(row) == 1 for row in mat.entries)
        assert all(sum(col) == 1 for col in zip(*mat.entries))


def test_structural_p():
    p = weil.structural_map("p")
    e = W.element({(1,): 5, (): 3})  # 5x + 3
    assert weil.apply(p, e) == UNIT.element({(): 3})


def test_structural_ell_on_element():
    ell = weil.structural_map("ell")
    e = W.element({(1,): 2, (): 3})  # 2x + 3
    assert weil.apply(ell, e) == ell.target.element({(1, 2): 2, (): 3})


def test_structural_c_swaps_generators():
    c = weil.structural_map("c")
    ww = c.source
    assert c.generator_images == (ww.generator(2), ww.generator(1))
    assert weil.apply(c, ww.element({(1, 2): 1})) == ww.element({(1, 2): 1})


def test_structural_plus():
    plus = weil.structural_map("plus")
    w2 = plus.source
    e = w2.element({(1,): 2, (2,): 3, (): 1})  # 2x1 + 3x2 + 1
    assert weil.apply(plus, e) == W.element({(1,): 5, (): 1})


def test_p_after_zero_is_identity():
    p = weil.structural_map("p")
    zero = weil.structural_map("zero")
    assert weil.compose(p, zero) == weil.identity(UNIT)


def test_compose_with_identity_random():
    rng = random.Random(3)
    algebras = weil.enumerate_algebras(3)
    from tangentcat.categories import WeilSelfCategory

    cat = WeilSelfCategory()
    for _ in range(25):
        f = cat.sample_hom(rng)
        assert weil.compose(f, weil.identity(f.source)) == f
        assert weil.compose(weil.identity(f.target), f) == f
    assert algebras


def test_composition_mismatch():
    p = weil.structural_map("p")
    with pytest.raises(CompositionMismatch):
        weil.compose(p, p)


def test_flip_involution_and_lift():
    c = weil.structural_map("c")
    ell = weil.structural_map("ell")
    assert weil.compose(c, c) == weil.identity(c.source)
    assert weil.compose(c, ell) == ell


def test_weil_tangent_objects():
    assert weil.weil_tangent(UNIT) == W
    assert weil.weil_tangent(W) == weil.tensor(W, W)


def test_weil_tangent_doubles_dimension():
    rng = random.Random(11)
    for _ in range(10):
        alg = rng.choice(weil.enumerate_algebras(4))
        doubled = weil.weil_tangent(alg)
        oracle = len(
            brute_force_basis(
                doubled.generator_count, [tuple(sorted(p)) for p in doubled.related_pairs]
            )
        )
        assert doubled.dimension == oracle == 2 * alg.dimension


def test_morphism_validation_rejects_relation_violations():
    ww = weil.tensor(W, W)
    w2 = weil.w_power(2)
    # x1, x2 multiply to x1x2 != 0 in W (x) W, but are related in W^2
    with pytest.raises(ValueError):
        weil.WeilMorphism(w2, ww, [ww.generator(1), ww.generator(2)])


def test_morphism_validation_rejects_constant_images():
    with pytest.raises(ValueError):
        weil.WeilMorphism(W, W, [W.element({(): 1})])


def test_random_violations_rejected():
    rng = random.Random(5)
    ww = weil.tensor(W, W)
    w2 = weil.w_power(2)
    rejected = 0
    for _ in range(50):
        monos = [m for m in ww.basis if m]
        img1 = ww.element({rng.choice(monos): rng.randint(1, 2)})
        img2 = ww.element({rng.choice(monos): rng.randint(1, 2)})
        product = img1 * img2
        try:
            weil.WeilMorphism(w2, ww, [img1, img2])
            assert product.is_zero()
        except ValueError:
            rejected += 1
            assert not product.is_zero()
    assert rejected > 0


def test_tensor_morphism_basis_matrix_is_kronecker():
    ell = weil.structural_map("ell")
    p = weil.structural_map("p")
    combined = weil.tensor_morphism(ell, p)
    assert NMatrix(combined.basis_matrix()) == kron(
        NMatrix(ell.basis_matrix()), NMatrix(p.basis_matrix())
    )


def test_foundational_square_in_weil(wcat):
    report = check_foundational_pullbacks(wcat, W, W, W, objects=[UNIT, W])
    assert report.failed == 0, [r.name for r in report.failures()]


def test_apply_is_linear_and_multiplicative():
    ell = weil.structural_map("ell")
    a = W.element({(1,): 1})
    b = W.element({(): 2})
    assert weil.apply(ell, a + b) == weil.apply(ell, a) + weil.apply(ell, b)
    assert weil.apply(ell, W.one_element()) == ell.target.one_element()
