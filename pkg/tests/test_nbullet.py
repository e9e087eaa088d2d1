import random
from fractions import Fraction

import pytest

from tangentcat import nbullet, weil
from tangentcat.nbullet import NMatrix, GeneratorTerm
from tangentcat.verify import vertical_lift_map


def frac_matmul(a, b, inner, cols):
    """Oracle composition with Fraction arithmetic, independent of NMatrix."""
    return [
        [sum((Fraction(a[i][k]) * Fraction(b[k][j]) for k in range(inner)), Fraction(0))
         for j in range(cols)]
        for i in range(len(a))
    ]


def test_structural_c_swaps_middle_blocks():
    c = nbullet.structural("c", 1)
    assert c.entries == ((1, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0), (0, 0, 0, 1))


def test_structural_ell_pinned():
    ell = nbullet.structural("ell", 1)
    assert ell.entries == ((1, 0), (0, 0), (0, 0), (0, 1))


def test_structural_p_zero_plus():
    assert nbullet.structural("p", 2).entries == (
        (1, 0, 0, 0), (0, 1, 0, 0))
    assert nbullet.structural("zero", 1).entries == ((1,), (0,))
    assert nbullet.structural("plus", 1).entries == ((1, 0, 0), (0, 1, 1))


def test_d_preserves_identity():
    assert nbullet.d_morphism(NMatrix.identity(3)) == NMatrix.identity(6)


def test_d_object():
    assert nbullet.d_object(3) == 6


def test_weil_action_ranks():
    w = weil.dual_numbers()
    assert nbullet.weil_action(w, 5) == 10
    assert nbullet.weil_action(weil.unit_algebra(), 7) == 7


def test_unit_acts_trivially():
    f = NMatrix([[1, 2], [0, 3]])
    assert nbullet.weil_action_on_f(weil.unit_algebra(), f) == f


def test_theta_action_p_pinned():
    p = weil.structural_map("p")
    assert nbullet.weil_action_on_theta(p, 1).entries == ((1, 0),)


def test_theta_action_functorial():
    rng = random.Random(2)
    from tangentcat.categories import WeilSelfCategory

    wc = WeilSelfCategory()
    for _ in range(20):
        f = wc.sample_hom(rng)
        g = wc._sample_morphism(rng, f.target, rng.choice(weil.enumerate_algebras(2)))
        k = rng.randint(0, 3)
        lhs = nbullet.weil_action_on_theta(weil.compose(g, f), k)
        rhs = nbullet.weil_action_on_theta(g, k) @ nbullet.weil_action_on_theta(f, k)
        assert lhs == rhs


def test_theta_action_natural_against_matrices():
    rng = random.Random(4)
    from tangentcat.categories import WeilSelfCategory

    wc = WeilSelfCategory()
    for _ in range(20):
        theta = wc.sample_hom(rng)
        rows, cols = rng.randint(0, 3), rng.randint(0, 3)
        f = NMatrix([[rng.randint(0, 3) for _ in range(cols)] for _ in range(rows)], rows, cols)
        lhs = nbullet.weil_action_on_f(theta.target, f) @ nbullet.weil_action_on_theta(theta, cols)
        rhs = nbullet.weil_action_on_theta(theta, rows) @ nbullet.weil_action_on_f(theta.source, f)
        assert lhs == rhs


def test_diff_object_shapes():
    zeta, sigma, lam = nbullet.diff_object(1)
    assert lam.entries == ((0,), (1,))
    zeta0, sigma0, lam0 = nbullet.diff_object(0)
    assert (zeta0.rows, zeta0.cols) == (0, 0)
    assert (sigma0.rows, sigma0.cols) == (0, 0)
    assert (lam0.rows, lam0.cols) == (0, 0)


def test_diff_object_addition_probe():
    _, sigma, _ = nbullet.diff_object(2)
    probe = NMatrix([[3], [5], [0], [0]])
    assert (sigma @ probe).entries == ((3,), (5,))


def test_vertical_lift_matrix_pinned(ncat):
    nu, _, _ = vertical_lift_map(ncat, 1)
    assert nu.entries == ((1, 0, 0), (0, 0, 1), (0, 0, 0), (0, 1, 0))


def test_composition_matches_fraction_oracle():
    rng = random.Random(9)
    for _ in range(25):
        n, k, m = (rng.randint(0, 4) for _ in range(3))
        a = NMatrix([[rng.randint(0, 5) for _ in range(k)] for _ in range(n)], n, k)
        b = NMatrix([[rng.randint(0, 5) for _ in range(m)] for _ in range(k)], k, m)
        oracle = frac_matmul(
            [list(r) for r in a.entries], [list(r) for r in b.entries], k, m
        )
        assert [list(r) for r in (a @ b).entries] == [[int(x) for x in row] for row in oracle]


def test_decompose_scalar_matrix():
    terms = nbullet.decompose_matrix(NMatrix([[3]]))
    assert len(terms) == 1
    assert terms[0].evaluate() == NMatrix([[3]])


def test_decompose_zero_matrix():
    terms = nbullet.decompose_matrix(NMatrix([[0]]))
    assert terms[0].evaluate() == NMatrix([[0]])


def test_decompose_row_matrix():
    f = NMatrix([[2, 1]])
    terms = nbullet.decompose_matrix(f)
    assert nbullet.evaluate_decomposition(terms, 2) == f


def test_decompose_uses_generator_constructors():
    terms = nbullet.decompose_matrix(NMatrix([[3]]))
    text = repr(terms[0])
    assert "Sigma(3)" in text and "Delta(3)" in text


@pytest.mark.parametrize("seed", [0, 1])
def test_decompose_roundtrip_random(seed):
    rng = random.Random(seed)
    for _ in range(100):
        rows, cols = rng.randint(0, 4), rng.randint(0, 4)
        f = NMatrix(
            [[rng.randint(0, 5) for _ in range(cols)] for _ in range(rows)], rows, cols
        )
        terms = nbullet.decompose_matrix(f)
        assert nbullet.evaluate_decomposition(terms, cols) == f


def test_generator_term_arity_checks():
    with pytest.raises(AssertionError):
        GeneratorTerm.composite([GeneratorTerm.sigma(2), GeneratorTerm.delta(3)])


def test_sigma_delta_edge_cases():
    assert nbullet.sigma_k(0) == NMatrix.zeros(1, 0)
    assert nbullet.delta_k(0) == NMatrix.zeros(0, 1)
    assert nbullet.sigma_k(3) == NMatrix([[1, 1, 1]])
    assert nbullet.delta_k(2) == NMatrix([[1], [1]])
