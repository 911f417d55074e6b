from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hypreg import modular as md

SQUAREFREE = [N for N in range(1, 211) if md.is_squarefree(N)]


def test_delta_first_coefficients():
    D = md.delta_series(10)
    assert D.leading() == (1, 1) or D[1] == 1
    assert D[1] == 1 and D[2] == -24 and D[3] == 252


def test_tau_multiplicative():
    D = md.delta_series(20)
    assert D[6] == D[2] * D[3]
    assert D[10] == D[2] * D[5]


def test_delta_N_leading_exponents():
    assert md.leading_exponent(1) == 1
    assert md.leading_exponent(7) == 6
    assert md.leading_exponent(6) == 6 - 3 - 2 + 1
    S = md.delta_N_series(6, 30)
    assert S[2] != 0 and all(S[k] == 0 for k in range(2))


def test_delta_N_rejects_non_squarefree():
    with pytest.raises(md.PreconditionError):
        md.delta_N_series(12, 10)


@given(st.sampled_from(SQUAREFREE[:40]))
def test_delta_N_inverse(N):
    S = md.delta_N_series(N, md.leading_exponent(N) + 30)
    assert S * S.inverse() == md.QSeries.one(S.rel_prec)


def test_div_delta_6():
    assert md.div_delta_N(6).as_dict() == {1: 2, 2: -2, 3: -2, 6: 2}


@pytest.mark.parametrize("N", SQUAREFREE)
def test_divisor_degree_zero_and_eta_oracle(N):
    D = md.div_delta_N(N)
    if N > 1:
        assert D.degree() == 0
        assert D == md.div_delta_N_ligozat(N)
        # q-order at infinity = P_N coefficient (width convention)
        assert D.as_dict().get(N, 0) == md.leading_exponent(N)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_prime_level(p):
    assert md.div_delta_N(p).as_dict() == {1: -(p - 1), p: p - 1}
    L = md.lambda_decomposition(p, p)
    # Lambda_1 = (p - 1) mu(p) carries the Moebius sign
    assert L.kappa == 1 and L.lambdas == ((1, -(p - 1)),) and L.holds


def test_lambda_N6():
    L = md.lambda_decomposition(6, 2)
    assert L.kappa == 4 and dict(L.lambdas) == {1: 8, 3: -8} and L.holds


def test_lambda_bad_p0():
    with pytest.raises(md.PreconditionError):
        md.lambda_decomposition(6, 5)


def test_lambda_all_squarefree_levels():
    for N in SQUAREFREE[1:]:
        for p in md.prime_factors(N):
            assert md.lambda_decomposition(N, p).holds, (N, p)


def test_eisenstein_examples():
    assert md.eisenstein_EN(1, 5)[1] == -24
    assert md.eisenstein_EN(6, 5)[0] == 2


@given(st.sampled_from(SQUAREFREE[:30]))
def test_eisenstein_dual_route(N):
    assert md.eisenstein_EN(N, 60) == md.eisenstein_EN_combination(N, 60)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=8),
       st.lists(st.integers(-5, 5), min_size=1, max_size=8))
def test_series_product_commutes_and_distributes(a, b):
    A = md.QSeries(a, 0, 8)
    B = md.QSeries(b, 0, 8)
    assert A * B == B * A
    assert A * (B + A) == A * B + A * A
