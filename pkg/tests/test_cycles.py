from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hypreg import cycles as cy
from hypreg.curve import HyperellipticModel
from hypreg.modular import div_delta_N

F = cy.FactoredFunction
P = cy.Place

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def test_divisor_on_line():
    f = F(3, ((0, 1), (1, -2)))
    D = cy.divisor_of(None, f)
    assert D[P(0)] == 1 and D[P(1)] == -2 and D[P(None)] == 1
    assert D.degree() == 0


def test_divisor_of_y(model2):
    D = cy.divisor_of(model2, F(1, (), 1, model2))
    for W in cy.weierstrass_places(model2)[:-1]:
        assert D[W] == 1
    assert D[P(None)] == -5


def test_divisor_of_x_minus_branch_point(model2):
    D = cy.divisor_of(model2, F(1, ((2, 1),), 0, model2))
    assert D[P(2)] == 2 and D[P(None)] == -2


def test_divisor_of_x_minus_regular_point(model2):
    D = cy.divisor_of(model2, F(1, ((Fraction(1, 2), 1),), 0, model2))
    assert D[P(Fraction(1, 2), 1)] == 1 and D[P(Fraction(1, 2), -1)] == 1
    assert D.degree() == 0


def test_canonical_divisor(model2):
    K = cy.canonical_divisor(model2)
    assert K == cy.Divisor({P(None): 2})


def test_canonical_divisor_even_model():
    m = HyperellipticModel([1, 0, 0, 0, 0, 0, 1])   # x^6 + 1, genus 2
    K = cy.canonical_divisor(m)
    assert K.degree() == 2 and all(p.at_infinity for p in K.support())


@given(st.lists(st.tuples(small, st.integers(-3, 3)), max_size=4),
       st.lists(st.tuples(small, st.integers(-3, 3)), max_size=4))
def test_divisor_homomorphism(a, b):
    f, g = F(2, tuple(a)), F(-1, tuple(b))
    assert cy.divisor_of(None, f * g) == cy.divisor_of(None, f) + cy.divisor_of(None, g)
    assert cy.divisor_of(None, f.inverse()) == -cy.divisor_of(None, f)


def test_steinberg_symbol_trivial_at_zero():
    x = F(1, ((0, 1),))
    one_minus_x = F(-1, ((1, 1),))
    assert cy.tame_symbol(x, one_minus_x, P(0)) == 1


@given(st.lists(st.tuples(small, st.integers(-2, 2)), min_size=1, max_size=3),
       st.lists(st.tuples(small, st.integers(-2, 2)), min_size=1, max_size=3),
       st.lists(st.tuples(small, st.integers(-2, 2)), min_size=1, max_size=3))
def test_tame_symbol_bilinear(a, b, c):
    f, g, h = F(2, tuple(a)), F(3, tuple(b)), F(Fraction(1, 5), tuple(c))
    pts = set(cy.divisor_of(None, f).support()) | set(cy.divisor_of(None, g).support()) \
        | set(cy.divisor_of(None, h).support())
    for p in pts:
        lhs = cy.tame_symbol(f * g, h, p)
        rhs = cy.tame_symbol(f, h, p) * cy.tame_symbol(g, h, p)
        assert lhs == rhs


@given(st.lists(st.tuples(small, st.integers(-2, 2)), max_size=3),
       st.lists(st.tuples(small, st.integers(-2, 2)), max_size=3),
       st.integers(1, 5), st.integers(-5, -1))
def test_weil_reciprocity_line(a, b, c1, c2):
    T = cy.tame_symbol_map(F(c1, tuple(a)), F(c2, tuple(b)))
    prod = 1
    for v in T.values():
        prod *= v
    assert prod == 1


@pytest.mark.parametrize("fa,ga", [
    (((Fraction(1, 2), 1),), ((Fraction(5, 2), 1), (7, -1))),
    (((0, 1), (1, -1)), ((Fraction(-3, 2), 2),)),
])
def test_weil_reciprocity_curve(model2, fa, ga):
    f = F(1, fa, 1, model2)                 # includes a power of y
    g = F(2, ga, 0, model2)
    prod = 1
    for v in cy.tame_symbol_map(f, g).values():
        prod *= v
    assert complex(prod) == pytest.approx(1)


def test_Z_QR_is_a_cycle(model2):
    Z = cy.build_Z_QR(model2, P(0), P(1), P(Fraction(1, 2), 1))
    ok, w = cy.cocycle_check(Z)
    assert ok and w.is_zero()
    for k in range(len(Z.components)):
        ok, w = cy.cocycle_check(Z.without(k))
        assert not ok and not w.is_zero()


def test_Z_QR_with_infinity(model2):
    Z = cy.build_Z_QR(model2, P(2), P(None), P(Fraction(1, 2), 1))
    assert cy.cocycle_check(Z)[0]


def test_Z_QR_normalised(model2):
    Z = cy.build_Z_QR(model2, P(3), P(4), P(Fraction(1, 2), 1))
    f = Z.components[1].function
    assert f.value(P(Fraction(1, 2), 1)) == 1


def test_Z_QR_rejects_equal_points(model2):
    with pytest.raises(cy.DegenerateError):
        cy.build_Z_QR(model2, P(0), P(0), P(Fraction(1, 2), 1))


def test_delta6_decomposition():
    D = cy.Divisor.from_cusps(div_delta_N(6))
    dec = cy.decompose_simple(D)
    assert len(dec.pairs) == 2 and dec.conserved() and dec.k == 1
    Z = cy.build_Z_f(cy.AbstractFunction("Delta_6", D), dec)
    assert cy.cocycle_check(Z)[0]


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 4))
def test_decomposition_conserves(m1, m2, N):
    a, b, c = P(0), P(1), P(2)
    D = cy.Divisor({a: m1 + m2, b: -m1, c: -m2})
    dec = cy.decompose_simple(D, orders=N)
    assert dec.conserved()
    Z = cy.build_Z_f(cy.AbstractFunction("f", D), dec)
    assert cy.cocycle_check(Z)[0]


def test_decomposition_rejects_nonzero_degree():
    with pytest.raises(cy.DecompositionError):
        cy.decompose_simple(cy.Divisor({P(0): 1}))


def test_weierstrass_Z_f(model2):
    f = F(1, ((0, 1), (1, -1)), 0, model2)
    D = cy.divisor_of(model2, f)
    dec = cy.decompose_simple(D, orders=2)
    Z = cy.build_Z_f(f, dec, cy.weierstrass_simple(model2))
    assert cy.cocycle_check(Z)[0]
