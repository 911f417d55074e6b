import numpy as np
import pytest
from scipy.special import ellipk

from hypreg import curve as cv


def test_riemann_relations(pd2):
    r = cv.riemann_relations(pd2)
    assert r["symmetry_defect"] < 1e-9
    assert r["min_eig_im_tau"] > 0


def test_standard_tau_is_imaginary(pd2):
    # real branch points give a purely imaginary period matrix
    assert np.max(np.abs(pd2.tau.real)) < 1e-9
    assert pd2.tau[0, 0].imag == pytest.approx(1.2535, abs=1e-3)


def test_lemniscatic_periods(model1):
    pd = cv.period_data(model1)
    K = 2 * np.sqrt(2) * ellipk(0.5)     # independent AGM value
    loops = pd.homology.loop_integrals(model1.holomorphic_basis())
    assert np.allclose(np.abs(loops[:, 0]), K, rtol=1e-11)
    assert abs(pd.tau[0, 0] - 1j) < 1e-11


def test_period_matrix_normalised(model2, pd2):
    Pi = pd2.Pi
    assert np.allclose(Pi[:2], np.eye(2), atol=1e-11)
    assert np.allclose(Pi[2:], pd2.tau, atol=1e-11)


def test_symplectic_basis(model2):
    H = cv.homology_symplectic(model2)
    g = 2
    J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
    assert np.array_equal(H.alpha_intersections(), J)


def test_close_branch_points_rejected():
    import sympy as sp
    m = cv.HyperellipticModel.from_roots([0, 1, 1 + sp.Rational(1, 10 ** 10)])
    with pytest.raises(cv.ModelError):
        cv.homology_symplectic(m)


def test_repeated_root_rejected():
    with pytest.raises(cv.ModelError):
        cv.HyperellipticModel([0, 1, -2, 1])     # x (x-1)^2


def test_low_degree_rejected():
    with pytest.raises(cv.ModelError):
        cv.HyperellipticModel([1, 0, 1])


def test_harmonic_duals(pd2):
    _, res = cv.harmonic_dual_basis(pd2)
    assert res < 1e-9


@pytest.mark.parametrize("a,b", [(0.3, 0.7), (-1.1 + 0.4j, 0.2), (0.5j, -0.9 + 0.1j)])
def test_abel_principal(pd2, model2, a, b):
    D = cv.principal_line_divisor(model2, a, b)
    assert sum(n for _, n in D) == 0
    v = cv.abel_jacobi(pd2, D, reduce=False)
    assert cv.lattice_membership(pd2, v, 1e-8)


def test_abel_detects_perturbation(pd2, model2):
    D = cv.principal_line_divisor(model2, 0.3, 0.7)
    P, n = D[0]
    x = P.x + 1e-3
    D[0] = (model2.point(x, 1 if np.real(P.y / np.sqrt(model2.h(x))) > 0 else -1), n)
    v = cv.abel_jacobi(pd2, D, reduce=False)
    assert not cv.lattice_membership(pd2, v, 1e-8)


def test_weierstrass_differences_are_two_torsion(pd2, model2):
    W = model2.weierstrass_points()
    for Q in W[1:]:
        r = cv.k_class_torsion_check(pd2, W[0], Q)
        assert r["difference_order"] == 2
        assert r["is_torsion"] and r["order"] == 1


def test_generic_difference_not_small_torsion(pd2, model2):
    r = cv.k_class_torsion_check(pd2, model2.point(0.5 + 0.3j), model2.point(-0.7 + 0.2j), bound=12)
    assert not r["is_torsion"]


def test_involution(model2):
    P = model2.point(0.5 + 0.2j)
    Q = P.involution()
    assert Q.x == P.x and Q.y == -P.y
    assert abs(P.y ** 2 - model2.h(P.x)) < 1e-12


def test_model_roundtrip(model2):
    m = cv.HyperellipticModel.from_dict(model2.to_dict())
    assert np.allclose(m.hc, model2.hc) and m.genus == 2
