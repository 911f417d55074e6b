import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypreg import paths as pt
from hypreg.curve import stadium
from hypreg.verify import basic_properties, random_harmonic, random_polyline


def circle(c, r):
    return [pt.Arc(c, r, 0.0, 2 * np.pi)]


def test_loop_around_one_branch_point_flips_sheet(model2):
    p = pt.lift_path(model2, circle(1.0, 0.3))
    assert abs(p.end[1] + p.start[1]) < 1e-9 * abs(p.start[1])


def test_loop_around_two_branch_points_keeps_sheet(model2):
    p = pt.lift_path(model2, stadium(1.0, 2.0, 0.3))
    assert p.is_closed()


def test_dlog_residue(model2):
    f = pt.RationalX(1.0, ((0.5, 1),))
    p = pt.lift_path(model2, circle(0.5, 0.2))
    v = pt.integrate_1form(p, pt.DLogForm(f))
    assert abs(v - 2j * np.pi) < 1e-12
    w = pt.integrate_1form(p, pt.RationalForm(pt.RationalX(1.0, ((0.5, -1),))))
    assert abs(w - 2j * np.pi) < 1e-12


def test_constant_path_is_zero(model2, pd2):
    p = pt.lift_path(model2, [pt.Line(0.5 + 0.5j, 0.5 + 0.5j + 1e-300)])
    assert abs(pt.iterated_integral(p, [pd2.dz(0), pd2.dz(1)])) < 1e-12


def test_path_times_inverse_cancels(model2, pd2):
    rng = np.random.default_rng(3)
    a = pt.lift_path(model2, random_polyline(model2, rng, 3))
    w = [pd2.dz(0), pd2.dzbar(1)]
    assert abs(pt.iterated_integral(a * a.reversed(), w)) < 1e-10


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6))
def test_basic_properties(model2, seed):
    d = basic_properties(model2, n=2, seed=seed)
    assert max(d.values()) < 1e-9


def test_basic_properties_genus_one(model1):
    d = basic_properties(model1, n=10, seed=11)
    assert max(d.values()) < 1e-9


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_reversal(model2, seed):
    m = model2
    rng = np.random.default_rng(seed)
    a = pt.lift_path(m, random_polyline(m, rng, 2))
    w1, w2 = random_harmonic(2, rng), random_harmonic(2, rng)
    # int_{a^-} w1 w2 = int_a w2 w1
    lhs = pt.iterated_integral(a.reversed(), [w1, w2])
    rhs = pt.iterated_integral(a, [w2, w1])
    assert abs(lhs - rhs) < 1e-9 * (1 + abs(rhs))


def test_homotopy_invariance(model2, pd2):
    # two routes between the same points, not separated by a branch point
    a = pt.lift_path(model2, [pt.Line(0.5 + 1j, 1.5 + 1j)])
    b = pt.LiftedPath.lift(model2, [pt.Line(0.5 + 1j, 0.5 + 2j), pt.Line(0.5 + 2j, 1.5 + 2j),
                              pt.Line(1.5 + 2j, 1.5 + 1j)], y0=a.start[1])
    assert abs(a.end[1] - b.end[1]) < 1e-9
    # invariance needs w1 ^ w2 = 0, true for two holomorphic forms
    w = [pd2.dz(0), pd2.dz(1)]
    assert abs(pt.iterated_integral(a, w) - pt.iterated_integral(b, w)) < 1e-10
    # dz ^ dzbar is an area form, so the value sees the enclosed region
    w = [pd2.dz(0), pd2.dzbar(0)]
    assert abs(pt.iterated_integral(a, w) - pt.iterated_integral(b, w)) > 1e-4


def test_branched_log_winding(model2):
    f = pt.RationalX(1.0, ((0.5, 1), (5.0, -1)))
    p = pt.lift_path(model2, circle(0.5, 0.2))
    L = pt.branched_log(p, f)
    assert L.winding == pytest.approx(1.0, abs=1e-9)


def test_branched_log_rejects_zero_on_path(model2):
    f = pt.RationalX(1.0, ((0.7, 1),))
    p = pt.lift_path(model2, circle(0.5, 0.2))
    with pytest.raises(pt.PathError):
        pt.branched_log(p, f)


def test_branched_log_normalised_at_point(model2):
    f = pt.RationalX(2.0, ((0.5, 1),))
    p = pt.lift_path(model2, [pt.Line(1.5 + 1j, 2.5 + 1j)])
    L = pt.branched_log(p, f, P=1.5 + 1j)
    assert abs(L.start) < 1e-12


def test_trace_gamma_endpoints(setup2):
    for arc in setup2.arcs:
        f = arc.pieces[0].seg.f
        (x0, _), (x1, _) = arc.start, arc.end
        assert abs(f(np.array([x0]))[0]) < 1e-8 or abs(1 / f(np.array([x1]))[0]) < 1e-8
