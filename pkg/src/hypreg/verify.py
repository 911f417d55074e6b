"""Randomised identity checks shared by the CLI and the acceptance suite."""
from __future__ import annotations

import numpy as np

from .curve import HyperellipticModel, _seg_point_distance
from .paths import (CurveFunction, HarmonicForm, Line, LiftedPath, disc_integral, integrate,
                    iterated_integral)


def random_polyline(model: HyperellipticModel, rng: np.random.Generator, k: int = 3,
                    clearance: float = 0.15, start: complex | None = None, box=None):
    """``k`` random segments staying ``clearance`` away from the branch points."""
    e = list(model.branch_points)
    if box is None:
        lo = min(z.real for z in e) - 1.5
        hi = max(z.real for z in e) + 1.5
        box = (lo, hi, -2.0, 2.0)

    def draw():
        return complex(rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3]))

    def far(z):
        return min(abs(z - b) for b in e) > clearance

    pts = [start if start is not None else draw()]
    while not far(pts[0]):
        pts[0] = draw()
    while len(pts) < k + 1:
        z = draw()
        if far(z) and all(_seg_point_distance(b, pts[-1], z) > clearance for b in e):
            pts.append(z)
    return [Line(a, b) for a, b in zip(pts[:-1], pts[1:])]


def random_harmonic(g: int, rng: np.random.Generator) -> HarmonicForm:
    c = lambda: rng.normal(size=g) + 1j * rng.normal(size=g)
    return HarmonicForm(c(), c())


def random_function(model: HyperellipticModel, rng: np.random.Generator, deg: int = 2) -> CurveFunction:
    c = lambda: tuple(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
    return CurveFunction(c(), c(), tuple(model.hc))


def basic_properties(model: HyperellipticModel, n: int = 100, seed: int = 0,
                     tol: float = 1e-12) -> dict:
    """Largest absolute defect of each of the four length-two identities over ``n`` instances.

    1. ``int_{ab} w1 w2 = int_a w1 w2 + int_b w1 w2 + int_a w1 int_b w2``
    2. ``int_a w1 w2 + int_a w2 w1 = int_a w1 int_a w2``
    3. ``int_a dF w1 = int_a F w1 - F(a(0)) int_a w1``
    4. ``int_a w1 dF = F(a(1)) int_a w1 - int_a F w1``
    """
    rng = np.random.default_rng(seed)
    g = model.genus
    worst = {1: 0.0, 2: 0.0, 3: 0.0, 4: 0.0}
    for _ in range(n):
        w1, w2 = random_harmonic(g, rng), random_harmonic(g, rng)
        a = LiftedPath.lift(model, random_polyline(model, rng, 2), sheet=int(rng.choice([-1, 1])))
        x1, y1 = a.end
        b = LiftedPath.lift(model, random_polyline(model, rng, 2, start=x1), y0=y1)
        ab = a * b
        I = lambda p, fs: iterated_integral(p, fs, tol)
        lhs = I(ab, [w1, w2])
        rhs = I(a, [w1, w2]) + I(b, [w1, w2]) + I(a, [w1]) * I(b, [w2])
        worst[1] = max(worst[1], abs(lhs - rhs))

        s1, s2 = integrate(a, [w1, w2], tol)
        worst[2] = max(worst[2], abs(I(a, [w1, w2]) + I(a, [w2, w1]) - s1 * s2))

        F = random_function(model, rng)
        dF, Fw = F.d(), F.times(w1)
        (xs, ys), (xe, ye) = a.start, a.end
        Fs, Fe = complex(F(xs, ys)), complex(F(xe, ye))
        iFw, iw = integrate(a, [Fw, w1], tol)
        worst[3] = max(worst[3], abs(I(a, [dF, w1]) - (iFw - Fs * iw)))
        worst[4] = max(worst[4], abs(I(a, [w1, dF]) - (Fe * iw - iFw)))
    return worst


def disc_lemma(setup, pairs, tol: float = 1e-11, tol_path: float = 1e-12) -> list[dict]:
    """Triangle-map double integral against ``int_{gamma^i -} phi psi`` for each arc."""
    out = []
    for k, arc in enumerate(setup.arcs):
        for name, phi, psi in pairs:
            d = disc_integral(arc, phi, psi, tol)
            it = iterated_integral(arc.reversed(), [phi, psi], tol_path)
            err = abs(d - it)
            out.append({"arc": k, "pair": name, "double": complex(d), "iterated": complex(it),
                        "abs_diff": err, "rel_diff": err / max(abs(it), 1e-300)})
    return out


def rabi_suite(n_finite: int = 400, n_rational: int = 100, seed: int = 0) -> dict:
    """Exactness of every output sequence and the congruence of the corollary."""
    import random

    from . import extalg as ea

    rng = random.Random(seed)
    counts = {"diagrams": 0, "exact": 0, "corollary": 0}
    failures = []
    makers = [ea.random_finite_diagram] * n_finite + [ea.random_rational_diagram] * n_rational
    for k, make in enumerate(makers):
        d = make(rng)
        counts["diagrams"] += 1
        res = ea.generalized_baer_difference(d)
        if all(ea.verify_exact(s).ok for s in (res.BB1, res.horizontal, res.F)):
            counts["exact"] += 1
        else:
            failures.append((k, "exact"))
        if ea.rabi_corollary_check(d):
            counts["corollary"] += 1
        else:
            failures.append((k, "corollary"))
    counts["failures"] = failures
    return counts


def carlson_suite(n: int = 100, seed: int = 0, tol: float = 1e-9) -> dict:
    """Choice independence and Baer additivity of Carlson representatives."""
    from . import hodge as hd

    rng = np.random.default_rng(seed)
    worst_inv = worst_add = 0.0
    bad = 0
    for _ in range(n):
        m = int(rng.integers(1, 3))
        b = int(rng.integers(1, 3))
        A = hd.weight_minus_one(hd.random_period(rng, m))
        E1, X1 = hd.random_separated_extension(rng, A, b)
        E2, X2 = hd.random_separated_extension(rng, A, b)
        phi1, T = hd.carlson_representative(E1)
        # a different integral basis changes both the retraction and the section
        alt, _ = hd.carlson_representative(E1.change_basis(hd.random_unimodular(rng, A.rank + b)))
        r1 = hd.j_equal(phi1, alt, T, tol)
        phi2, _ = hd.carlson_representative(E2)
        phis, _ = hd.carlson_representative(hd.baer_sum_hodge(E1, E2))
        r2 = hd.j_equal(phis, np.asarray(phi1) + np.asarray(phi2), T, tol)
        worst_inv = max(worst_inv, r1.residual)
        worst_add = max(worst_add, r2.residual)
        bad += (r1.equal is not True) + (r2.equal is not True)
    return {"instances": n, "invariance_residual": worst_inv, "additivity_residual": worst_add,
            "failures": bad}
