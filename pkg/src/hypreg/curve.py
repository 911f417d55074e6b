"""Hyperelliptic curves y^2 = h(x): homology, periods, harmonic forms, Abel-Jacobi.

Conventions
-----------
* ``alpha_1..alpha_2g`` is a symplectic basis with ``alpha_i . alpha_{i+g} = 1``.
* ``c(i) = 1`` for ``i <= g`` and ``-1`` otherwise; ``sigma(i) = i + g mod 2g``.
* ``dz_j`` are normalised holomorphic forms, ``int_{alpha_i} dz_j = delta_ij``
  for ``i <= g``, and ``tau_ij = int_{alpha_{g+i}} dz_j``.
* ``dx_j`` are the real harmonic forms with ``int_{alpha_i} dx_j = c(i) delta_{j sigma(i)}``.
  With the convention ``int_a theta = int_C eta_a ^ theta`` the Poincare dual of
  ``alpha_j`` is ``dx_j``.

Indices are 0-based in code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy as sp

from . import intlinalg as il
from .paths import (Arc, HarmonicForm, Line, LiftedPath, PathError, Ray,
                    integrate, iterated_integrals_all)


class ModelError(ValueError):
    """Invalid curve model."""


@dataclass(frozen=True)
class CurvePoint:
    """A point of the curve: ``x`` exact or float, ``y`` complex; ``x=None`` is infinity."""

    x: object
    y: complex = 0j

    @property
    def at_infinity(self) -> bool:
        return self.x is None

    def involution(self) -> "CurvePoint":
        return CurvePoint(self.x, -self.y)


class HyperellipticModel:
    """``y^2 = h(x)`` with ``h`` squarefree of degree ``2g+1`` or ``2g+2``.

    ``coeffs`` are ascending exact coefficients (ints, Fractions, sympy
    rationals).  Only odd degree models get homology and period data.
    """

    def __init__(self, coeffs, branch_tol: float = 1e-12):
        c = [sp.Rational(v) if isinstance(v, (int, Fraction, sp.Rational)) else sp.nsimplify(v)
             for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        x = sp.Symbol("x")
        self.x = x
        self.hpoly = sp.Poly(list(reversed(c)), x) if c else sp.Poly(0, x)
        d = self.hpoly.degree()
        if d < 3:
            raise ModelError("degree of h must be at least 3")
        if sp.degree(sp.gcd(self.hpoly, self.hpoly.diff(x)), x) > 0:
            raise ModelError("h is not squarefree")
        self.degree = d
        self.genus = (d - 1) // 2
        self.coeffs = c
        self.hc = np.array([complex(v) for v in c])
        self.branch_tol = branch_tol
        self._roots_exact = {}
        for r, mult in sp.roots(self.hpoly, x).items():
            self._roots_exact[complex(sp.N(r, 30))] = r
        br = np.roots(self.hc[::-1])
        # polish numeric roots against exact rational ones where available
        out = []
        for r in br:
            near = [k for k in self._roots_exact if abs(k - r) < 1e-6]
            out.append(near[0] if near else complex(r))
        self.branch_points = np.array(sorted(out, key=lambda z: (round(z.real, 12), z.imag)))

    @classmethod
    def from_roots(cls, roots, lead=1):
        x = sp.Symbol("x")
        ex = lambda r: sp.Rational(r) if isinstance(r, (int, Fraction, sp.Rational)) else sp.nsimplify(r)
        p = sp.Poly(lead * sp.prod([x - ex(r) for r in roots]), x)
        return cls(list(reversed(p.all_coeffs())))

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def lead(self):
        return complex(self.coeffs[-1])

    def h(self, x):
        # product form keeps relative accuracy of y near the branch points
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, self.lead, dtype=complex)
        for e in self.branch_points:
            out = out * (x - e)
        return out

    def dh(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=complex),
                                                np.polynomial.polynomial.polyder(self.hc))

    def is_branch(self, x, tol=None) -> bool:
        tol = self.branch_tol if tol is None else tol
        return bool(np.min(np.abs(self.branch_points - complex(x))) < tol)

    def holomorphic_basis(self):
        """``x^k dx / y`` for ``k = 0..g-1``."""
        return [HarmonicForm.basis(self.genus, k) for k in range(self.genus)]

    def point(self, x, sheet: int = 1) -> CurvePoint:
        if x is None:
            return CurvePoint(None, 0j)
        y = complex(np.sqrt(complex(self.h(np.array([complex(x)]))[0])))
        return CurvePoint(x, sheet * y)

    def weierstrass_points(self):
        pts = [CurvePoint(self._roots_exact.get(complex(r), complex(r)), 0j) for r in self.branch_points]
        if self.odd:
            pts.append(CurvePoint(None, 0j))
        return pts

    def __repr__(self):
        return f"HyperellipticModel(y^2 = {self.hpoly.as_expr()}, genus={self.genus})"

    def to_dict(self):
        return {"coeffs": [str(v) for v in self.coeffs]}

    @classmethod
    def from_dict(cls, d):
        return cls([sp.Rational(v) for v in d["coeffs"]])


def new_model(coeffs) -> HyperellipticModel:
    return HyperellipticModel(coeffs)


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


def stadium(a: complex, b: complex, rho: float):
    """Counter-clockwise stadium around the segment ``[a, b]``."""
    d = (b - a) / abs(b - a)
    n = 1j * d
    th = np.angle(d)
    return [
        Line(a - rho * n, b - rho * n),
        Arc(b, rho, th - np.pi / 2, th + np.pi / 2),
        Line(b + rho * n, a + rho * n),
        Arc(a, rho, th + np.pi / 2, th + 3 * np.pi / 2),
    ]


def _seg_point_distance(p, a, b):
    t = np.clip(((p - a) * np.conj(b - a)).real / abs(b - a) ** 2, 0, 1)
    return abs(p - (a + t * (b - a)))


def _seg_seg_distance(a, b, c, d):
    return min(_seg_point_distance(c, a, b), _seg_point_distance(d, a, b),
               _seg_point_distance(a, c, d), _seg_point_distance(b, c, d))


def loop_radius(points, clearance: float = 0.35) -> float:
    """Largest safe stadium radius for the chain through ``points``, times ``clearance``."""
    e = list(points)
    n = len(e)
    dmin = np.inf
    for k in range(n - 1):
        for j in range(n):
            if j not in (k, k + 1):
                dmin = min(dmin, _seg_point_distance(e[j], e[k], e[k + 1]))
        for j in range(k + 2, n - 1):
            dmin = min(dmin, _seg_seg_distance(e[k], e[k + 1], e[j], e[j + 1]))
        dmin = min(dmin, abs(e[k + 1] - e[k]))
    return clearance * dmin


def crossing_number(pa: LiftedPath, pb: LiftedPath, n: int = 400) -> int:
    """Algebraic intersection number of two closed lifted loops."""
    xa, ya = pa.sample(n)
    xb, yb = pb.sample(n)
    total = 0
    for i in range(len(xa) - 1):
        p, r = xa[i], xa[i + 1] - xa[i]
        if r == 0:
            continue
        q = xb[:-1]
        s = xb[1:] - xb[:-1]
        cross = lambda u, v: (np.conj(u) * v).imag
        den = cross(r, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = cross(q - p, s) / den
            u = cross(q - p, r) / den
        hit = (den != 0) & (t >= 0) & (t < 1) & (u >= 0) & (u < 1)
        for j in np.nonzero(hit)[0]:
            y1 = ya[i] + t[j] * (ya[i + 1] - ya[i])
            y2 = yb[j] + u[j] * (yb[j + 1] - yb[j])
            if abs(y1 - y2) < abs(y1 + y2):
                total += int(np.sign(den[j]))
    return total


def symplectic_reduction(J) -> list[list[int]]:
    """Integer ``M`` with ``M J M^T`` the standard form ``[[0, I], [-I, 0]]``.

    Gram-Schmidt over Z: pick ``e``, build ``f`` with ``J(e, f) = 1`` from an
    extended gcd, project the rest and re-basis the complement with a Smith form.
    """
    J = [[int(v) for v in row] for row in J]
    n = len(J)
    if n % 2:
        raise ValueError("odd rank")
    Jm = np.array(J, dtype=object)

    def form(u, v):
        return int(np.dot(np.dot(u, Jm), v))

    basis = [np.array([int(i == j) for j in range(n)], dtype=object) for i in range(n)]
    es, fs = [], []
    while basis:
        e = basis[0]
        rest = basis[1:]
        vals = [form(e, v) for v in rest]
        g, coeffs = _xgcd_list(vals)
        if g == 0:
            raise ValueError("degenerate form")
        if abs(g) != 1:
            raise ValueError("form is not unimodular")
        f = sum((c * v for c, v in zip(coeffs, rest)), np.zeros(n, dtype=object)) * g  # J(e,f)=1
        es.append(e)
        fs.append(f)
        proj = []
        for v in rest:
            w = v - form(v, f) * e + form(v, e) * f
            proj.append(w)
        if len(rest) <= 1:
            basis = []
            continue
        # the projected vectors span the complement with one redundancy
        A = [[int(w[i]) for w in proj] for i in range(n)]
        cols = il.columns(il.column_basis(A, "Z"))
        basis = [np.array([int(v) for v in c], dtype=object) for c in cols if any(c)]
    M = [list(map(int, e)) for e in es] + [list(map(int, f)) for f in fs]
    return M


def _xgcd_list(vals):
    g, coeffs = 0, [0] * len(vals)
    for i, v in enumerate(vals):
        if v == 0:
            continue
        if g == 0:
            g = v
            coeffs = [0] * len(vals)
            coeffs[i] = 1
            continue
        d, s, t = il._egcd(g, v)
        coeffs = [s * c for c in coeffs]
        coeffs[i] += t
        g = d
    if g < 0:
        g = -g
        coeffs = [-c for c in coeffs]
    return g, coeffs


@dataclass
class HomologyBasis:
    model: HyperellipticModel
    loops: list          # raw stadium loops c_k as LiftedPath
    intersections: np.ndarray
    M: np.ndarray        # alpha_i = sum_k M[i, k] c_k
    radius: float

    @property
    def genus(self):
        return self.model.genus

    @cached_property
    def Minv(self):
        return np.rint(np.linalg.inv(self.M.astype(float))).astype(int)

    def alpha_intersections(self):
        return self.M @ self.intersections @ self.M.T

    def integrate(self, forms, tol=1e-12) -> np.ndarray:
        """Matrix ``P[i, m] = int_{alpha_i} form_m``."""
        raw = np.array([integrate(c, forms, tol) for c in self.loops])
        return self.M @ raw

    def loop_integrals(self, forms, tol=1e-12) -> np.ndarray:
        return np.array([integrate(c, forms, tol) for c in self.loops])


def homology_basis(model: HyperellipticModel, clearance: float = 0.35,
                   avoid=()) -> HomologyBasis:
    """Symplectic basis from stadium loops around consecutive branch points."""
    if not model.odd:
        raise NotImplementedError("homology data is implemented for odd degree models")
    e = list(model.branch_points)
    rho = loop_radius(e, clearance)
    for p in avoid:
        rho = min(rho, 0.5 * min(abs(complex(p) - z) for z in e if abs(complex(p) - z) > 1e-9)
                  if any(abs(complex(p) - z) > 1e-9 for z in e) else rho)
    g = model.genus
    loops = []
    for k in range(2 * g):
        segs = stadium(e[k], e[k + 1], rho)
        loop = LiftedPath.lift(model, segs, sheet=1)
        if not loop.is_closed(1e-7):
            raise PathError(f"stadium {k} does not close on the curve")
        loops.append(loop)
    J = np.zeros((2 * g, 2 * g), dtype=int)
    for i in range(2 * g):
        for j in range(i + 1, 2 * g):
            J[i, j] = crossing_number(loops[i], loops[j])
            J[j, i] = -J[i, j]
    M = np.array(symplectic_reduction(J), dtype=int)
    return HomologyBasis(model, loops, J, M, rho)


# ---------------------------------------------------------------------------
# periods and harmonic forms
# ---------------------------------------------------------------------------


def c_sign(i: int, g: int) -> int:
    return 1 if i < g else -1


def sigma(i: int, g: int) -> int:
    return (i + g) % (2 * g)


@dataclass
class PeriodData:
    model: HyperellipticModel
    homology: HomologyBasis
    raw: np.ndarray      # raw[i, m] = int_{alpha_i} x^m dx / y
    N: np.ndarray        # dz_j = sum_m x^m dx / y N[m, j]
    tau: np.ndarray
    dx_coeffs: np.ndarray  # dx_j = sum_k P[j, k] dz_k + Q[j, k] conj(dz_k); stacked (2g, 2g)

    @property
    def genus(self):
        return self.model.genus

    @property
    def Pi(self):
        """``Pi[i, j] = int_{alpha_i} dz_j`` (2g x g)."""
        return self.raw @ self.N

    def dz(self, j: int) -> HarmonicForm:
        return HarmonicForm.holomorphic(self.N[:, j])

    def dzbar(self, j: int) -> HarmonicForm:
        return self.dz(j).conj()

    def dx(self, j: int) -> HarmonicForm:
        g = self.genus
        p = self.dx_coeffs[j, :g]
        q = self.dx_coeffs[j, g:]
        return HarmonicForm(self.N @ p, np.conj(self.N) @ q)

    def poincare_dual(self, cycle) -> HarmonicForm:
        """Harmonic ``eta`` with ``int_a theta = int_C eta ^ theta``, for ``a = sum n_j alpha_j``."""
        g = self.genus
        out = HarmonicForm(np.zeros(g, complex), np.zeros(g, complex))
        for j, n in enumerate(cycle):
            if n:
                out = out.plus(self.dx(j).scale(n))
        return out

    def linear_dual(self, j: int) -> HarmonicForm:
        """``c(j) dx_{sigma(j)}``: the form with periods ``delta_ij`` on ``alpha_i``."""
        g = self.genus
        return self.dx(sigma(j, g)).scale(c_sign(j, g))

    def raw_loop_cycle(self, k: int) -> np.ndarray:
        """Coordinates of the raw stadium loop ``c_k`` in the alpha basis."""
        return self.homology.Minv[k, :]

    def periods_of(self, form: HarmonicForm) -> np.ndarray:
        """``int_{alpha_i} form`` from the period matrix (no quadrature)."""
        a = self.raw @ form.hol
        b = np.conj(self.raw) @ form.anti
        return a + b

    def bilinear(self, phi: HarmonicForm, psi: HarmonicForm) -> complex:
        """``int_C phi ^ psi`` by the Riemann bilinear relation."""
        g = self.genus
        A = self.periods_of(phi)
        B = self.periods_of(psi)
        return complex(sum(A[k] * B[k + g] - A[k + g] * B[k] for k in range(g)))

    def lattice_coords(self, v) -> tuple[np.ndarray, np.ndarray]:
        """Real ``(m, n)`` with ``v = m + tau n``."""
        v = np.asarray(v, complex)
        n = np.linalg.solve(self.tau.imag, v.imag)
        m = v.real - self.tau.real @ n
        return m, n

    def in_lattice(self, v, tol: float = 1e-8) -> bool:
        m, n = self.lattice_coords(v)
        r = np.concatenate([m, n])
        return bool(np.max(np.abs(r - np.rint(r))) < tol)

    def lattice_reduce(self, v):
        m, n = self.lattice_coords(v)
        return np.asarray(v) - (np.rint(m) + self.tau @ np.rint(n))


def period_data(model: HyperellipticModel, tol: float = 1e-12, clearance: float = 0.35,
                homology: HomologyBasis | None = None) -> PeriodData:
    H = homology or homology_basis(model, clearance)
    g = model.genus
    raw = H.integrate(model.holomorphic_basis(), tol)
    A = raw[:g]
    B = raw[g:]
    N = np.linalg.inv(A)
    tau = B @ N
    Pi = raw @ N
    PP = np.hstack([Pi, np.conj(Pi)])
    target = np.zeros((2 * g, 2 * g))
    for i in range(2 * g):
        target[i, sigma(i, g)] = c_sign(i, g)
    # column j of the solution gives dx_j
    sol = np.linalg.solve(PP, target)
    return PeriodData(model, H, raw, N, tau, sol.T)


def riemann_relations(pd: PeriodData) -> dict:
    """Symmetry defect and smallest eigenvalue of ``Im tau``."""
    sym = float(np.max(np.abs(pd.tau - pd.tau.T)))
    eig = float(np.min(np.linalg.eigvalsh(0.5 * (pd.tau.imag + pd.tau.imag.T))))
    return {"symmetry_defect": sym, "min_eig_im_tau": eig}


# ---------------------------------------------------------------------------
# Abel-Jacobi
# ---------------------------------------------------------------------------


def _route(model, x0: complex, x1: complex, clearance: float):
    """Polyline from ``x0`` to ``x1`` keeping away from branch points not at the ends."""
    others = [e for e in model.branch_points if abs(e - x0) > 1e-12 and abs(e - x1) > 1e-12]
    pts = [x0, x1]
    for _ in range(8):
        bad = None
        for k in range(len(pts) - 1):
            for e in others:
                if _seg_point_distance(e, pts[k], pts[k + 1]) < clearance:
                    bad = (k, e)
                    break
            if bad:
                break
        if bad is None:
            break
        k, e = bad
        a, b = pts[k], pts[k + 1]
        d = (b - a) / abs(b - a)
        t = ((e - a) * np.conj(d)).real
        foot = a + t * d
        side = (e - foot)
        n = 1j * d if (side * np.conj(1j * d)).real <= 0 else -1j * d
        pts.insert(k + 1, e + 2 * clearance * n)
    return pts


def aj_path(model, P: CurvePoint, base: complex | None = None, clearance: float | None = None):
    """Lifted path from the base branch point to ``P``; returns (path, sign).

    The integral along the path equals ``sign * AJ(P)``: the path ends on
    one of the two points over ``x(P)``, and the other is reached through the
    involution, which negates holomorphic integrals from a branch point.
    """
    e0 = model.branch_points[0] if base is None else complex(base)
    if clearance is None:
        clearance = 0.5 * loop_radius(list(model.branch_points), 1.0)
    if P.at_infinity:
        # a ray leaving e0 in a direction free of branch points
        best, dirn = -1, 1
        for ang in np.linspace(0, 2 * np.pi, 73)[:-1]:
            d = np.exp(1j * ang)
            dist = min([_seg_point_distance(e, e0, e0 + 1e6 * d) for e in model.branch_points
                        if abs(e - e0) > 1e-12] + [np.inf])
            if dist > best:
                best, dirn = dist, d
        path = LiftedPath.lift(model, [Ray(e0, dirn)], sheet=1)
        return path, 1
    xp = complex(P.x)
    if abs(xp - e0) < 1e-14:
        return None, 1
    pts = _route(model, e0, xp, clearance)
    segs = []
    for k in range(len(pts) - 1):
        segs.append(Line(pts[k], pts[k + 1], sing0=(k == 0),
                         sing1=(k == len(pts) - 2 and model.is_branch(xp))))
    path = LiftedPath.lift(model, segs, sheet=1)
    yend = path.end[1]
    if model.is_branch(xp) or abs(P.y - yend) <= abs(P.y + yend):
        return path, 1
    return path, -1


def abel_jacobi(pd: PeriodData, divisor, tol: float = 1e-12, reduce: bool = True) -> np.ndarray:
    """``sum n_P int_{e0}^{P} dz`` for ``divisor = [(CurvePoint, n), ...]``."""
    model = pd.model
    g = model.genus
    dz = [pd.dz(j) for j in range(g)]
    total = np.zeros(g, complex)
    for P, n in divisor:
        path, sgn = aj_path(model, P)
        if path is None or n == 0:
            continue
        total += n * sgn * integrate(path, dz, tol)
    return pd.lattice_reduce(total) if reduce else total


def lattice_membership(pd: PeriodData, v, tol: float = 1e-8) -> bool:
    return pd.in_lattice(v, tol)


# ---------------------------------------------------------------------------
# entry points under their conventional names
# ---------------------------------------------------------------------------


def homology_symplectic(model: HyperellipticModel, clearance: float = 0.35,
                        min_separation: float = 1e-8) -> HomologyBasis:
    e = model.branch_points
    sep = min(abs(a - b) for i, a in enumerate(e) for b in e[i + 1:])
    if sep < min_separation:
        raise ModelError(f"branch points too close ({sep:.1e}); periods ill-conditioned")
    H = homology_basis(model, clearance)
    g = model.genus
    Jstd = np.block([[np.zeros((g, g), int), np.eye(g, dtype=int)],
                     [-np.eye(g, dtype=int), np.zeros((g, g), int)]])
    if not np.array_equal(H.alpha_intersections(), Jstd):
        raise PathError("symplectic reduction failed")
    return H


def period_matrix(model: HyperellipticModel, basis: HomologyBasis | None = None,
                  tol: float = 1e-12) -> np.ndarray:
    """``Pi[i, j] = int_{alpha_i} dz_j`` for the normalised holomorphic basis."""
    return period_data(model, tol, homology=basis).Pi


def harmonic_dual_basis(pd: PeriodData) -> tuple[np.ndarray, float]:
    """Coefficients of ``dx_j`` in the ``dz, dzbar`` basis and the residual of their defining periods."""
    g = pd.genus
    res = 0.0
    for j in range(2 * g):
        per = pd.periods_of(pd.dx(j))
        want = np.zeros(2 * g)
        for i in range(2 * g):
            if sigma(i, g) == j:
                want[i] = c_sign(i, g)
        res = max(res, float(np.max(np.abs(per - want))))
    return pd.dx_coeffs, res


def k_class_torsion_check(pd: PeriodData, Q: CurvePoint, R: CurvePoint, P: CurvePoint | None = None,
                          bound: int = 64, tol: float = 1e-8) -> dict:
    """Torsion test for ``k_QP - k_RP = 2g (Q - R)``; the point ``P`` cancels.

    Returns the least ``n <= bound`` with ``n * AJ(2g (Q - R))`` in the period
    lattice, or ``is_torsion=False`` when none is found.
    """
    g = pd.genus
    d = abel_jacobi(pd, [(Q, 1), (R, -1)], reduce=False)
    v = 2 * g * d
    out = {"is_torsion": False, "order": None, "aj": v, "witness": None,
           "difference_order": torsion_order(pd, d, bound, tol)}
    n = torsion_order(pd, v, bound, tol)
    if n is not None:
        m, k = pd.lattice_coords(n * v)
        out.update(is_torsion=True, order=n,
                   witness=(np.rint(m).astype(int).tolist(), np.rint(k).astype(int).tolist()))
    return out


def torsion_order(pd: PeriodData, v, bound: int = 64, tol: float = 1e-8) -> int | None:
    """Least ``n <= bound`` with ``n v`` in the period lattice."""
    for n in range(1, bound + 1):
        if pd.in_lattice(n * np.asarray(v), tol):
            return n
    return None


def principal_line_divisor(model: HyperellipticModel, a: complex, b: complex) -> list:
    """``div(y - a - b x)`` on an odd model as ``[(CurvePoint, n), ...]``.

    The zeros are the points ``(x_k, a + b x_k)`` over the roots of
    ``h - (a + b x)^2``; the pole of order ``2g+1`` sits at infinity.
    """
    if not model.odd:
        raise ModelError("odd degree model required")
    P = np.polynomial.polynomial
    q = P.polysub(model.hc, P.polymul([a, b], [a, b]))
    xs = P.polyroots(q)
    out = [(CurvePoint(complex(x), complex(a + b * x)), 1) for x in xs]
    out.append((CurvePoint(None), -len(xs)))
    return out
