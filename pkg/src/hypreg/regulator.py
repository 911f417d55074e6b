"""Surface integrals on C, the regulator pairing and its Carlson counterpart.

Surface integrals of ``weight * phi ^ psi`` for harmonic ``phi, psi`` use the
chart ``w = f(x)`` for a Mobius ``f`` and polar coordinates
``w = exp(s + i theta)`` with ``theta in (0, 2 pi)``; the cut of the
logarithm then sits on the edges ``theta = 0, 2 pi``.  The coefficient of
``phi ^ psi`` only involves ``|y|^2``, so both sheets contribute equally.
Branch points and infinity become ``1/r`` singularities at grid nodes and are
handled with Duffy corners.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import HyperellipticModel, PeriodData, c_sign, sigma
from .paths import (CutLog, HarmonicForm, LiftedPath, LogForm, RationalX,
                    disc_integral, integrate, iterated_integral, iterated_integrals_all,
                    mobius_apply, mobius_inverse, trace_gamma)
from .quad import adaptive_2d

TWO_PI_I = 2j * np.pi


@dataclass
class SurfaceConfig:
    tol: float = 1e-10       # relative to the largest component
    s_max: float = 40.0      # truncation of |log |w||
    n: int = 12              # GL points per cell side
    s_step: float = 2.0      # initial grid spacing in s
    max_cells: int = 400000


def _chart(model: HyperellipticModel, f: RationalX | None):
    if f is not None:
        return f.mobius()
    e = model.branch_points
    return (1.0, -complex(e[0]), 1.0, -complex(e[1]))


def _singular_nodes(model, m, s_max):
    """(s, theta) images of branch points and infinity that are not 0 or infinity of w."""
    pts = [complex(e) for e in model.branch_points]
    ws = []
    for e in pts:
        num = m[0] * e + m[1]
        den = m[2] * e + m[3]
        if abs(num) < 1e-14 or abs(den) < 1e-14:
            continue
        ws.append(num / den)
    if model.odd and abs(m[2]) > 1e-14 and abs(m[0]) > 1e-14:
        ws.append(m[0] / m[2])
    out = []
    for w in ws:
        s = float(np.log(abs(w)))
        th = float(np.mod(np.angle(w), 2 * np.pi))
        if abs(s) >= s_max:
            continue
        if th < 1e-13 or th > 2 * np.pi - 1e-13:
            out.append((s, 0.0))
            out.append((s, 2 * np.pi))
        else:
            out.append((s, th))
    return out


def surface_integrals(model: HyperellipticModel, pairs, weight: str = "one",
                      f: RationalX | None = None, cfg: SurfaceConfig | None = None):
    """``[int_C weight * phi ^ psi for (phi, psi) in pairs]``.

    ``weight`` is ``"one"``, ``"log"`` (``log f`` cut along ``f^{-1}[0, inf]``,
    argument in ``(0, 2 pi)``) or ``"logabs"`` (``log |f|``).  The log weights
    need ``f``; the chart is ``w = f(x)``.
    """
    cfg = cfg or SurfaceConfig()
    if weight != "one" and f is None:
        raise ValueError("log weights need f")
    m = _chart(model, f)
    mi = mobius_inverse(m)
    det = mi[0] * mi[3] - mi[1] * mi[2]
    P = np.polynomial.polynomial

    # x - e computed from w directly, to avoid cancellation near the ends of the chart
    roots = [complex(e) for e in model.branch_points]
    lin = [(mi[0] - e * mi[2], mi[1] - e * mi[3]) for e in roots]
    lead = abs(model.lead)

    hols = [(np.asarray(p.hol), np.asarray(p.anti), np.asarray(q.hol), np.asarray(q.anti))
            for p, q in pairs]

    def integrand(s, th):
        z = s + 1j * th
        w = np.exp(z)
        x = (mi[0] * w + mi[1]) / (mi[2] * w + mi[3])
        dxdw = det / (mi[2] * w + mi[3]) ** 2
        den = mi[2] * w + mi[3]
        habs = np.full(w.shape, lead)
        for a_, b_ in lin:
            habs = habs * np.abs((a_ * w + b_) / den)
        jac = np.abs(dxdw) ** 2 * np.abs(w) ** 2 / habs
        if weight == "log":
            wt = z
        elif weight == "logabs":
            wt = s
        else:
            wt = 1.0
        cols = []
        for ph, pa, qh, qa in hols:
            # phi = a dx + b conj(dx); a = A(x)/y, b = conj(B(x)/y) with B = sum conj(anti) x^k
            Ap = P.polyval(x, ph)
            Bp = np.conj(P.polyval(x, np.conj(pa)))
            Aq = P.polyval(x, qh)
            Bq = np.conj(P.polyval(x, np.conj(qa)))
            coef = Ap * Bq - Bp * Aq
            cols.append(coef)
        vals = np.stack(cols, axis=-1)
        # two sheets, dx ^ conj(dx) = -2i dX dY
        return (2 * -2j) * (jac * wt)[:, None] * vals

    sing = _singular_nodes(model, m, cfg.s_max)
    sb = set(np.arange(-cfg.s_max, cfg.s_max + 1e-9, cfg.s_step).tolist()) | {p[0] for p in sing}
    tb = {0.0, np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi} | {p[1] for p in sing}
    res = adaptive_2d(integrand, sorted(sb), sorted(tb), singular=sing, tol=cfg.tol, n=cfg.n,
                      max_cells=cfg.max_cells, rel=True)
    return np.atleast_1d(res.value), res


def surface_integral(model, phi, psi, weight="one", f=None, cfg=None) -> complex:
    vals, _ = surface_integrals(model, [(phi, psi)], weight, f, cfg)
    return complex(vals[0])


# ---------------------------------------------------------------------------
# regulator data for a Z_QR type cycle
# ---------------------------------------------------------------------------


@dataclass
class RegulatorSetup:
    """The function ``f`` with divisor ``N (Q - R)`` and the lifted arcs of ``gamma``."""

    model: HyperellipticModel
    pd: PeriodData
    f: RationalX
    Q: complex
    R: complex | None
    arcs: list = field(default_factory=list)   # gamma^i as LiftedPath, oriented Q -> R

    @property
    def N(self) -> int:
        return len(self.arcs)

    @property
    def log(self):
        return CutLog(self.f)


def setup_regulator(model: HyperellipticModel, pd: PeriodData, Q, R, P_x=None) -> RegulatorSetup:
    """``f = c (x - Q) / (x - R)`` normalised by ``f(P) = 1``, with its two arcs.

    For Weierstrass points ``Q, R`` this ``f`` has divisor ``2Q - 2R``.
    """
    Q = complex(Q)
    if R is None:
        factors = ((Q, 1),)
    else:
        R = complex(R)
        factors = ((Q, 1), (R, -1))
    f0 = RationalX(1.0, factors)
    if P_x is None:
        c = 1.0
    else:
        c = 1.0 / complex(f0(np.array([complex(P_x)]))[0])
    f = RationalX(c, factors)
    arcs = [trace_gamma(model, f, Q, R, sheet=s) for s in (1, -1)]
    return RegulatorSetup(model, pd, f, Q, R, arcs)


def regulator_pairing(setup: RegulatorSetup, phi: HarmonicForm, psi: HarmonicForm,
                      cfg: SurfaceConfig | None = None, tol_path: float = 1e-12,
                      disc: str = "quadrature") -> dict:
    """Regulator of ``Z_QR`` on ``phi (x) psi``.

    ``int_C log f phi ^ psi + 2 pi i sum_i int_{D_i} phi (x) psi`` where
    ``int_{D_i} = - int_{gamma^i -} phi psi``.  ``disc="quadrature"`` evaluates
    the disc terms as double integrals over the triangle map, ``"iterated"``
    uses the reversed iterated integral.
    """
    S = surface_integral(setup.model, phi, psi, "log", setup.f, cfg)
    D = []
    for arc in setup.arcs:
        if disc == "quadrature":
            D.append(-disc_integral(arc, phi, psi, tol=1e-11))
        else:
            D.append(-iterated_integral(arc.reversed(), [phi, psi], tol_path))
    total = S + TWO_PI_I * sum(D)
    return {"value": complex(total), "surface": complex(S), "discs": [complex(d) for d in D]}


def gamma_crossings(setup: RegulatorSetup, path: LiftedPath) -> list[dict]:
    """Transverse crossings of a lifted path with the arcs ``gamma^i``.

    Each entry records the arc index, the arc parameter at the crossing and
    the local intersection sign ``path . gamma``.
    """
    from scipy.optimize import brentq

    out = []
    for piece in path.pieces:
        for u in setup.log.crossings(piece.seg):
            ua = np.array([u])
            x = complex(piece.x(ua)[0])
            y = complex(piece.y(ua)[0])
            t_path = complex(piece.dx(ua)[0])
            level = float(setup.f(np.array([x]))[0].real)
            arc0 = setup.arcs[0].pieces[0].seg
            ug = brentq(lambda v: float(arc0.r(np.array([v]))[0]) - level, 1e-15, 1 - 1e-15,
                        xtol=1e-15, rtol=1e-15)
            best = None
            for i, arc in enumerate(setup.arcs):
                q = arc.pieces[0]
                yg = complex(q.y(np.array([ug]))[0])
                d = abs(yg - y)
                if best is None or d < best[0]:
                    best = (d, i, complex(q.dx(np.array([ug]))[0]))
            _, i, t_arc = best
            eps = int(np.sign((np.conj(t_path) * t_arc).imag))
            out.append({"arc": i, "u_gamma": ug, "x": x, "sign": eps})
    return out


def corrected_loop_integrals(setup: RegulatorSetup, loop: LiftedPath, forms, tol_path=1e-12):
    """``int_a L psi - 2 pi i sum_c eps_c int_{gamma^i, c -> R} psi`` for each ``psi``.

    ``L`` is the cut logarithm.  For loops meeting ``gamma`` the bare integral
    depends on where the loop crosses; the correction makes the value a
    function of the homology class of ``a`` (it then agrees with the closed
    form through surface integrals).
    """
    from .quad import integrate_1d

    forms = list(forms)
    vals = integrate(loop, [LogForm(setup.log, psi) for psi in forms], tol_path)
    for c in gamma_crossings(setup, loop):
        q = setup.arcs[c["arc"]].pieces[0]

        def pulled(t, q=q):
            return np.stack([psi.pull(q.x(t), q.y(t), q.dx(t)) for psi in forms], axis=-1)

        tail = integrate_1d(pulled, c["u_gamma"], 1.0, tol=tol_path)
        vals = vals - TWO_PI_I * c["sign"] * np.asarray(tail)
    return vals


def colombo_sides(setup: RegulatorSetup, cycle, psi: HarmonicForm, cfg=None, tol_path=1e-12,
                  correct: bool = True):
    """Both sides of ``int_a L psi = int_{C - gamma} eta_a ^ L psi + 2 pi i sum_i int_{gamma^i} eta_a psi``.

    ``cycle`` gives ``a`` in raw stadium loops: ``a = sum cycle[k] c_k``.  With
    ``correct=False`` the left side is the bare cut-log integral.
    """
    pd = setup.pd
    H = pd.homology
    coords = np.asarray(cycle) @ H.Minv  # alpha coordinates
    eta = pd.poincare_dual(coords)
    lhs = 0
    for k, n in enumerate(cycle):
        if n:
            if correct:
                lhs += n * corrected_loop_integrals(setup, H.loops[k], [psi], tol_path)[0]
            else:
                lhs += n * integrate(H.loops[k], [LogForm(setup.log, psi)], tol_path)[0]
    S = surface_integral(setup.model, eta, psi, "log", setup.f, cfg)
    it = sum(iterated_integral(arc, [eta, psi], tol_path) for arc in setup.arcs)
    rhs = S + TWO_PI_I * it
    return complex(lhs), complex(rhs), {"surface": complex(S), "iterated": complex(it)}


def carlson_pairing(setup: RegulatorSetup, method: str = "path", cfg=None, tol_path=1e-12,
                    constant: float | None = None) -> np.ndarray:
    """Matrix ``F[j, i]`` of the Carlson representative on ``alpha_j (x) zeta_i``.

    ``method="path"``: ``(2g+1) int_{alpha_j} L dz_i`` along the loops, with the
    crossing correction of :func:`corrected_loop_integrals`.
    ``method="closed_form"``: ``(2g+1) (int_{C-gamma} L dx_j ^ dz_i + 2 pi i sum int_{gamma^i} dx_j dz_i)``.
    """
    pd = setup.pd
    g = pd.genus
    k = (2 * g + 1) if constant is None else constant
    dz = [pd.dz(i) for i in range(g)]
    if method == "path":
        raw = np.array([corrected_loop_integrals(setup, c, dz, tol_path)
                        for c in pd.homology.loops])
        return k * (pd.homology.M @ raw)
    dx = [pd.dx(j) for j in range(2 * g)]
    pairs = [(dx[j], dz[i]) for j in range(2 * g) for i in range(g)]
    S, _ = surface_integrals(setup.model, pairs, "log", setup.f, cfg)
    S = S.reshape(2 * g, g)
    it = np.zeros((2 * g, g), complex)
    for arc in setup.arcs:
        M = iterated_integrals_all(arc, dx + dz, tol_path)
        it += M[:2 * g, 2 * g:]
    return k * (S + TWO_PI_I * it)


def regulator_matrix(setup: RegulatorSetup, cfg=None, tol_path=1e-12, disc="quadrature") -> dict:
    """``reg[j, i] = <reg(Z_QR), dx_j (x) dz_i>`` with the surface part vectorised."""
    pd = setup.pd
    g = pd.genus
    dz = [pd.dz(i) for i in range(g)]
    dx = [pd.dx(j) for j in range(2 * g)]
    pairs = [(dx[j], dz[i]) for j in range(2 * g) for i in range(g)]
    S, res = surface_integrals(setup.model, pairs, "log", setup.f, cfg)
    S = S.reshape(2 * g, g)
    D = np.zeros((2 * g, g), complex)
    for arc in setup.arcs:
        for j in range(2 * g):
            for i in range(g):
                if disc == "quadrature":
                    D[j, i] -= disc_integral(arc, dx[j], dz[i], tol=1e-11)
                else:
                    D[j, i] -= iterated_integral(arc.reversed(), [dx[j], dz[i]], tol_path)
    return {"value": S + TWO_PI_I * D, "surface": S, "discs": D, "surface_error": res.error}


def gamma_periods(setup: RegulatorSetup, forms, tol_path=1e-12) -> np.ndarray:
    """``int_l form`` for the loop ``l = gamma^1 (gamma^2)^-``."""
    a, b = setup.arcs
    return integrate(a, forms, tol_path) - integrate(b, forms, tol_path)


@dataclass
class MainTheoremReport:
    carlson: np.ndarray
    regulator: np.ndarray
    offset: np.ndarray
    max_rel_defect: float
    fitted_constant: complex
    lattice_check: object
    ok: bool


def main_theorem_check(setup: RegulatorSetup, cfg=None, tol_path=1e-12, rtol=1e-4,
                       disc="quadrature") -> MainTheoremReport:
    """Compare the Carlson representative with ``(2g+1)`` times the regulator.

    Entrywise the difference should be ``(2g+1) pi i P_j Q_i`` with
    ``P_j = int_l dx_j`` (an integer) and ``Q_i = int_l dz_i`` (a period):
    a half lattice vector, hence torsion.  The full matrices are also compared
    modulo ``F^0 + lattice`` after doubling.
    """
    from .hodge import curve_hom_jacobian

    pd = setup.pd
    g = pd.genus
    k = 2 * g + 1
    F = carlson_pairing(setup, "path", cfg, tol_path)
    reg = regulator_matrix(setup, cfg, tol_path, disc)["value"]
    dz = [pd.dz(i) for i in range(g)]
    dx = [pd.dx(j) for j in range(2 * g)]
    per = gamma_periods(setup, dx + dz, tol_path)
    Pj, Qi = per[:2 * g], per[2 * g:]
    offset = k * 1j * np.pi * np.outer(Pj, Qi)
    defect = F - k * reg - offset
    scale = max(np.max(np.abs(F)), 1e-300)
    rel = float(np.max(np.abs(defect)) / scale)
    # least-squares fit of the constant c in F ~ c reg + offset'
    r = reg.ravel()
    fitted = complex(np.vdot(r, (F - offset).ravel()) / np.vdot(r, r)) if np.vdot(r, r) else 0j
    J = curve_hom_jacobian(pd)
    lat = J.equal(2 * F.ravel(), 2 * k * reg.ravel(), tol=1e-6)
    return MainTheoremReport(F, reg, offset, rel, fitted, lat, rel <= rtol and bool(lat.equal))


# ---------------------------------------------------------------------------
# decomposable cycles and the real regulator
# ---------------------------------------------------------------------------


def decomposable_regulator(model: HyperellipticModel, a: float, phi, psi, cfg=None) -> complex:
    """Regulator of ``(C, a)`` for a constant ``a > 0``: ``log a int_C phi ^ psi``."""
    if a <= 0:
        raise ValueError("constant must be positive")
    la = np.log(a)
    if la == 0.0:
        return 0j
    return complex(la * surface_integral(model, phi, psi, "one", None, cfg))


def real_regulator(setup: RegulatorSetup, tol_path=1e-12, conjugate_audit: bool = True) -> dict:
    """``R[i, j] = int_{Z(dzbar_j)} log |f| dz_i`` with ``Z(theta)`` the Poincare dual chain.

    ``dzbar_j = sum_m r_m dx_m`` gives ``Z = sum_m r_m alpha_m``.  The audit
    recomputes ``int_{Z(dz_j)} log |f| dzbar_i`` independently; it must equal
    the complex conjugate.
    """
    pd = setup.pd
    g = pd.genus
    H = pd.homology
    dz = [pd.dz(i) for i in range(g)]
    forms = [LogForm(setup.log, z, real=True) for z in dz]
    raw = np.array([integrate(c, forms, tol_path) for c in H.loops])
    along = H.M @ raw   # along[m, i] = int_{alpha_m} log|f| dz_i
    Pi = pd.Pi
    out = np.zeros((g, g), complex)
    r_all = []
    for j in range(g):
        per = np.conj(Pi[:, j])          # periods of dzbar_j
        r = np.zeros(2 * g, complex)
        for i in range(2 * g):
            r[sigma(i, g)] = c_sign(i, g) * per[i]
        r_all.append(r)
        out[:, j] = r @ along
    report = {"value": out}
    if conjugate_audit:
        formsb = [LogForm(setup.log, z.conj(), real=True) for z in dz]
        rawb = np.array([integrate(c, formsb, tol_path) for c in H.loops])
        alongb = H.M @ rawb
        audit = np.zeros((g, g), complex)
        for j in range(g):
            per = Pi[:, j]
            r = np.zeros(2 * g, complex)
            for i in range(2 * g):
                r[sigma(i, g)] = c_sign(i, g) * per[i]
            audit[:, j] = r @ alongb
        report["audit"] = audit
        report["audit_defect"] = float(np.max(np.abs(audit - np.conj(out))))
    return report


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class RegulatorReport:
    pair: tuple            # (j, i): alpha_j (x) zeta_i, 0-based
    regulator: complex
    carlson: complex
    ratio: complex         # (carlson - offset) / regulator
    tolerance: float
    offset: complex        # half-lattice ambiguity removed before comparison
    ok: bool

    def to_dict(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {"j": self.pair[0], "i": self.pair[1], "regulator": c(self.regulator),
                "carlson": c(self.carlson), "ratio": c(self.ratio), "tolerance": self.tolerance,
                "offset": c(self.offset), "ok": self.ok}


def pair_reports(rep: MainTheoremReport, rtol: float = 1e-4) -> list[RegulatorReport]:
    """Entrywise view of a main-theorem check."""
    F, reg, off = rep.carlson, rep.regulator, rep.offset
    g2, g = F.shape
    k = g2 + 1
    scale = max(float(np.max(np.abs(F))), 1e-300)
    out = []
    for j in range(g2):
        for i in range(g):
            d = F[j, i] - k * reg[j, i] - off[j, i]
            ratio = (F[j, i] - off[j, i]) / reg[j, i] if reg[j, i] != 0 else np.nan
            out.append(RegulatorReport((j, i), complex(reg[j, i]), complex(F[j, i]), complex(ratio),
                                       rtol, complex(off[j, i]), bool(abs(d) <= rtol * scale)))
    return out


def colombo_identity_check(setup: RegulatorSetup, cycle, psi: HarmonicForm, cfg=None,
                           tol_path: float = 1e-12, tol: float = 1e-5) -> dict:
    """Dual-route check of the Colombo identity, reported with its margin."""
    lhs, rhs, info = colombo_sides(setup, cycle, psi, cfg, tol_path)
    diff = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs), 1.0)
    return {"lhs": lhs, "rhs": rhs, "abs_diff": diff, "rel_diff": diff / scale,
            "ok": diff / scale <= tol, "crossings": len(sum(
                (gamma_crossings(setup, setup.pd.homology.loops[k]) for k, n in enumerate(cycle) if n),
                [])), **info}
