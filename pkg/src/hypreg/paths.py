"""Paths on a hyperelliptic curve, 1-forms along them, and iterated integrals.

A path is a chain of parametrised segments in the x-plane together with a
continuous choice of y = sqrt(h(x)).  Forms are pulled back to the segment
parameter u in [0, 1]; all integrals are composite Gauss-Legendre with
adaptive panels, and iterated integrals of length <= 3 are advanced with the
spectral running-integral matrix.

Iterated integrals use the convention
    int_a w1 w2 = int_{0 <= t1 <= t2 <= 1} w1(t1) w2(t2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .quad import adaptive_panels, gauss_legendre, running_matrix


class PathError(ValueError):
    """Malformed path (discontinuous lift, passes through a branch point, ...)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its tolerance."""


def _branch_sqrt(z):
    return np.sqrt(np.asarray(z, dtype=complex))


# ---------------------------------------------------------------------------
# rational functions of x
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalX:
    """``c * prod (x - a)^e``; a root of ``None`` is ignored (placeholder for infinity)."""

    const: complex
    factors: tuple  # ((a, e), ...)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.full(x.shape, complex(self.const))
        for a, e in self.factors:
            out = out * (x - complex(a)) ** e
        return out

    def logderiv(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape, complex)
        for a, e in self.factors:
            out = out + e / (x - complex(a))
        return out

    def deriv(self, x):
        return self(x) * self.logderiv(x)

    @property
    def zeros(self):
        return [complex(a) for a, e in self.factors if e > 0]

    @property
    def poles(self):
        return [complex(a) for a, e in self.factors if e < 0]

    @property
    def degree(self) -> int:
        """Net degree in x (positive when there is a pole at infinity)."""
        return sum(e for _, e in self.factors)

    def is_mobius(self) -> bool:
        es = sorted(e for _, e in self.factors)
        return es in ([1], [-1, 1], [-1])

    def mobius(self):
        """Coefficients (a, b, c, d) with f(x) = (a x + b) / (c x + d)."""
        if not self.is_mobius():
            raise ValueError("not a Mobius transformation of x")
        num = [1.0, 0.0]  # (coefficient of x, constant)
        den = [0.0, 1.0]
        for a, e in self.factors:
            if e == 1:
                num = [1.0, -complex(a)]
            else:
                den = [1.0, -complex(a)]
        c = complex(self.const)
        return c * num[0], c * num[1], den[0], den[1]


def mobius_inverse(m):
    a, b, c, d = m
    return d, -b, -c, a


def mobius_apply(m, z):
    a, b, c, d = m
    return (a * z + b) / (c * z + d)


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------


class Form:
    """A 1-form on the curve, evaluated by pullback along a parametrised lift."""

    def pull(self, x, y, dx):
        raise NotImplementedError

    def breaks(self, seg) -> list:
        return []

    def __add__(self, other):
        return SumForm((self, other), (1.0, 1.0))

    def __sub__(self, other):
        return SumForm((self, other), (1.0, -1.0))

    def __neg__(self):
        return SumForm((self,), (-1.0,))

    def __rmul__(self, c):
        return SumForm((self,), (c,))


@dataclass(frozen=True, eq=False)
class SumForm(Form):
    parts: tuple
    coeffs: tuple

    def pull(self, x, y, dx):
        out = 0
        for p, c in zip(self.parts, self.coeffs):
            out = out + c * p.pull(x, y, dx)
        return out

    def breaks(self, seg):
        return sorted({b for p in self.parts for b in p.breaks(seg)})


@dataclass(frozen=True, eq=False)
class HarmonicForm(Form):
    """``sum_k hol[k] x^k dx / y + anti[k] conj(x^k dx / y)``."""

    hol: np.ndarray
    anti: np.ndarray

    @classmethod
    def holomorphic(cls, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        return cls(c, np.zeros_like(c))

    @classmethod
    def basis(cls, g, k):
        c = np.zeros(g, complex)
        c[k] = 1
        return cls.holomorphic(c)

    def conj(self):
        return HarmonicForm(np.conj(self.anti), np.conj(self.hol))

    def scale(self, s):
        return HarmonicForm(s * self.hol, s * self.anti)

    def plus(self, other: "HarmonicForm"):
        return HarmonicForm(self.hol + other.hol, self.anti + other.anti)

    def coefficients(self, x, y):
        """(a, b) with form = a dx + b conj(dx)."""
        x = np.asarray(x, dtype=complex)
        a = np.polynomial.polynomial.polyval(x, self.hol) / y
        b = np.conj(np.polynomial.polynomial.polyval(x, np.conj(self.anti)) / y)
        return a, b

    def pull(self, x, y, dx):
        a, b = self.coefficients(x, y)
        return a * dx + b * np.conj(dx)


@dataclass(frozen=True, eq=False)
class CurveFunction:
    """``F = p(x) + q(x) y`` with complex polynomial coefficients (ascending)."""

    p: tuple
    q: tuple
    hpoly: tuple  # coefficients of h, ascending

    def __call__(self, x, y):
        P = np.polynomial.polynomial
        return P.polyval(x, self.p) + P.polyval(x, self.q) * y

    def d(self) -> "ExactForm":
        return ExactForm(self)

    def times(self, form: Form) -> "ProductForm":
        return ProductForm(self, form)


@dataclass(frozen=True, eq=False)
class ExactForm(Form):
    F: CurveFunction

    def pull(self, x, y, dx):
        P = np.polynomial.polynomial
        p, q, h = self.F.p, self.F.q, self.F.hpoly
        val = P.polyval(x, P.polyder(p)) + P.polyval(x, P.polyder(q)) * y \
            + P.polyval(x, q) * P.polyval(x, P.polyder(h)) / (2 * y)
        return val * dx


@dataclass(frozen=True, eq=False)
class ProductForm(Form):
    F: CurveFunction
    form: Form

    def pull(self, x, y, dx):
        return self.F(x, y) * self.form.pull(x, y, dx)

    def breaks(self, seg):
        return self.form.breaks(seg)


@dataclass(frozen=True, eq=False)
class CutLog:
    """``log f`` with argument in ``(0, 2 pi)``; discontinuous across ``f^{-1}[0, inf]``."""

    f: RationalX

    def __call__(self, x):
        v = self.f(x)
        return np.log(np.abs(v)) + 1j * np.mod(np.angle(v), 2 * np.pi)

    def crossings(self, seg, samples: int = 400) -> list:
        """Parameters where the segment meets ``f^{-1}(0, inf)``."""
        u = np.linspace(0, 1, samples + 1)[1:-1]
        v = self.f(seg.x(u))
        im = v.imag
        out = []
        for i in range(len(u) - 1):
            if im[i] == 0 and v[i].real > 0:
                out.append(u[i])
            elif im[i] * im[i + 1] < 0 and (v[i].real > 0 or v[i + 1].real > 0):
                r = brentq(lambda s: self.f(seg.x(np.array([s])))[0].imag, u[i], u[i + 1],
                           xtol=1e-15, rtol=1e-15)
                if self.f(seg.x(np.array([r])))[0].real > 0:
                    out.append(r)
        return out


@dataclass(frozen=True, eq=False)
class LogForm(Form):
    """``L * form`` with ``L`` a cut logarithm or ``log |f|``."""

    log: CutLog
    form: Form
    real: bool = False

    def pull(self, x, y, dx):
        L = self.log(x)
        if self.real:
            L = L.real
        return L * self.form.pull(x, y, dx)

    def breaks(self, seg):
        b = list(self.form.breaks(seg))
        if not self.real:
            b += self.log.crossings(seg)
        return sorted(b)


@dataclass(frozen=True, eq=False)
class RationalForm(Form):
    """``r(x) dx`` for a rational function ``r`` of ``x`` alone."""

    r: RationalX

    def pull(self, x, y, dx):
        return self.r(x) * dx


@dataclass(frozen=True, eq=False)
class DLogForm(Form):
    """``d log f = f'/f dx``."""

    f: RationalX

    def pull(self, x, y, dx):
        return self.f.logderiv(x) * dx


@dataclass
class BranchedLog:
    """A continuous branch of ``log f`` along a path, sampled at ``u`` per piece."""

    values: list          # arrays of log values, one per piece
    start: complex
    end: complex

    @property
    def winding(self) -> float:
        """``(arg f(end) - arg f(start)) / 2 pi`` along the path."""
        return float((self.end - self.start).imag / (2 * np.pi))


def branched_log(path: "LiftedPath", f: RationalX, P=None, samples: int = 2000) -> BranchedLog:
    """Continue ``log f`` from its principal value at the start of ``path``.

    If ``P`` is given, ``f`` is first rescaled so that ``f(P) = 1``.
    """
    if P is not None:
        f = RationalX(f.const / complex(f(np.array([complex(P)]))[0]), f.factors)
    u = np.linspace(0, 1, samples + 1)
    vals = []
    prev = None
    for piece in path.pieces:
        v = f(piece.x(u))
        if np.any(~np.isfinite(v)) or np.min(np.abs(v)) < 1e-300:
            raise PathError("f has a zero or pole on the path")
        arg = np.unwrap(np.angle(v))
        if prev is not None:
            arg = arg + 2 * np.pi * np.round((prev - arg[0]) / (2 * np.pi))
        prev = arg[-1]
        vals.append(np.log(np.abs(v)) + 1j * arg)
    return BranchedLog(vals, complex(vals[0][0]), complex(vals[-1][-1]))


# ---------------------------------------------------------------------------
# segments
# ---------------------------------------------------------------------------


def _grade(u, g0, g1):
    """Reparametrisation with vanishing derivative at graded ends."""
    if g0 and g1:
        return 3 * u ** 2 - 2 * u ** 3, 6 * u * (1 - u)
    if g0:
        return u ** 2, 2 * u
    if g1:
        return 2 * u - u ** 2, 2 - 2 * u
    return u, np.ones_like(u)


class Segment:
    sing0 = False
    sing1 = False

    def x(self, u):
        raise NotImplementedError

    def dx(self, u):
        raise NotImplementedError

    @property
    def start(self):
        return complex(self.x(np.array([0.0]))[0])

    @property
    def end(self):
        return complex(self.x(np.array([1.0]))[0])

    def reversed(self) -> "Segment":
        return Reversed(self)


@dataclass(eq=False)
class Line(Segment):
    x0: complex
    x1: complex
    sing0: bool = False
    sing1: bool = False

    def x(self, u):
        s, _ = _grade(np.asarray(u, float), self.sing0, self.sing1)
        return self.x0 + (self.x1 - self.x0) * s

    def dx(self, u):
        _, ds = _grade(np.asarray(u, float), self.sing0, self.sing1)
        return (self.x1 - self.x0) * ds


@dataclass(eq=False)
class Arc(Segment):
    center: complex
    radius: float
    th0: float
    th1: float

    def x(self, u):
        th = self.th0 + (self.th1 - self.th0) * np.asarray(u, float)
        return self.center + self.radius * np.exp(1j * th)

    def dx(self, u):
        th = self.th0 + (self.th1 - self.th0) * np.asarray(u, float)
        return 1j * (self.th1 - self.th0) * self.radius * np.exp(1j * th)


@dataclass(eq=False)
class Ray(Segment):
    """``x0 + d (u / (1 - u))^2``, ending at the point at infinity."""

    x0: complex
    d: complex
    sing1 = True

    def __post_init__(self):
        self.sing0 = True  # graded at the start in any case

    def x(self, u):
        u = np.asarray(u, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            V = u / (1 - u)
            return self.x0 + self.d * V ** 2

    def dx(self, u):
        u = np.asarray(u, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 2 * self.d * u / (1 - u) ** 3

    @property
    def end(self):
        return complex("inf")


@dataclass(eq=False)
class Reversed(Segment):
    seg: Segment

    def __post_init__(self):
        self.sing0, self.sing1 = self.seg.sing1, self.seg.sing0

    def x(self, u):
        return self.seg.x(1 - np.asarray(u, float))

    def dx(self, u):
        return -self.seg.dx(1 - np.asarray(u, float))

    @property
    def start(self):
        return self.seg.end

    @property
    def end(self):
        return self.seg.start

    def reversed(self):
        return self.seg


class Traced(Segment):
    """The arc of ``f^{-1}([0, inf])`` from a zero of ``f`` to a pole, by continuation.

    The level is ``r(u) = u^(2 m) / (1 - u)^(2 n)`` with ``m, n`` the orders
    of the zero and pole in x, which grades both ends.  Checkpoints are
    produced by an Euler predictor and a Newton corrector; evaluation at
    any parameter runs Newton from the nearest checkpoint.
    """

    sing0 = True
    sing1 = True

    def __init__(self, f: RationalX, zero: complex, pole: complex | None, tol=1e-13):
        self.f = f
        self.zero = complex(zero)
        self.pole = None if pole is None else complex(pole)
        orders = {complex(a): e for a, e in f.factors}
        self.m = orders[self.zero]
        self.n = -orders[self.pole] if self.pole is not None else -f.degree
        if self.m <= 0 or self.n <= 0:
            raise PathError("zero/pole orders must be positive")
        self.tol = tol
        self._build()

    def r(self, u):
        u = np.asarray(u, float)
        with np.errstate(divide="ignore"):
            return u ** (2 * self.m) / (1 - u) ** (2 * self.n)

    def dr(self, u):
        u = np.asarray(u, float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.r(u) * (2 * self.m / u + 2 * self.n / (1 - u))

    def _newton(self, x, u, iters=30):
        target = self.r(u)
        x = np.array(x, dtype=complex)
        for _ in range(iters):
            fx = self.f(x)
            step = (fx - target) / self.f.deriv(x)
            x = x - step
            if np.all(np.abs(step) <= self.tol * (1 + np.abs(x))):
                break
        return x

    def _build(self):
        # local start: x ~ zero + (r / c)^(1/m) along the zero's leading term
        us = [0.0]
        xs = [self.zero]
        u = 1e-4
        lead = complex(self.f.const) * np.prod(
            [(self.zero - complex(a)) ** e for a, e in self.f.factors if complex(a) != self.zero])
        x = self.zero + (self.r(u) / lead) ** (1 / self.m)
        x = complex(self._newton([x], u)[0])
        us.append(u)
        xs.append(x)
        du = 1e-3
        while u < 1 - 1e-9:
            un = min(u + du, 1 - 1e-9)
            xp = x + (self.dr(u) / self.f.deriv(np.array([x]))[0]) * (un - u)
            xn = complex(self._newton([xp], un)[0])
            res = abs(self.f(np.array([xn]))[0] - self.r(un))
            jump = abs(xn - xp)
            if res > 1e-8 * (1 + self.r(un)) or jump > 0.05 * (abs(xn - x) + 1e-12) + 1e-9:
                du /= 2
                if du < 1e-12:
                    raise NumericalError("level-set tracing stalled")
                continue
            us.append(un)
            xs.append(xn)
            u, x = un, xn
            du = min(du * 1.5, 0.02)
        self._u = np.array(us)
        self._x = np.array(xs)

    def x(self, u):
        u = np.asarray(u, float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        out = np.empty(u.shape, complex)
        at0 = u <= 0
        at1 = u >= 1
        mid = ~(at0 | at1)
        out[at0] = self.zero
        out[at1] = self.pole if self.pole is not None else np.inf
        if mid.any():
            um = u[mid]
            idx = np.clip(np.searchsorted(self._u, um) - 1, 1, len(self._u) - 1)
            idx = np.where(um < self._u[1], 1, idx)
            guess = np.interp(um, self._u, self._x.real) + 1j * np.interp(um, self._u, self._x.imag)
            # near the ends the interpolant is poor; use the local expansion
            guess = np.where(um < self._u[1], self._x[1], guess)
            out[mid] = self._newton(guess, um)
        return out[0] if scalar else out

    def dx(self, u):
        u = np.asarray(u, float)
        xx = self.x(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.dr(u) / self.f.deriv(xx)

    @property
    def start(self):
        return self.zero

    @property
    def end(self):
        return self.pole if self.pole is not None else complex("inf")


# ---------------------------------------------------------------------------
# lifting
# ---------------------------------------------------------------------------


class LiftedSegment:
    """A segment with a continuous branch of y, fixed by checkpoints."""

    def __init__(self, model, seg: Segment, y_at: tuple[float, complex]):
        self.model = model
        self.seg = seg
        self._build(*y_at)

    def _hx(self, u):
        return self.model.h(self.seg.x(u))

    def _build(self, u0, y0):
        us = [u0]
        ys = [complex(y0)]
        for direction in (+1, -1):
            u, y = u0, complex(y0)
            du = 1e-2
            lim = 1.0 if direction > 0 else 0.0
            while (lim - u) * direction > 1e-12:
                un = u + direction * du
                if (lim - un) * direction < 0:
                    un = lim
                hn = complex(self._hx(np.array([un]))[0])
                if not np.isfinite(hn) or abs(hn) == 0.0:
                    break  # endpoint on a branch point or at infinity
                cand = np.sqrt(hn)
                # continuation needs a small change of argument
                if abs(np.angle(cand / y)) > np.pi / 2 and abs(np.angle(-cand / y)) > np.pi / 2:
                    du /= 2
                    if du < 1e-14:
                        raise PathError("path passes through a branch point")
                    continue
                ang = np.angle(hn / (y * y)) if y != 0 else 0.0
                if abs(ang) > np.pi / 4 and du > 1e-14:
                    du /= 2
                    continue
                yn = cand if (cand * np.conj(y)).real >= 0 else -cand
                u, y = un, yn
                if direction > 0:
                    us.append(u)
                    ys.append(y)
                else:
                    us.insert(0, u)
                    ys.insert(0, y)
                if abs(ang) < np.pi / 16:
                    du = min(2 * du, 0.05)
        self._u = np.array(us)
        self._y = np.array(ys)

    def x(self, u):
        return self.seg.x(u)

    def dx(self, u):
        return self.seg.dx(u)

    def y(self, u):
        u = np.asarray(u, float)
        xx = self.seg.x(u)
        cand = np.sqrt(self.model.h(xx).astype(complex))
        idx = np.searchsorted(self._u, u)
        idx = np.clip(idx, 0, len(self._u) - 1)
        left = np.clip(idx - 1, 0, len(self._u) - 1)
        pick = np.where(np.abs(self._u[left] - u) < np.abs(self._u[idx] - u), left, idx)
        ref = self._y[pick]
        s = np.where((cand * np.conj(ref)).real >= 0, 1.0, -1.0)
        return s * cand

    @property
    def y_start(self):
        return complex(self.y(np.array([0.0]))[0])

    @property
    def y_end(self):
        return complex(self.y(np.array([1.0]))[0])

    def reversed(self) -> "LiftedSegment":
        out = LiftedSegment.__new__(LiftedSegment)
        out.model = self.model
        out.seg = self.seg.reversed()
        out._u = (1 - self._u)[::-1]
        out._y = self._y[::-1]
        return out

    def conjugate_sheet(self) -> "LiftedSegment":
        out = LiftedSegment.__new__(LiftedSegment)
        out.model = self.model
        out.seg = self.seg
        out._u = self._u
        out._y = -self._y
        return out


class LiftedPath:
    """A chain of lifted segments; integrals are additive over segments."""

    def __init__(self, pieces: Sequence[LiftedSegment]):
        self.pieces = list(pieces)

    @classmethod
    def lift(cls, model, segments: Sequence[Segment], y0: complex | None = None,
             sheet: int = 1) -> "LiftedPath":
        """Lift a chain of segments.

        If the chain starts at a regular point, ``y0`` (or ``sheet`` times the
        principal root) fixes the branch there.  If it starts at a branch
        point, ``sheet`` fixes the branch at the middle of the first segment.
        """
        pieces = []
        prev_end = None
        for k, seg in enumerate(segments):
            if k > 0 and abs(seg.start - segments[k - 1].end) > 1e-12 * (1 + abs(seg.start)):
                raise PathError(f"segments {k - 1} and {k} do not join")
            h0 = complex(model.h(np.array([seg.start]))[0]) if np.isfinite(seg.start) else 0
            regular_start = np.isfinite(seg.start) and abs(h0) > 1e-300 and not seg.sing0
            if k == 0:
                if regular_start:
                    ys = y0 if y0 is not None else sheet * np.sqrt(h0)
                    pieces.append(LiftedSegment(model, seg, (0.0, ys)))
                else:
                    hm = complex(model.h(np.array([seg.x(np.array(0.5))]).ravel())[0])
                    pieces.append(LiftedSegment(model, seg, (0.5, sheet * np.sqrt(hm))))
            else:
                if not regular_start:
                    raise PathError("interior junction at a branch point")
                pieces.append(LiftedSegment(model, seg, (0.0, prev_end)))
            prev_end = pieces[-1].y_end
        return cls(pieces)

    def reversed(self) -> "LiftedPath":
        return LiftedPath([p.reversed() for p in self.pieces[::-1]])

    def conjugate_sheet(self) -> "LiftedPath":
        """Image under the hyperelliptic involution."""
        return LiftedPath([p.conjugate_sheet() for p in self.pieces])

    def __mul__(self, other: "LiftedPath") -> "LiftedPath":
        """Composition: ``self`` first, then ``other``."""
        a, b = self.end, other.start
        if abs(a[0] - b[0]) > 1e-9 * (1 + abs(a[0])) or abs(a[1] - b[1]) > 1e-7 * (1 + abs(a[1])):
            raise PathError("paths do not compose")
        return LiftedPath(self.pieces + other.pieces)

    @property
    def start(self):
        p = self.pieces[0]
        return p.seg.start, p.y_start

    @property
    def end(self):
        p = self.pieces[-1]
        return p.seg.end, p.y_end

    def is_closed(self, tol=1e-9):
        (x0, y0), (x1, y1) = self.start, self.end
        return abs(x0 - x1) < tol * (1 + abs(x0)) and abs(y0 - y1) < tol * (1 + abs(y0)) ** 1

    def sample(self, n: int = 200):
        """Dense polyline (x, y) samples, for plotting and intersection counts."""
        xs, ys = [], []
        u = np.linspace(0, 1, n + 1)
        for p in self.pieces:
            x = p.x(u)
            ok = np.isfinite(x)
            xs.append(x[ok])
            ys.append(p.y(u[ok]))
        return np.concatenate(xs), np.concatenate(ys)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------


def _pull_matrix(piece: LiftedSegment, forms, u):
    x = piece.x(u)
    y = piece.y(u)
    dx = piece.dx(u)
    return np.stack([f.pull(x, y, dx) for f in forms], axis=-1)


def _panels(piece, forms, tol, n):
    breaks = sorted({b for f in forms for b in f.breaks(piece.seg)})
    return adaptive_panels(lambda u: _pull_matrix(piece, forms, u), 0.0, 1.0,
                           tol=tol, n=n, breaks=breaks)


def integrate(path: LiftedPath, forms: Sequence[Form], tol: float = 1e-12, n: int = 20) -> np.ndarray:
    """Line integrals of several forms along a path."""
    forms = list(forms)
    t, w = gauss_legendre(n)
    total = np.zeros(len(forms), complex)
    for piece in path.pieces:
        for lo, hi in _panels(piece, forms, tol, n):
            vals = _pull_matrix(piece, forms, lo + (hi - lo) * t)
            total += (hi - lo) * (w @ vals)
    return total


def integrate_form(path: LiftedPath, form: Form, tol: float = 1e-12) -> complex:
    return complex(integrate(path, [form], tol)[0])


def iterated_integral(path: LiftedPath, forms: Sequence[Form], tol: float = 1e-12,
                      n: int = 20) -> complex:
    """``int_path w1 ... wk`` for ``k <= 3`` (``k = 0`` gives 1)."""
    forms = list(forms)
    k = len(forms)
    if k == 0:
        return 1.0 + 0j
    if k > 3:
        raise ValueError("iterated integrals of length > 3 are not supported")
    t, w = gauss_legendre(n)
    S = running_matrix(n)
    state = np.zeros(k, complex)  # state[j] = int w1 ... w_{j+1} so far
    for piece in path.pieces:
        for lo, hi in _panels(piece, forms, tol, n):
            h = hi - lo
            vals = _pull_matrix(piece, forms, lo + h * t)
            run = None
            new_state = state.copy()
            for j in range(k):
                integrand = vals[:, j] if j == 0 else run * vals[:, j]
                new_state[j] = state[j] + h * (w @ integrand)
                run = state[j] + h * (S @ integrand)
            state = new_state
    return complex(state[-1])


def iterated_integrals_all(path: LiftedPath, forms: Sequence[Form], tol: float = 1e-12,
                           n: int = 20) -> np.ndarray:
    """Matrix ``M[i, j] = int_path w_i w_j`` for all pairs, in one pass."""
    forms = list(forms)
    m = len(forms)
    t, w = gauss_legendre(n)
    S = running_matrix(n)
    first = np.zeros(m, complex)
    second = np.zeros((m, m), complex)
    for piece in path.pieces:
        for lo, hi in _panels(piece, forms, tol, n):
            h = hi - lo
            vals = _pull_matrix(piece, forms, lo + h * t)
            run = first[None, :] + h * (S @ vals)       # (n, m)
            second += h * np.einsum("q,qi,qj->ij", w, run, vals)
            first += h * (w @ vals)
    return second


# ---------------------------------------------------------------------------
# the arc gamma = f^{-1}[0, inf] and the disc double integral
# ---------------------------------------------------------------------------


def trace_gamma(model, f: RationalX, zero, pole, sheet: int = 1) -> LiftedPath:
    """Lift of the arc of ``f^{-1}([0, inf])`` from ``zero`` to ``pole`` on one sheet."""
    seg = Traced(f, zero, pole)
    return LiftedPath.lift(model, [seg], sheet=sheet)


def disc_integral(path: LiftedPath, phi: Form, psi: Form, tol: float = 1e-10) -> complex:
    """``int_{[0,1]^2} F^*(phi (x) psi) ds dt`` for the triangle map of the arc.

    ``F(s, t) = (gamma(t), gamma(t (1 - s) / (1 - s (1 - t))))``.  The path must
    consist of a single segment.  The result equals the iterated integral
    ``int_{gamma^-} phi psi``.
    """
    from .quad import adaptive_2d

    if len(path.pieces) != 1:
        raise PathError("disc integral needs a single-segment arc")
    piece = path.pieces[0]

    def g(form, u):
        return form.pull(piece.x(u), piece.y(u), piece.dx(u))

    def integrand(s, t):
        den = 1 - s * (1 - t)
        b = t * (1 - s) / den
        jac = t ** 2 / den ** 2
        return g(phi, t) * g(psi, b) * jac

    res = adaptive_2d(integrand, [0, 1], [0, 1], singular=[(1.0, 0.0)], tol=tol)
    return complex(res.value)


# ---------------------------------------------------------------------------
# entry points under their conventional names
# ---------------------------------------------------------------------------


def lift_path(model, segments: Sequence[Segment], start=None) -> LiftedPath:
    """Lift an x-path starting at the curve point ``start`` (``CurvePoint`` or y value)."""
    if start is None:
        return LiftedPath.lift(model, segments)
    y0 = getattr(start, "y", start)
    if abs(y0) == 0:
        return LiftedPath.lift(model, segments)
    return LiftedPath.lift(model, segments, y0=complex(y0))


def integrate_1form(path: LiftedPath, form: Form, tol: float = 1e-12) -> complex:
    return integrate_form(path, form, tol)


def disc_double_integral(path: LiftedPath, phi: Form, psi: Form, tol: float = 1e-10) -> complex:
    return disc_integral(path, phi, psi, tol)
