"""Exact q-expansions of Delta, Delta_N and E_N, and cusp divisors on X_0(N).

Coefficients are Python ``int`` or ``Fraction``; no floating point.  A series
is ``q^val * (c_0 + c_1 q + ...)`` known modulo ``q^prec`` (absolute
precision).  Every ``Delta(k z)`` with ``k = N/d`` is an integral power
series in ``q``, so no fractional exponents ever appear.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from sympy import divisors, factorint


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# arithmetic helpers
# ---------------------------------------------------------------------------


def prime_factors(n: int) -> list[int]:
    return sorted(factorint(n))


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorint(n).values())


def mobius(n: int) -> int:
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def sigma1(n: int) -> int:
    return sum(divisors(n))


def _require_squarefree(N: int) -> None:
    if not isinstance(N, int) or N < 1 or not is_squarefree(N):
        raise PreconditionError(f"N must be a squarefree positive integer, got {N!r}")


# ---------------------------------------------------------------------------
# truncated q-series
# ---------------------------------------------------------------------------


class QSeries:
    """``q^val * sum c_n q^n`` known modulo ``q^prec``."""

    __slots__ = ("val", "coeffs", "prec")

    def __init__(self, coeffs: Sequence, val: int = 0, prec: int | None = None):
        coeffs = list(coeffs)
        if prec is None:
            prec = val + len(coeffs)
        n = max(prec - val, 0)
        coeffs = (coeffs + [0] * n)[:n]
        # normalise so that coeffs[0] != 0 when possible
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if k == len(coeffs):
            self.val, self.coeffs, self.prec = prec, [], prec
            return
        self.val = val + k
        self.coeffs = coeffs[k:]
        self.prec = prec

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls([1], 0, prec)

    @property
    def rel_prec(self) -> int:
        return self.prec - self.val

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, n: int):
        """Coefficient of ``q^n`` (must be below the precision)."""
        if n >= self.prec:
            raise IndexError(f"q^{n} is beyond the precision O(q^{self.prec})")
        i = n - self.val
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def leading(self):
        if not self.coeffs:
            raise ZeroDivisionError("series is zero to the known precision")
        return self.val, self.coeffs[0]

    def as_list(self, start: int = 0, stop: int | None = None) -> list:
        stop = self.prec if stop is None else min(stop, self.prec)
        return [self[n] for n in range(start, stop)]

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:6]):
            terms.append(f"{c}*q^{self.val + i}")
        return "QSeries(" + " + ".join(terms) + f" + O(q^{self.prec}))"

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        p = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        return all(self[n] == other[n] for n in range(lo, p))

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other], 0, self.prec)
        p = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        return QSeries([self[n] + other[n] for n in range(lo, p)], lo, p)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.val, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        return QSeries([c * a for a in self.coeffs], self.val, self.prec)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            v = self.val + other.val
            return QSeries([], v, v)
        n = min(self.rel_prec, other.rel_prec)
        a, b = self.coeffs[:n], other.coeffs[:n]
        out = [0] * n
        for i, ai in enumerate(a):
            if ai:
                for j in range(n - i):
                    bj = b[j] if j < len(b) else 0
                    if bj:
                        out[i + j] += ai * bj
        v = self.val + other.val
        return QSeries(out, v, v + n)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        v, c0 = self.leading()
        n = self.rel_prec
        a = self.coeffs
        inv0 = Fraction(1, 1) / c0 if not (c0 in (1, -1)) else c0
        out = [inv0]
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                if j < len(a) and a[j]:
                    s += a[j] * out[k - j]
            out.append(-s * inv0)
        out = [_demote(c) for c in out]
        return QSeries(out, -v, -v + n)

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        # keep relative precision while shifting valuation
        base = QSeries(self.coeffs, 0, self.rel_prec)
        acc = QSeries.one(self.rel_prec)
        k = e
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return QSeries(acc.coeffs, acc.val + e * self.val, acc.prec + e * self.val)

    def substitute(self, k: int) -> "QSeries":
        """``q -> q^k``."""
        if k < 1:
            raise ValueError("substitution power must be positive")
        out = []
        for i, c in enumerate(self.coeffs):
            out.append(c)
            if i < len(self.coeffs) - 1:
                out.extend([0] * (k - 1))
        return QSeries(out, self.val * k, self.prec * k)

    def q_derivative(self) -> "QSeries":
        """``q d/dq``."""
        return QSeries([(self.val + i) * c for i, c in enumerate(self.coeffs)], self.val, self.prec)

    def truncate(self, prec: int) -> "QSeries":
        return QSeries(self.coeffs, self.val, min(prec, self.prec))


def _demote(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


# ---------------------------------------------------------------------------
# Delta and Delta_N
# ---------------------------------------------------------------------------


def euler_product(M: int) -> QSeries:
    """``prod (1 - q^n)`` to ``O(q^M)`` via the pentagonal number theorem."""
    c = [0] * M
    k = 0
    while True:
        done = True
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e < M:
                c[e] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    return QSeries(c, 0, M)


def delta_series(M: int) -> QSeries:
    """``q prod (1-q^n)^24`` modulo ``q^M``."""
    if M < 1:
        raise PreconditionError("M must be >= 1")
    P = euler_product(M) ** 24
    return QSeries(P.coeffs, 1, M)


def delta_N_series(N: int, M: int) -> QSeries:
    """``prod_{d | N} Delta(N z / d)^{mu(d)}`` modulo ``q^M``."""
    _require_squarefree(N)
    lead = sum(mobius(d) * (N // d) for d in divisors(N))
    # each factor Delta(k z) = q^k E(q^k)^24, so work with the unit parts
    rel = M - lead
    if rel <= 0:
        return QSeries([], M, M)
    E = euler_product(rel) ** 24
    unit = QSeries.one(rel)
    for d in divisors(N):
        mu = mobius(d)
        if mu == 0:
            continue
        k = N // d
        f = E.substitute(k).truncate(rel)
        unit = unit * (f if mu == 1 else f.inverse())
    return QSeries(unit.coeffs, lead, M)


def leading_exponent(N: int) -> int:
    _require_squarefree(N)
    return sum(mobius(d) * (N // d) for d in divisors(N))


# ---------------------------------------------------------------------------
# cusp divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspDivisor:
    """Integer combination of the cusps ``P_d = [1/d]`` of ``X_0(N)``."""
    N: int
    coeffs: tuple  # pairs (d, c), d | N

    @classmethod
    def from_dict(cls, N: int, d: dict) -> "CuspDivisor":
        return cls(N, tuple(sorted((k, v) for k, v in d.items() if v != 0)))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def degree(self) -> int:
        return sum(c for _, c in self.coeffs)

    def __add__(self, other: "CuspDivisor") -> "CuspDivisor":
        out = self.as_dict()
        for d, c in other.coeffs:
            out[d] = out.get(d, 0) + c
        return CuspDivisor.from_dict(self.N, out)

    def scale(self, k: int) -> "CuspDivisor":
        return CuspDivisor.from_dict(self.N, {d: k * c for d, c in self.coeffs})

    def __eq__(self, other):
        return isinstance(other, CuspDivisor) and self.N == other.N and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.N, self.coeffs))

    def __str__(self):
        return " + ".join(f"{c}*P_{d}" for d, c in self.coeffs) or "0"


def div_delta_N(N: int) -> CuspDivisor:
    """``prod_{p|N}(p-1) * sum_{d|N} mu(N/d) P_d``."""
    _require_squarefree(N)
    k = 1
    for p in prime_factors(N):
        k *= p - 1
    return CuspDivisor.from_dict(N, {d: k * mobius(N // d) for d in divisors(N)})


def cusp_width(N: int, d: int) -> int:
    """Width of the cusp ``1/d`` on ``X_0(N)``; equals ``N/d`` for squarefree ``N``."""
    return N // gcd(d * d, N)


def eta_quotient_order(N: int, d: int, r: dict) -> Fraction:
    """Order at the cusp ``1/d`` of ``prod eta(delta z)^{r_delta}`` on ``X_0(N)``.

    Measured in the local parameter at the cusp (Ligozat's formula).
    """
    s = Fraction(0)
    for delta, rd in r.items():
        s += Fraction(gcd(d, delta) ** 2 * rd, delta)
    return Fraction(N, 24) * s / (gcd(d, N // d) * d)


def delta_N_eta_exponents(N: int) -> dict:
    """``Delta_N`` as an eta quotient: ``r_delta = 24 mu(N/delta)``."""
    _require_squarefree(N)
    return {delta: 24 * mobius(N // delta) for delta in divisors(N)}


def div_delta_N_ligozat(N: int) -> CuspDivisor:
    """Divisor of ``Delta_N`` from the eta-quotient order formula."""
    r = delta_N_eta_exponents(N)
    out = {}
    for d in divisors(N):
        o = eta_quotient_order(N, d, r)
        if o.denominator != 1:
            raise ArithmeticError(f"non-integral order {o} at cusp 1/{d}")
        out[d] = int(o)
    return CuspDivisor.from_dict(N, out)


# Convention table: cusp P_d = [1/d]; P_N is equivalent to infinity and P_1 to 0.
# For squarefree N the width of [1/d] is N/d, so the local parameter at infinity
# is q itself and the q-order of Delta_N equals the P_N coefficient.
CUSP_CONVENTION = {
    "P_d": "[1/d]",
    "infinity": "P_N",
    "zero": "P_1",
    "width(P_d)": "N/d",
}


# ---------------------------------------------------------------------------
# the decomposition into simple units
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaDecomposition:
    N: int
    p0: int
    kappa: int
    lambdas: tuple  # pairs (d, Lambda_d), d | N/p0
    lhs: CuspDivisor   # kappa * div(Delta_N)
    rhs: CuspDivisor   # sum Lambda_d (P_d - P_{d p0})

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def lambda_decomposition(N: int, p0: int | None = None) -> LambdaDecomposition:
    _require_squarefree(N)
    ps = prime_factors(N)
    if p0 is None:
        if not ps:
            raise PreconditionError("N = 1 has no prime divisor")
        p0 = ps[0]
    if p0 not in ps:
        raise PreconditionError(f"p0 = {p0} is not a prime divisor of N = {N}")
    others = [p for p in ps if p != p0]
    kappa = 1
    prod = 1
    for p in others:
        kappa *= p + 1
        prod *= p * p - 1
    lams = []
    rhs = {}
    for d in divisors(N // p0):
        L = (p0 - 1) * mobius(N // d) * prod
        lams.append((d, L))
        rhs[d] = rhs.get(d, 0) + L
        rhs[d * p0] = rhs.get(d * p0, 0) - L
    lhs = div_delta_N(N).scale(kappa)
    return LambdaDecomposition(N, p0, kappa, tuple(lams), lhs, CuspDivisor.from_dict(N, rhs))


# ---------------------------------------------------------------------------
# Eisenstein series
# ---------------------------------------------------------------------------


def E2_series(M: int) -> QSeries:
    """``1 - 24 sum sigma_1(n) q^n`` modulo ``q^M``."""
    return QSeries([1] + [-24 * sigma1(n) for n in range(1, M)], 0, M)


def eisenstein_EN(N: int, M: int) -> QSeries:
    """``E_N = (q d/dq Delta_N) / Delta_N`` modulo ``q^M``."""
    _require_squarefree(N)
    lead = leading_exponent(N)
    D = delta_N_series(N, M + lead)
    if D.is_zero():
        raise ArithmeticError("Delta_N vanishes to the working precision")
    return (D.q_derivative() / D).truncate(M)


def eisenstein_EN_combination(N: int, M: int) -> QSeries:
    """``sum_{d|N} mu(d) (N/d) E_2((N/d) z)`` modulo ``q^M``."""
    _require_squarefree(N)
    E2 = E2_series(M)
    total = QSeries([0], 0, M)
    for d in divisors(N):
        mu = mobius(d)
        if mu:
            k = N // d
            total = total + E2.substitute(k).truncate(M).scale(mu * k)
    return total
