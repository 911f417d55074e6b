"""Divisors, factored functions, tame symbols and cycles ``sum (C_i, f_i)`` on ``C x C``.

Points are exact labels.  On a hyperelliptic model ``y^2 = h(x)`` a finite
place is ``Place(a, s)`` with ``a`` an exact algebraic number and ``s`` the
sign of ``y = s * sqrt(h(a))`` (``s = 0`` at a branch point).  Infinity is
``Place(None, 0)`` for odd degree and ``Place(None, +-1)`` for even degree.
Without a model, places are points of the projective x-line and the sign
is always 0.  Any other hashable object (for instance ``Cusp``) can be used
as an abstract label in a ``Divisor``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from fractions import Fraction
from typing import Callable, Hashable, Iterable

import sympy as sp

from .curve import CurvePoint, HyperellipticModel
from .paths import RationalX


class DegenerateError(ValueError):
    """The function vanishes identically or the request is degenerate."""


class SymbolError(ValueError):
    """A tame symbol cannot be evaluated for the given data."""


class DecompositionError(ValueError):
    """Precondition of a decomposition is violated."""


# ---------------------------------------------------------------------------
# places and divisors
# ---------------------------------------------------------------------------


def _exact(a):
    if a is None:
        return None
    if isinstance(a, sp.Basic):
        return a
    if isinstance(a, (int, Fraction)):
        return sp.Rational(a)
    # floats are snapped to nearby simple numbers
    return sp.nsimplify(a)


def _canon(v):
    """Exact canonical form; never approximates."""
    v = sp.sympify(v)
    if v.is_Rational:
        return v
    return sp.radsimp(sp.simplify(v))


@dataclass(frozen=True, repr=False)
class Place:
    x: object = None
    sign: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", _exact(self.x))

    @property
    def at_infinity(self) -> bool:
        return self.x is None

    def point(self, model: HyperellipticModel | None = None) -> CurvePoint:
        if self.x is None:
            return CurvePoint(None, 0j)
        if model is None or self.sign == 0:
            return CurvePoint(self.x, 0j)
        return model.point(complex(self.x), self.sign)

    def __str__(self):
        if self.x is None:
            return "inf" if self.sign == 0 else f"inf{'+' if self.sign > 0 else '-'}"
        s = {0: "", 1: "+", -1: "-"}[self.sign]
        return f"({self.x}{',' + s if s else ''})"

    __repr__ = __str__

    def sort_key(self):
        if self.x is None:
            return (1, 0.0, 0.0, self.sign)
        z = complex(self.x)
        return (0, z.real, z.imag, self.sign)


@dataclass(frozen=True, repr=False)
class Cusp:
    """The cusp ``P_d = [1/d]`` of ``X_0(N)``, an abstract label."""
    N: int
    d: int

    def __str__(self):
        return f"P_{self.d}"

    __repr__ = __str__

    def sort_key(self):
        return (0, self.d, 0.0, 0)


def _key(p):
    k = getattr(p, "sort_key", None)
    return k() if k else (2, str(p), 0.0, 0)


class Divisor:
    """Finite integer combination of hashable points."""

    def __init__(self, terms=None):
        c = Counter()
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for p, n in items:
                c[p] += int(n)
        self.c = {p: n for p, n in c.items() if n != 0}

    def degree(self) -> int:
        return sum(self.c.values())

    def support(self) -> list:
        return sorted(self.c, key=_key)

    def __getitem__(self, p) -> int:
        return self.c.get(p, 0)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(list(self.c.items()) + list(other.c.items()))

    def __neg__(self) -> "Divisor":
        return Divisor({p: -n for p, n in self.c.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor({p: k * n for p, n in self.c.items()})

    def __mul__(self, k: int) -> "Divisor":
        return k * self

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def is_zero(self) -> bool:
        return not self.c

    def positive(self) -> list:
        return [(p, self.c[p]) for p in self.support() if self.c[p] > 0]

    def negative(self) -> list:
        return [(p, self.c[p]) for p in self.support() if self.c[p] < 0]

    def map(self, fn: Callable) -> "Divisor":
        return Divisor([(fn(p), n) for p, n in self.c.items()])

    def __str__(self):
        if not self.c:
            return "0"
        return " + ".join(f"{n}*{p}" for p, n in ((p, self.c[p]) for p in self.support()))

    __repr__ = __str__

    @classmethod
    def from_cusps(cls, cd) -> "Divisor":
        """Convert a modular ``CuspDivisor``."""
        return cls({Cusp(cd.N, d): c for d, c in cd.coeffs})


# ---------------------------------------------------------------------------
# factored functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredFunction:
    """``const * prod (x - a)^e * y^ypow`` on a model (or on the x-line if ``model`` is None)."""

    const: object
    factors: tuple = ()         # ((a, e), ...) with exact a
    ypow: int = 0
    model: HyperellipticModel | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        merged = Counter()
        for a, e in self.factors:
            merged[_exact(a)] += int(e)
        fs = tuple(sorted(((a, e) for a, e in merged.items() if e != 0),
                          key=lambda t: (complex(t[0]).real, complex(t[0]).imag)))
        object.__setattr__(self, "factors", fs)
        object.__setattr__(self, "const", _exact(self.const))
        if self.ypow and self.model is None:
            raise SymbolError("y-powers need a curve model")

    @classmethod
    def linear(cls, a, model=None) -> "FactoredFunction":
        return cls(1, ((a, 1),), 0, model)

    def __mul__(self, other: "FactoredFunction") -> "FactoredFunction":
        return FactoredFunction(self.const * other.const, self.factors + other.factors,
                                self.ypow + other.ypow, self.model or other.model)

    def __pow__(self, e: int) -> "FactoredFunction":
        return FactoredFunction(self.const ** e, tuple((a, k * e) for a, k in self.factors),
                                self.ypow * e, self.model)

    def inverse(self) -> "FactoredFunction":
        return self ** -1

    def scaled(self, c) -> "FactoredFunction":
        return FactoredFunction(self.const * _exact(c), self.factors, self.ypow, self.model)

    def value(self, P: Place):
        """Exact value at a finite place where the function is regular and nonzero."""
        if P.at_infinity:
            raise SymbolError("use local_data at infinity")
        v = self.const
        for a, e in self.factors:
            v = v * (P.x - a) ** e
        if self.ypow:
            v = v * _y_value(self.model, P) ** self.ypow
        return _canon((v))

    def to_rationalx(self) -> RationalX:
        if self.ypow:
            raise SymbolError("not a function of x alone")
        return RationalX(complex(self.const), tuple((complex(a), e) for a, e in self.factors))

    def __str__(self):
        s = str(self.const)
        for a, e in self.factors:
            s += f"*(x - {a})" + (f"^{e}" if e != 1 else "")
        if self.ypow:
            s += f"*y^{self.ypow}"
        return s


def _is_root(model: HyperellipticModel, a) -> bool:
    return sp.simplify(model.hpoly.as_expr().subs(model.x, a)) == 0


def _y_value(model: HyperellipticModel, P: Place):
    if P.sign == 0:
        return sp.Integer(0)
    return P.sign * sp.sqrt(model.hpoly.as_expr().subs(model.x, P.x))


def places_over(model: HyperellipticModel | None, a) -> list[Place]:
    """Places with ``x = a`` (``a = None`` is infinity)."""
    if model is None:
        return [Place(a, 0)]
    if a is None:
        return [Place(None, 0)] if model.odd else [Place(None, 1), Place(None, -1)]
    a = _exact(a)
    if _is_root(model, a):
        return [Place(a, 0)]
    return [Place(a, 1), Place(a, -1)]


def local_data(f: FactoredFunction, P: Place):
    """``(ord_P f, u)`` where ``f = u * t^ord + ...`` in the chosen uniformiser ``t``.

    Uniformisers: ``x - a`` at ordinary finite places and on the line,
    ``1/x`` at infinity on the line and at the two infinite places of an
    even model, ``y`` at finite branch points, ``x^g / y`` at infinity of an
    odd model.
    """
    model = f.model
    if f.const == 0:
        raise DegenerateError("function vanishes identically")
    order, unit = 0, f.const
    if P.at_infinity:
        if model is None or not model.odd:
            # every x - a is t^-1 (1 - a t); y ~ s sqrt(lc) x^(g+1)
            for a, e in f.factors:
                order -= e
            if f.ypow:
                g1 = model.degree // 2
                order -= g1 * f.ypow
                unit = unit * (P.sign * sp.sqrt(model.coeffs[-1])) ** f.ypow
            return order, _canon(unit)
        lc = model.coeffs[-1]
        g = model.genus
        # x = t^-2 / lc + ..., y = x^g / t
        for a, e in f.factors:
            order -= 2 * e
            unit = unit * lc ** (-e)
        if f.ypow:
            order -= (2 * g + 1) * f.ypow
            unit = unit * lc ** (-g * f.ypow)
        return order, _canon(unit)
    branch = model is not None and P.sign == 0
    for a, e in f.factors:
        if sp.simplify(P.x - a) == 0:
            if branch:
                # x - e = y^2 / h'(e) + ...
                order += 2 * e
                unit = unit * model.hpoly.diff(model.x).as_expr().subs(model.x, a) ** (-e)
            else:
                order += e
        else:
            unit = unit * (P.x - a) ** e
    if f.ypow:
        if branch:
            order += f.ypow
        else:
            unit = unit * _y_value(model, P) ** f.ypow
    return order, _canon((unit))


def divisor_of(model: HyperellipticModel | None, f: FactoredFunction) -> Divisor:
    """Exact divisor, including the places at infinity."""
    if model is not None and f.model is None:
        f = FactoredFunction(f.const, f.factors, f.ypow, model)
    if f.const == 0:
        raise DegenerateError("function vanishes identically on the curve")
    cand = set()
    for a, _ in f.factors:
        cand.update(places_over(model, a))
    cand.update(places_over(model, None))
    if f.ypow:
        for r in model._roots_exact.values():
            cand.update(places_over(model, r))
    return Divisor({P: local_data(f, P)[0] for P in cand})


def tame_symbol(f: FactoredFunction, g: FactoredFunction, P: Place):
    """``(-1)^(ab) f^b / g^a`` at ``P`` with ``a = ord_P f`` and ``b = ord_P g``."""
    a, uf = local_data(f, P)
    b, ug = local_data(g, P)
    if uf == 0 or ug == 0:
        raise SymbolError("indeterminate limit")
    return _canon((sp.Integer(-1) ** (a * b) * uf ** b / ug ** a))


def tame_symbol_map(f: FactoredFunction, g: FactoredFunction) -> dict:
    """Tame symbol at every place of ``supp div f + supp div g``; trivial entries omitted."""
    model = f.model or g.model
    if model is not None:
        f = FactoredFunction(f.const, f.factors, f.ypow, model)
        g = FactoredFunction(g.const, g.factors, g.ypow, model)
    places = set(divisor_of(model, f).support()) | set(divisor_of(model, g).support())
    out = {}
    for P in sorted(places, key=_key):
        v = tame_symbol(f, g, P)
        if v != 1:
            out[P] = v
    return out


# ---------------------------------------------------------------------------
# cycles on C x C
# ---------------------------------------------------------------------------


class AbstractFunction:
    """A function known only through its divisor (e.g. a modular unit)."""

    def __init__(self, name: str, divisor: Divisor):
        self.name = name
        self._div = divisor

    def divisor(self) -> Divisor:
        return self._div

    def __pow__(self, e: int) -> "AbstractFunction":
        return AbstractFunction(f"{self.name}^{e}" if e != 1 else self.name, e * self._div)

    def __str__(self):
        return self.name


def function_divisor(fn) -> Divisor:
    if isinstance(fn, FactoredFunction):
        return divisor_of(fn.model, fn)
    return fn.divisor()


COMPONENT_KINDS = ("diag", "first", "second", "generic")


@dataclass
class Component:
    """``(curve, function, multiplicity)``.

    ``kind="diag"`` is the diagonal, ``"first"`` is ``{point} x C``,
    ``"second"`` is ``C x {point}``; ``"generic"`` components carry an
    explicit embedding ``embed`` of places into ``C x C``.
    """
    kind: str
    function: object
    mult: int = 1
    point: Hashable | None = None
    embed: Callable | None = None

    def __post_init__(self):
        if self.kind not in COMPONENT_KINDS:
            raise ValueError(f"unknown component kind {self.kind!r}")

    def divisor(self) -> Divisor:
        D = function_divisor(self.function)
        if self.kind == "diag":
            emb = lambda p: (p, p)
        elif self.kind == "first":
            emb = lambda p: (self.point, p)
        elif self.kind == "second":
            emb = lambda p: (p, self.point)
        else:
            emb = self.embed
        return self.mult * D.map(emb)

    def __str__(self):
        curve = {"diag": "Delta", "first": f"{self.point} x C",
                 "second": f"C x {self.point}", "generic": "C_i"}[self.kind]
        return f"{self.mult}*({curve}, {self.function})"


@dataclass
class CycleElement:
    components: list
    N: int | None = None
    meta: dict = field(default_factory=dict)

    def witness(self) -> Divisor:
        total = Divisor()
        for c in self.components:
            total = total + c.divisor()
        return total

    def without(self, k: int) -> "CycleElement":
        return CycleElement(self.components[:k] + self.components[k + 1:], self.N, dict(self.meta))

    def __str__(self):
        return " + ".join(str(c) for c in self.components)


def cocycle_check(Z: CycleElement) -> tuple[bool, Divisor]:
    """Exact check of ``sum div f_i = 0``; returns ``(ok, witness)``."""
    w = Z.witness()
    return w.is_zero(), w


def build_Z_QR(model: HyperellipticModel, Q: Place, R: Place, P: Place,
               check_tol: float = 1e-12) -> CycleElement:
    """``(C x Q, 1/f) + (Delta, f) + (R x C, 1/f)`` with ``div f = N Q - N R`` and ``f(P) = 1``.

    Q and R must be Weierstrass points; ``f = c (x - x_Q) / (x - x_R)``
    (``c (x - x_Q)`` when R is infinity), so ``N = 2``.
    """
    if Q == R:
        raise DegenerateError("Q = R")
    for W in (Q, R):
        if W.sign != 0 or (W.at_infinity and not model.odd):
            raise DecompositionError(f"{W} is not a Weierstrass point")
    if Q.at_infinity:
        raise DecompositionError("Q at infinity is not supported; swap Q and R and invert")
    if not _is_root(model, Q.x) or (not R.at_infinity and not _is_root(model, R.x)):
        raise DecompositionError("Q and R must be branch points")
    factors = ((Q.x, 1),) if R.at_infinity else ((Q.x, 1), (R.x, -1))
    f0 = FactoredFunction(1, factors, 0, model)
    if P.at_infinity or P in (Q, R):
        raise DegenerateError("P must be a finite point distinct from Q and R")
    c = 1 / f0.value(P)
    f = f0.scaled(c)
    if abs(complex(f.value(P)) - 1) > check_tol:
        raise DegenerateError("normalisation f(P) = 1 failed")
    D = divisor_of(model, f)
    N = D[Q]
    if D != N * Divisor({Q: 1, R: -1}):
        raise DecompositionError(f"unexpected divisor {D}")
    finv = f.inverse()
    Z = CycleElement([Component("second", finv, 1, Q), Component("diag", f, 1),
                      Component("first", finv, 1, R)], N=N,
                     meta={"f": f, "Q": Q, "R": R, "P": P})
    ok, w = cocycle_check(Z)
    if not ok:
        raise DecompositionError(f"cocycle condition fails: {w}")
    return Z


# ---------------------------------------------------------------------------
# simple-function decomposition
# ---------------------------------------------------------------------------


@dataclass
class SimplePair:
    Q: Hashable
    R: Hashable
    m: int          # multiplicity of Q - R in the greedy pairing
    N: int          # order of Q - R (f_QR has divisor N Q - N R)
    e: int          # exponent of f_QR in f^k

    def divisor(self) -> Divisor:
        return self.e * self.N * Divisor({self.Q: 1, self.R: -1})


@dataclass
class Decomposition:
    pairs: list
    k: int
    D: Divisor

    def conserved(self) -> bool:
        total = Divisor()
        for p in self.pairs:
            total = total + p.divisor()
        return total == self.k * self.D


def _lcm(a, b):
    return a * b // gcd(a, b)


def decompose_simple(D: Divisor, orders=1) -> Decomposition:
    """Greedy pairing of positive with negative points.

    ``orders`` gives the order ``N`` of ``Q - R`` in the Jacobian: an int,
    a dict keyed by ``(Q, R)`` or a callable.  The default 1 treats every
    ``Q - R`` as principal (the genus-0 case).  The exponent is
    ``k = lcm N/gcd(N, m)`` and ``f^k = prod f_QR^(k m / N)``.
    """
    if D.degree() != 0:
        raise DecompositionError(f"degree {D.degree()} != 0")
    pos = [[p, n] for p, n in D.positive()]
    neg = [[p, -n] for p, n in D.negative()]
    raw = []
    i = j = 0
    while i < len(pos) and j < len(neg):
        m = min(pos[i][1], neg[j][1])
        raw.append((pos[i][0], neg[j][0], m))
        pos[i][1] -= m
        neg[j][1] -= m
        if pos[i][1] == 0:
            i += 1
        if neg[j][1] == 0:
            j += 1

    def order(Q, R):
        if callable(orders):
            return int(orders(Q, R))
        if isinstance(orders, dict):
            return int(orders.get((Q, R), orders.get((R, Q), 1)))
        return int(orders)

    k = 1
    Ns = []
    for Q, R, m in raw:
        N = order(Q, R)
        Ns.append(N)
        k = _lcm(k, N // gcd(N, m))
    pairs = [SimplePair(Q, R, m, N, k * m // N) for (Q, R, m), N in zip(raw, Ns)]
    dec = Decomposition(pairs, k, D)
    if not dec.conserved():
        raise DecompositionError("decomposition does not conserve the divisor")
    return dec


def build_Z_f(f, dec: Decomposition, simple: Callable | None = None) -> CycleElement:
    """``k (Delta, f) - sum [(Q x C, f_QR^e) + (C x R, f_QR^e)]``.

    ``simple(Q, R, N)`` returns a function with divisor ``N Q - N R``;
    by default an abstract function carrying that divisor is used.
    """
    if function_divisor(f) != dec.D:
        raise DecompositionError("decomposition does not match div f")
    comps = [Component("diag", f, dec.k)]
    for p in dec.pairs:
        base = (simple(p.Q, p.R, p.N) if simple else
                AbstractFunction(f"f_{p.Q}{p.R}", p.N * Divisor({p.Q: 1, p.R: -1})))
        if function_divisor(base) != p.N * Divisor({p.Q: 1, p.R: -1}):
            raise DecompositionError(f"simple function for ({p.Q}, {p.R}) has wrong divisor")
        g = base ** p.e
        comps.append(Component("first", g, -1, p.Q))
        comps.append(Component("second", g, -1, p.R))
    Z = CycleElement(comps, meta={"k": dec.k})
    ok, w = cocycle_check(Z)
    if not ok:
        raise DecompositionError(f"cocycle condition fails: {w}")
    return Z


def weierstrass_simple(model: HyperellipticModel):
    """``simple`` callback for Weierstrass pairs: ``(x - x_Q)/(x - x_R)`` or ``x - x_Q``."""
    def make(Q: Place, R: Place, N: int):
        if N != 2:
            raise DecompositionError("Weierstrass differences have order 2")
        if Q.at_infinity:
            return FactoredFunction(1, ((R.x, -1),), 0, model)
        if R.at_infinity:
            return FactoredFunction(1, ((Q.x, 1),), 0, model)
        return FactoredFunction(1, ((Q.x, 1), (R.x, -1)), 0, model)
    return make


def weierstrass_places(model: HyperellipticModel) -> list[Place]:
    out = [Place(r, 0) for r in sorted(model._roots_exact.values(),
                                       key=lambda z: (complex(z).real, complex(z).imag))]
    if model.odd:
        out.append(Place(None, 0))
    return out


def canonical_divisor(model: HyperellipticModel) -> Divisor:
    """``div(dx / y) = div(dx) - div(y)`` from the ramification data."""
    W = weierstrass_places(model)
    finite = [P for P in W if not P.at_infinity]
    infs = places_over(model, None)
    if model.odd:
        # x has a double pole at infinity and ramifies there
        ddx = Divisor({P: 1 for P in finite}) + Divisor({infs[0]: -3})
    else:
        ddx = Divisor({P: 1 for P in finite}) + Divisor({P: -2 for P in infs})
    dy = divisor_of(model, FactoredFunction(1, (), 1, model))
    return ddx - dy
