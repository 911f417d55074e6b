"""Short exact sequences of finitely generated modules over Z or Q.

A module is the cokernel of a relation matrix: generators ``e_1..e_n`` and
relations given as integer (or rational) column vectors.  A map stores the
image of every source generator as a column.  All decisions (exactness,
splitting, congruence) go through the Smith normal form in
:mod:`hypreg.intlinalg`; nothing here touches floating point.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import intlinalg as la


class StructuralError(ValueError):
    """Inputs do not fit together (shapes, ends, diagram invariants)."""


def _tup(col, ring):
    conv = Fraction if ring == "Q" else la._as_int
    return tuple(conv(v) for v in col)


# ---------------------------------------------------------------------------
# modules and maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FGModule:
    ngens: int
    relations: tuple = ()  # tuple of columns, each of length ngens
    ring: str = "Z"

    def __post_init__(self):
        la.check_ring(self.ring)
        rels = tuple(_tup(c, self.ring) for c in self.relations)
        for c in rels:
            if len(c) != self.ngens:
                raise StructuralError("relation length differs from number of generators")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def free(cls, n: int, ring: str = "Z") -> "FGModule":
        return cls(n, (), ring)

    @classmethod
    def cyclic(cls, d: int, ring: str = "Z") -> "FGModule":
        return cls(1, ((d,),) if d else (), ring)

    @classmethod
    def from_matrix(cls, R, ring: str = "Z", ngens: int | None = None) -> "FGModule":
        n = len(R) if R else (ngens or 0)
        return cls(n, tuple(tuple(c) for c in la.columns(R)) if R and R[0] else (), ring)

    @property
    def R(self):
        """Relation matrix, ``ngens`` rows."""
        return la.from_columns([list(c) for c in self.relations], self.ngens)

    @property
    def nrels(self) -> int:
        return len(self.relations)

    def smith(self) -> la.SmithForm:
        return la.smith(self.R, self.ring, ncols=self.nrels)

    def invariants(self) -> tuple[tuple, int]:
        """(torsion invariants > 1, free rank)."""
        sf = self.smith()
        tors = tuple(d for d in sf.diag if d != 1)
        return tors, self.ngens - sf.rank

    def order(self):
        """Cardinality for finite modules over Z, else ``None``."""
        tors, free = self.invariants()
        if free or self.ring == "Q" and self.ngens > self.smith().rank:
            return None
        out = 1
        for d in tors:
            out *= int(d)
        return out

    def is_zero_elem(self, x: Sequence) -> bool:
        return la.in_span(self.R, list(x), self.ring) if self.nrels else all(v == 0 for v in x)

    def normal_form(self, x: Sequence) -> tuple:
        """Canonical coordinates of the class of ``x``."""
        sf = self.smith()
        y = la.matvec(sf.U, list(x)) if self.ngens else []
        out = []
        for i, v in enumerate(y):
            if i < sf.rank:
                d = sf.diag[i]
                if self.ring == "Q" or d == 1:
                    continue
                out.append(v % d)
            else:
                out.append(v)
        return tuple(out)

    def elements(self) -> list[list[int]]:
        """All elements of a finite Z-module, one representative each."""
        if self.ring != "Z" or self.order() is None:
            raise StructuralError("enumeration needs a finite abelian group")
        sf = self.smith()
        ranges = [range(int(d)) for d in sf.diag]
        reps = []
        for ys in itertools.product(*ranges):
            y = list(ys) + [0] * (self.ngens - len(ys))
            reps.append(la.matvec(sf.Uinv, y))
        return reps

    def direct_sum(self, other: "FGModule") -> "FGModule":
        _same_ring(self, other)
        n, m = self.ngens, other.ngens
        rels = [tuple(c) + (0,) * m for c in self.relations]
        rels += [(0,) * n + tuple(c) for c in other.relations]
        return FGModule(n + m, tuple(rels), self.ring)

    def quotient(self, cols: Iterable[Sequence]) -> "FGModule":
        """Quotient by the span of the given element columns (same generators)."""
        extra = tuple(tuple(c) for c in cols)
        return FGModule(self.ngens, self.relations + extra, self.ring)

    def to_dict(self) -> dict:
        return {"ngens": self.ngens, "relations": [[str(v) for v in c] for c in self.relations],
                "ring": self.ring}

    @classmethod
    def from_dict(cls, d: dict) -> "FGModule":
        conv = Fraction if d.get("ring", "Z") == "Q" else int
        return cls(d["ngens"], tuple(tuple(conv(v) for v in c) for c in d["relations"]),
                   d.get("ring", "Z"))


def _same_ring(*mods):
    rings = {m.ring for m in mods}
    if len(rings) > 1:
        raise StructuralError(f"mixed rings {rings}")


@dataclass(frozen=True)
class ModuleMap:
    source: FGModule
    target: FGModule
    images: tuple  # image column of each source generator

    def __post_init__(self):
        _same_ring(self.source, self.target)
        ims = tuple(_tup(c, self.target.ring) for c in self.images)
        if len(ims) != self.source.ngens:
            raise StructuralError("need one image per source generator")
        for c in ims:
            if len(c) != self.target.ngens:
                raise StructuralError("image length differs from target generators")
        object.__setattr__(self, "images", ims)
        if not self.respects_relations():
            raise StructuralError("map does not send relations to relations")

    @classmethod
    def from_matrix(cls, source, target, M) -> "ModuleMap":
        if source.ngens == 0:
            return cls(source, target, ())
        if target.ngens == 0:
            return cls(source, target, tuple(() for _ in range(source.ngens)))
        return cls(source, target, tuple(tuple(c) for c in la.columns(M)))

    @classmethod
    def zero(cls, source, target) -> "ModuleMap":
        return cls(source, target, tuple((0,) * target.ngens for _ in range(source.ngens)))

    @classmethod
    def identity(cls, M: FGModule) -> "ModuleMap":
        return cls.from_matrix(M, M, la.identity(M.ngens, M.ring))

    @property
    def M(self):
        """Matrix with ``target.ngens`` rows and ``source.ngens`` columns."""
        return la.from_columns([list(c) for c in self.images], self.target.ngens)

    def __call__(self, x: Sequence) -> list:
        out = [0] * self.target.ngens
        for xi, col in zip(x, self.images):
            if xi:
                out = [o + xi * c for o, c in zip(out, col)]
        return out

    def respects_relations(self) -> bool:
        if not self.source.nrels:
            return True
        ims = [self(c) for c in self.source.relations]
        return all(self.target.is_zero_elem(v) for v in ims)

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self o other``."""
        if other.target != self.source:
            raise StructuralError("compose: middle modules differ")
        return ModuleMap(other.source, self.target, tuple(tuple(self(c)) for c in other.images))

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, tuple(tuple(-v for v in c) for c in self.images))

    def is_zero(self) -> bool:
        return all(self.target.is_zero_elem(c) for c in self.images)

    def equals(self, other: "ModuleMap") -> bool:
        if (self.source, self.target) != (other.source, other.target):
            return False
        return all(self.target.is_zero_elem([a - b for a, b in zip(c1, c2)])
                   for c1, c2 in zip(self.images, other.images))

    def kernel_gens(self) -> list[list]:
        """Generators (as source columns) of the kernel."""
        n = self.source.ngens
        if n == 0:
            return []
        A = la.hstack(self.M, self.target.R) if self.target.ngens else [[] for _ in range(0)]
        if self.target.ngens == 0:
            return [list(c) for c in la.identity(n, self.source.ring)]
        K = la.kernel(A, self.source.ring, ncols=n + self.target.nrels)
        return [c[:n] for c in la.columns(K)] if K and K[0] else []

    def to_dict(self) -> dict:
        return {"images": [[str(v) for v in c] for c in self.images]}


def submodule(M: FGModule, gens: Sequence[Sequence]):
    """The submodule of ``M`` spanned by ``gens``.

    Returns ``(S, incl)`` where ``S`` has one generator per lattice basis
    vector of ``span(gens) + im(R)`` and ``incl: S -> M`` is the inclusion.
    """
    cols = [list(g) for g in gens] + [list(c) for c in M.relations]
    if not cols:
        S = FGModule(0, (), M.ring)
        return S, ModuleMap(S, M, ())
    L = la.from_columns(cols, M.ngens)
    B = la.column_basis(L, M.ring, nrows=M.ngens)
    k = len(B[0]) if B and B[0] else 0
    if k == 0:
        S = FGModule(0, (), M.ring)
        return S, ModuleMap(S, M, ())
    if M.nrels:
        X = la.solve_matrix(B, M.R, M.ring)
        rels = tuple(tuple(c) for c in la.columns(X)) if X and X[0] else ()
    else:
        rels = ()
    S = FGModule(k, rels, M.ring)
    return S, ModuleMap(S, M, tuple(tuple(c) for c in la.columns(B)))


def coords_in(incl: ModuleMap, x: Sequence) -> list:
    """Coordinates of ``x`` (in the target) with respect to a submodule basis."""
    B = incl.M
    y = la.solve(B, list(x), incl.source.ring, ncols=incl.source.ngens)
    if y is None:
        raise StructuralError("element is not in the submodule")
    return y


# ---------------------------------------------------------------------------
# solving for maps
# ---------------------------------------------------------------------------


def solve_hom(src: FGModule, tgt: FGModule, constraints: Sequence, ring: str):
    """Find a well-defined map matrix ``X`` (tgt.ngens x src.ngens).

    Each constraint is ``(P, Q, T, Rt)`` meaning ``P X Q - Rt W = T`` for
    some unknown ``W``; matrices are nested lists with explicit shapes
    ``P: s x t``, ``Q: n x k``, ``T: s x k``, ``Rt: s x w``.
    Well-definedness of ``X`` is added automatically.  Returns ``None``
    when no solution exists.
    """
    t, n = tgt.ngens, src.ngens
    cons = list(constraints)
    if src.nrels:
        cons.append((la.identity(t, ring), src.R, la.zeros(t, src.nrels, ring), tgt.R, tgt.nrels))
    nphi = t * n
    blocks = []
    total = nphi
    for c in cons:
        P, Q, T, Rt = c[:4]
        w = c[4] if len(c) > 4 else (len(Rt[0]) if Rt and Rt[0] else 0)
        s = len(P)
        k = len(Q[0]) if Q and Q[0] else (len(T[0]) if T and T[0] else 0)
        blocks.append((P, Q, T, Rt, s, k, w, total))
        total += w * k
    rows, rhs = [], []
    for P, Q, T, Rt, s, k, w, off in blocks:
        for si in range(s):
            for ki in range(k):
                row = [0] * total
                for r in range(t):
                    p = P[si][r]
                    if p == 0:
                        continue
                    for cc in range(n):
                        q = Q[cc][ki]
                        if q:
                            row[r * n + cc] += p * q
                for wi in range(w):
                    v = Rt[si][wi]
                    if v:
                        row[off + wi * k + ki] -= v
                rows.append(row)
                rhs.append(T[si][ki])
    if not rows:
        return la.zeros(t, n, ring)
    sol = la.solve(rows, rhs, ring, ncols=total)
    if sol is None:
        return None
    return [[sol[r * n + cc] for cc in range(n)] for r in range(t)]


# ---------------------------------------------------------------------------
# short exact sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactReport:
    injective: bool
    surjective: bool
    middle: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective and self.middle


@dataclass(frozen=True)
class ShortExactSequence:
    left: FGModule
    mid: FGModule
    right: FGModule
    inject: ModuleMap
    project: ModuleMap

    def __post_init__(self):
        if self.inject.source != self.left or self.inject.target != self.mid:
            raise StructuralError("inject must go left -> mid")
        if self.project.source != self.mid or self.project.target != self.right:
            raise StructuralError("project must go mid -> right")

    @property
    def ring(self) -> str:
        return self.mid.ring

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "mid": self.mid.to_dict(), "right": self.right.to_dict(),
                "inject": self.inject.to_dict(), "project": self.project.to_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ShortExactSequence":
        A, B, C = (FGModule.from_dict(d[k]) for k in ("left", "mid", "right"))
        conv = Fraction if B.ring == "Q" else int
        i = ModuleMap(A, B, tuple(tuple(conv(v) for v in c) for c in d["inject"]["images"]))
        p = ModuleMap(B, C, tuple(tuple(conv(v) for v in c) for c in d["project"]["images"]))
        return cls(A, B, C, i, p)

    @classmethod
    def from_json(cls, s: str) -> "ShortExactSequence":
        return cls.from_dict(json.loads(s))


def verify_exact(seq: ShortExactSequence) -> ExactReport:
    """Injectivity, surjectivity and exactness in the middle, with witnesses."""
    A, B, C = seq.left, seq.mid, seq.right
    i, p = seq.inject, seq.project
    wit = {}
    # injective: every kernel generator of i is zero in A
    ker_i = i.kernel_gens()
    bad = [k for k in ker_i if not A.is_zero_elem(k)]
    inj = not bad
    if bad:
        wit["kernel"] = bad
    # surjective: every generator of C is hit modulo relations
    if C.ngens:
        L = la.hstack(p.M, C.R) if B.ngens or C.nrels else None
        if L is None or not L or not L[0]:
            miss = [list(e) for e in la.identity(C.ngens, C.ring) if not C.is_zero_elem(e)]
        else:
            miss = [list(e) for e in la.identity(C.ngens, C.ring)
                    if not C.is_zero_elem(e) and not la.in_span(L, list(e), C.ring)]
    else:
        miss = []
    surj = not miss
    if miss:
        wit["cokernel"] = miss
    # middle: p o i = 0 and ker p inside im i
    comp_bad = [c for c in (p(ci) for ci in i.images) if not C.is_zero_elem(c)]
    ker_p = p.kernel_gens()
    if ker_p:
        L = la.hstack(i.M, B.R) if (A.ngens or B.nrels) else None
        if L is None or not L[0]:
            outside = [k for k in ker_p if not B.is_zero_elem(k)]
        else:
            outside = [k for k in ker_p if not la.in_span(L, k, B.ring)]
    else:
        outside = []
    mid = not comp_bad and not outside
    if comp_bad:
        wit["p_after_i"] = comp_bad
    if outside:
        wit["ker_not_im"] = outside
    return ExactReport(inj, surj, mid, wit)


def require_exact(seq: ShortExactSequence, what: str = "sequence") -> ShortExactSequence:
    rep = verify_exact(seq)
    if not rep.ok:
        raise StructuralError(f"{what} is not exact: {rep}")
    return seq


def split_sequence(A: FGModule, C: FGModule) -> ShortExactSequence:
    B = A.direct_sum(C)
    n, m = A.ngens, C.ngens
    I = la.identity(n + m, A.ring)
    i = ModuleMap(A, B, tuple(tuple(I[r][j] for r in range(n + m)) for j in range(n)))
    p = ModuleMap(B, C, tuple(tuple(I[n + r][j] for r in range(m)) for j in range(n + m)))
    return ShortExactSequence(A, B, C, i, p)


def negate(E: ShortExactSequence) -> ShortExactSequence:
    """The inverse class: same middle, injection negated."""
    return ShortExactSequence(E.left, E.mid, E.right, -E.inject, E.project)


def _check_ends(E1, E2):
    if E1.left != E2.left or E1.right != E2.right:
        raise StructuralError("extensions must share both end terms")
    _same_ring(E1.mid, E2.mid)


def _baer(E1, E2, sign: int) -> ShortExactSequence:
    _check_ends(E1, E2)
    A, C = E1.left, E1.right
    B12 = E1.mid.direct_sum(E2.mid)
    n1 = E1.mid.ngens
    # psi(b1, b2) = p1 b1 - p2 b2
    psi_cols = [tuple(c) for c in E1.project.images] + [tuple(-v for v in c) for c in E2.project.images]
    psi = ModuleMap(B12, C, tuple(psi_cols))
    H, incl = submodule(B12, psi.kernel_gens())
    # D spanned by (f1 a, sign * f2 a); difference uses sign +1
    D = []
    for a1, a2 in zip(E1.inject.images, E2.inject.images):
        D.append(coords_in(incl, list(a1) + [sign * v for v in a2]))
    B = H.quotient(D)
    fbar = ModuleMap(A, B, tuple(tuple(coords_in(incl, list(a) + [0] * E2.mid.ngens))
                                 for a in E1.inject.images))
    pbar = ModuleMap(B, C, tuple(tuple(E1.project(col[:n1])) for col in incl.images))
    return require_exact(ShortExactSequence(A, B, C, fbar, pbar), "Baer construction")


def baer_difference(E1: ShortExactSequence, E2: ShortExactSequence) -> ShortExactSequence:
    """``E1 - E2``: pullback ``p1 = p2`` modulo the diagonal ``(f1 a, f2 a)``."""
    return _baer(E1, E2, +1)


def baer_sum(E1: ShortExactSequence, E2: ShortExactSequence) -> ShortExactSequence:
    """``E1 + E2``: as the difference with ``f2`` replaced by ``-f2``."""
    return _baer(E1, E2, -1)


def pushforward(E: ShortExactSequence, g: ModuleMap) -> ShortExactSequence:
    """Pushout of ``E`` along ``g: E.left -> A'``."""
    if g.source != E.left:
        raise StructuralError("pushforward: map source must be the left term")
    A2 = g.target
    _same_ring(A2, E.mid)
    S = A2.direct_sum(E.mid)
    n2 = A2.ngens
    glue = [tuple(gc) + tuple(-v for v in ic) for gc, ic in zip(g.images, E.inject.images)]
    B = S.quotient(glue)
    I = la.identity(B.ngens, B.ring)
    i2 = ModuleMap(A2, B, tuple(tuple(I[r][j] for r in range(B.ngens)) for j in range(n2)))
    zero_c = (0,) * E.right.ngens
    p2 = ModuleMap(B, E.right, tuple([zero_c] * n2 + [tuple(c) for c in E.project.images]))
    return require_exact(ShortExactSequence(A2, B, E.right, i2, p2), "pushforward")


def pullback(E: ShortExactSequence, h: ModuleMap) -> ShortExactSequence:
    """Pullback of ``E`` along ``h: C' -> E.right``."""
    if h.target != E.right:
        raise StructuralError("pullback: map target must be the right term")
    C2 = h.source
    _same_ring(C2, E.mid)
    S = E.mid.direct_sum(C2)
    nb = E.mid.ngens
    phi_cols = [tuple(c) for c in E.project.images] + [tuple(-v for v in c) for c in h.images]
    phi = ModuleMap(S, E.right, tuple(phi_cols))
    B, incl = submodule(S, phi.kernel_gens())
    i2 = ModuleMap(E.left, B, tuple(tuple(coords_in(incl, list(c) + [0] * C2.ngens))
                                    for c in E.inject.images))
    p2 = ModuleMap(B, C2, tuple(tuple(col[nb:]) for col in incl.images))
    return require_exact(ShortExactSequence(E.left, B, C2, i2, p2), "pullback")


def is_split(E: ShortExactSequence):
    """A retraction ``r: mid -> left`` with ``r o inject = id``, or ``None``."""
    A, B = E.left, E.mid
    ring = B.ring
    cons = [(la.identity(A.ngens, ring), E.inject.M if A.ngens else la.zeros(B.ngens, 0, ring),
             la.identity(A.ngens, ring), A.R, A.nrels)]
    X = solve_hom(B, A, cons, ring)
    if X is None:
        return None
    return ModuleMap.from_matrix(B, A, X)


def congruence(E1: ShortExactSequence, E2: ShortExactSequence):
    """A middle map ``E1.mid -> E2.mid`` fixing both ends, or ``None``.

    By the five lemma any such map is an isomorphism, so existence decides
    congruence of the two extensions.
    """
    _check_ends(E1, E2)
    A, C = E1.left, E1.right
    B1, B2 = E1.mid, E2.mid
    ring = B1.ring
    cons = []
    if A.ngens:
        # X f1 = f2 mod R_B2
        cons.append((la.identity(B2.ngens, ring), E1.inject.M, E2.inject.M, B2.R, B2.nrels))
    if C.ngens and B1.ngens:
        # p2 X = p1 mod R_C
        cons.append((E2.project.M, la.identity(B1.ngens, ring), E1.project.M, C.R, C.nrels))
    X = solve_hom(B1, B2, cons, ring)
    if X is None:
        return None
    return ModuleMap.from_matrix(B1, B2, X)


def congruent(E1, E2) -> bool:
    return congruence(E1, E2) is not None


# ---------------------------------------------------------------------------
# generalized Baer difference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RabiDiagram:
    """Two horizontal sequences ``0 -> B1^j -> B2^j -> B3 -> 0`` and two
    vertical sequences ``0 -> A1 -> B1^j -> C1 -> 0`` (j = 1, 2)."""
    E1: ShortExactSequence
    E2: ShortExactSequence
    V1: ShortExactSequence
    V2: ShortExactSequence

    def validate(self) -> None:
        if self.E1.right != self.E2.right:
            raise StructuralError("horizontal sequences need a common right term")
        for E, V in ((self.E1, self.V1), (self.E2, self.V2)):
            if V.mid != E.left:
                raise StructuralError("vertical middle must be the horizontal left term")
            require_exact(E, "horizontal sequence")
            require_exact(V, "vertical sequence")
        if self.V1.left != self.V2.left or self.V1.right != self.V2.right:
            raise StructuralError("vertical sequences need common end terms")


@dataclass(frozen=True)
class RabiResult:
    BB1: ShortExactSequence   # 0 -> A1 -> BB1 -> C1 -> 0
    BB2: FGModule
    horizontal: ShortExactSequence  # 0 -> BB1 -> BB2 -> F -> 0
    F: ShortExactSequence     # 0 -> C1 -> F -> B3 -> 0


def generalized_baer_difference(d: RabiDiagram) -> RabiResult:
    d.validate()
    E1, E2, V1, V2 = d.E1, d.E2, d.V1, d.V2
    B3 = E1.right
    C1 = V1.right
    BB1 = baer_difference(V1, V2)
    # H2 = ker(p1 - p2) inside B2^1 + B2^2
    S = E1.mid.direct_sum(E2.mid)
    n1, n2 = E1.mid.ngens, E2.mid.ngens
    psi = ModuleMap(S, B3, tuple([tuple(c) for c in E1.project.images]
                                 + [tuple(-v for v in c) for c in E2.project.images]))
    H2, incl2 = submodule(S, psi.kernel_gens())
    D2 = [coords_in(incl2, E1.inject(i1) + E2.inject(i2))
          for i1, i2 in zip(V1.inject.images, V2.inject.images)]
    BB2 = H2.quotient(D2)
    # BB1 -> BB2 via f1 + f2.  BB1.mid generators are H1-basis columns in B1^1 + B1^2.
    H1_cols = _baer_basis_columns(V1, V2)
    fmap = ModuleMap(BB1.mid, BB2, tuple(tuple(coords_in(incl2, E1.inject(c[:V1.mid.ngens])
                                                          + E2.inject(c[V1.mid.ngens:])))
                                         for c in H1_cols))
    Fmod = BB2.quotient(fmap.images)
    eta = ModuleMap(BB2, Fmod, tuple(tuple(c) for c in la.identity(BB2.ngens, BB2.ring)))
    horizontal = ShortExactSequence(BB1.mid, BB2, Fmod, fmap, eta)
    require_exact(horizontal, "BB1 -> BB2 -> F")
    # phi(c) = class of (f1(lift1 c), 0); lift through pi_1
    phi_cols = []
    for c in la.identity(C1.ngens, C1.ring):
        lift = _lift(V1.project, c)
        phi_cols.append(tuple(coords_in(incl2, E1.inject(lift) + [0] * n2)))
    phi = ModuleMap(C1, Fmod, tuple(phi_cols))
    pbar = ModuleMap(Fmod, B3, tuple(tuple(E1.project(col[:n1])) for col in incl2.images))
    F = ShortExactSequence(C1, Fmod, B3, phi, pbar)
    require_exact(F, "C1 -> F -> B3")
    return RabiResult(BB1, BB2, horizontal, F)


def _baer_basis_columns(V1, V2) -> list[list]:
    # recompute the basis used inside baer_difference for BB1.mid
    S = V1.mid.direct_sum(V2.mid)
    psi = ModuleMap(S, V1.right, tuple([tuple(c) for c in V1.project.images]
                                       + [tuple(-v for v in c) for c in V2.project.images]))
    _, incl = submodule(S, psi.kernel_gens())
    return [list(c) for c in incl.images]


def _lift(p: ModuleMap, y: Sequence) -> list:
    """Some ``x`` with ``p(x) = y`` in the target."""
    C = p.target
    L = la.hstack(p.M, C.R) if C.nrels else p.M
    ncols = p.source.ngens + C.nrels
    sol = la.solve(L, list(y), C.ring, ncols=ncols)
    if sol is None:
        raise StructuralError("element has no preimage")
    return sol[:p.source.ngens]


def rabi_corollary_check(d: RabiDiagram) -> bool:
    """Congruence of ``F`` with the difference of the pushforwards ``pi_j* E_j``."""
    res = generalized_baer_difference(d)
    e1 = pushforward(d.E1, d.V1.project)
    e2 = pushforward(d.E2, d.V2.project)
    return congruent(res.F, baer_difference(e1, e2))


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------


def _unimodular(n: int, rng: random.Random, steps: int = 6, ring: str = "Z"):
    U = la.identity(n, ring)
    if n < 2:
        if ring == "Q" and n == 1:
            U[0][0] = Fraction(rng.choice([1, -1, 2, -3, Fraction(1, 2)]))
        elif n == 1:
            U[0][0] = rng.choice([1, -1])
        return U
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-2, 2)
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]
    if ring == "Q":
        for i in range(n):
            s = Fraction(rng.choice([1, -1, 2, 3])) / rng.choice([1, 2, 3])
            U[i] = [a * s for a in U[i]]
    return U


def _inverse(U, ring):
    sf = la.smith(U, ring)
    n = len(U)
    return la.solve_matrix(U, la.identity(n, ring), ring)


def change_generators(E: ShortExactSequence, rng: random.Random) -> ShortExactSequence:
    """Same extension written in a random new generating set of the middle."""
    B = E.mid
    ring = B.ring
    n = B.ngens
    if n == 0:
        return E
    U = _unimodular(n, rng, ring=ring)        # new coords = U old coords
    Ui = _inverse(U, ring)
    newR = la.matmul(U, B.R, ncols=B.nrels) if B.nrels else []
    B2 = FGModule.from_matrix(newR, ring, ngens=n) if B.nrels else FGModule(n, (), ring)
    i2 = ModuleMap(E.left, B2, tuple(tuple(la.matvec(U, list(c))) for c in E.inject.images))
    pM = la.matmul(E.project.M, Ui) if E.right.ngens else None
    if pM is None:
        p2 = ModuleMap(B2, E.right, tuple(() for _ in range(n)))
    else:
        p2 = ModuleMap.from_matrix(B2, E.right, pM)
    return ShortExactSequence(E.left, B2, E.right, i2, p2)


def cyclic_extension(a: int, c: int, k: int, ring: str = "Z") -> ShortExactSequence:
    """``0 -> Z/a -> B -> Z/c -> 0`` with ``c e2 = k e1`` in ``B``."""
    A = FGModule.cyclic(a, ring)
    C = FGModule.cyclic(c, ring)
    B = FGModule(2, ((a, 0), (-k, c)), ring)
    return ShortExactSequence(A, B, C, ModuleMap(A, B, ((1, 0),)), ModuleMap(B, C, ((0,), (1,))))


def ext_by_cyclic(E_left: FGModule, b: int, v: Sequence) -> ShortExactSequence:
    """``0 -> M -> M' -> Z/b -> 0`` with one new generator ``g``, ``b g = v``."""
    ring = E_left.ring
    n = E_left.ngens
    rels = tuple(tuple(c) + (0,) for c in E_left.relations) + (tuple(-x for x in v) + (b,),)
    B = FGModule(n + 1, rels, ring)
    C = FGModule.cyclic(b, ring)
    I = la.identity(n + 1, ring)
    i = ModuleMap(E_left, B, tuple(tuple(I[r][j] for r in range(n + 1)) for j in range(n)))
    p = ModuleMap(B, C, tuple([(0,)] * n + [(1,)]))
    return ShortExactSequence(E_left, B, C, i, p)


def random_finite_diagram(rng: random.Random, max_order: int = 64) -> RabiDiagram:
    """Random diagram of finite abelian groups with ``|B2^j| <= max_order``."""
    while True:
        a = rng.choice([1, 2, 2, 3, 4])
        c = rng.choice([1, 2, 2, 4])
        b = rng.choice([1, 2, 2, 3, 4])
        if a * c * b <= max_order:
            break
    V = []
    for _ in range(2):
        k = rng.randrange(a) if a > 1 else 0
        V.append(cyclic_extension(a, c, k))
    # share end objects
    A1, C1 = V[0].left, V[0].right
    E = []
    for j in range(2):
        Vj = change_generators(V[j], rng)
        v = [rng.randint(-3, 3) for _ in range(Vj.mid.ngens)]
        Ej = ext_by_cyclic(Vj.mid, b, v)
        E.append(Ej)
        V[j] = Vj
    B3 = E[0].right
    E = [E[0], ShortExactSequence(E[1].left, E[1].mid, B3, E[1].inject,
                                  ModuleMap(E[1].mid, B3, E[1].project.images))]
    E = [_rechange_mid(Ej, rng) for Ej in E]
    return RabiDiagram(E[0], E[1], V[0], V[1])


def _rechange_mid(E, rng):
    return change_generators(E, rng)


def random_rational_diagram(rng: random.Random, max_dim: int = 4) -> RabiDiagram:
    """Random diagram of Q-vector spaces, every space of dimension ``<= max_dim``."""
    ring = "Q"
    a = rng.randint(0, 2)
    c = rng.randint(0, max(0, min(2, max_dim - a)))
    b = rng.randint(0, max(0, max_dim - a - c))
    A1 = FGModule.free(a, ring)
    C1 = FGModule.free(c, ring)
    B3 = FGModule.free(b, ring)
    V, E = [], []
    for _ in range(2):
        Vj = change_generators(_split_free(A1, C1), rng)
        Ej = change_generators(_split_free(Vj.mid, B3), rng)
        V.append(Vj)
        E.append(Ej)
    return RabiDiagram(E[0], E[1], V[0], V[1])


def _split_free(A: FGModule, C: FGModule) -> ShortExactSequence:
    S = split_sequence(A, C)
    return S


def random_extension(rng: random.Random, A: FGModule, C: FGModule) -> ShortExactSequence:
    """Random extension of a cyclic ``C = Z/c`` by ``A`` (or split if ``C`` is not cyclic)."""
    if C.ngens == 1 and C.nrels == 1:
        c = C.relations[0][0]
        v = [rng.randint(-3, 3) for _ in range(A.ngens)]
        E = ext_by_cyclic(A, c, v)
        E = ShortExactSequence(A, E.mid, C, E.inject, ModuleMap(E.mid, C, E.project.images))
        return change_generators(E, rng)
    return change_generators(split_sequence(A, C), rng)
