"""Mixed Hodge data on lattices, extensions and Carlson representatives.

Everything is expressed in lattice coordinates: a Hodge lattice of rank ``n``
is ``Z^n`` with a decreasing Hodge filtration of ``C^n`` (given by spanning
matrices) and an increasing weight filtration by sublattices.  An optional
``basis`` records ambient complex coordinates for display and for inputs
written in ambient terms (Tate twists, Kummer extensions).

The Carlson representative of ``0 -> A -> H -> B -> 0`` is ``r_Z o s_F`` in
``Hom(B_C, A_C)``, well defined modulo ``F^0 Hom(B, A) + Hom(B_Z, A_Z)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import intlinalg as il

SUBSPACE_TOL = 1e-10


class StructuralError(ValueError):
    """Input data is not a (separated) extension of mixed Hodge structures."""


# ---------------------------------------------------------------------------
# complex subspaces
# ---------------------------------------------------------------------------


def orth(A, tol=SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of the column span."""
    A = np.asarray(A, complex)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    return U[:, :r]


def null(A, tol=SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of the kernel."""
    A = np.asarray(A, complex)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    r = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    return Vh[r:].conj().T


def perp_projector(A) -> np.ndarray:
    Q = orth(A)
    n = np.asarray(A).shape[0]
    return np.eye(n) - Q @ Q.conj().T


def subspace_contains(big, small, tol=SUBSPACE_TOL) -> bool:
    small = np.asarray(small, complex)
    if small.size == 0:
        return True
    P = perp_projector(big)
    return float(np.linalg.norm(P @ small)) <= tol * max(1.0, float(np.linalg.norm(small)))


def subspace_equal(a, b, tol=SUBSPACE_TOL) -> bool:
    return orth(a).shape[1] == orth(b).shape[1] and subspace_contains(a, b, tol) and \
        subspace_contains(b, a, tol)


# ---------------------------------------------------------------------------
# Hodge lattices
# ---------------------------------------------------------------------------


@dataclass
class HodgeLattice:
    """``Z^n`` with Hodge filtration ``F[p]`` (columns span ``F^p``) and weights ``W[w]``."""

    rank: int
    F: dict
    W: dict = field(default_factory=dict)
    basis: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        self.F = {int(p): orth(np.asarray(v, complex).reshape(self.rank, -1)) for p, v in self.F.items()}
        if self.basis is None:
            self.basis = np.eye(self.rank, dtype=complex)
        ps = sorted(self.F)
        for p, q in zip(ps[:-1], ps[1:]):
            if not subspace_contains(self.F[p], self.F[q]):
                raise StructuralError(f"F^{q} not contained in F^{p}")

    def Fp(self, p: int) -> np.ndarray:
        if p in self.F:
            return self.F[p]
        ps = sorted(self.F)
        if not ps or p < ps[0]:
            return np.eye(self.rank, dtype=complex)
        if p > ps[-1]:
            return np.zeros((self.rank, 0), complex)
        below = max(q for q in ps if q < p)
        return self.F[below]

    @property
    def p_range(self):
        ps = sorted(self.F)
        return (ps[0] - 1, ps[-1] + 1) if ps else (0, 0)

    @classmethod
    def from_ambient(cls, basis, F_ambient: dict, W=None, name=""):
        basis = np.asarray(basis, complex)
        inv = np.linalg.inv(basis)
        F = {p: inv @ np.asarray(v, complex).reshape(basis.shape[0], -1) for p, v in F_ambient.items()}
        return cls(basis.shape[0], F, W or {}, basis, name)

    @classmethod
    def tate(cls, n: int) -> "HodgeLattice":
        """``Z(n)``: lattice ``(2 pi i)^n Z``, type ``(-n, -n)``, weight ``-2n``."""
        return cls.from_ambient([[(2j * np.pi) ** n]], {-n: [[1]], -n + 1: np.zeros((1, 0))},
                                {-2 * n: [[1]]}, name=f"Z({n})")

    def weights(self) -> list[int]:
        """Weights with nonzero graded piece."""
        if not self.W:
            return []
        ws = sorted(self.W)
        out = []
        prev = 0
        for w in ws:
            r = il.rank(np.asarray(self.W[w], dtype=object).tolist(), "Q") if np.size(self.W[w]) else 0
            if r > prev:
                out.append(w)
            prev = r
        return out

    def change_basis(self, U) -> "HodgeLattice":
        """Same structure, lattice basis ``e'_j = sum_i U[i, j] e_i`` (``U`` unimodular)."""
        U = np.asarray(U)
        Uinv = np.rint(np.linalg.inv(U.astype(float))).astype(int)
        F = {p: Uinv @ v for p, v in self.F.items()}
        W = {w: Uinv @ np.asarray(v) for w, v in self.W.items()}
        return HodgeLattice(self.rank, F, W, self.basis @ U, self.name)


# ---------------------------------------------------------------------------
# generalised tori C^n / (F^0 + lattice)
# ---------------------------------------------------------------------------


@dataclass
class JResult:
    equal: bool | None       # None: indeterminate
    residual: float
    margin: float            # largest distance of lattice coordinates from integers
    coords: np.ndarray

    def __bool__(self):
        return bool(self.equal)


@dataclass
class JacobianTorus:
    """``C^n / (F0 + L)`` with ``F0`` complex (columns) and ``L`` real-integral generators."""

    F0: np.ndarray
    L: np.ndarray

    @property
    def dim(self):
        return self.L.shape[0]

    def _solve(self, d):
        P = perp_projector(self.F0) if self.F0.size else np.eye(self.dim)
        G = P @ self.L
        t = P @ d
        A = np.vstack([G.real, G.imag])
        bb = np.concatenate([t.real, t.imag])
        m, *_ = np.linalg.lstsq(A, bb, rcond=None)
        return P, m

    def equal(self, a, b, tol: float = 1e-9) -> JResult:
        """``a == b`` in the torus, with a rounding margin and an indeterminate flag."""
        d = np.asarray(a, complex).ravel() - np.asarray(b, complex).ravel()
        P, m = self._solve(d)
        mr = np.rint(m)
        res = float(np.linalg.norm(P @ (d - self.L @ mr)))
        scale = max(1.0, float(np.linalg.norm(self.L, 2)))
        margin = float(np.max(np.abs(m - mr))) if m.size else 0.0
        if res <= tol * scale:
            eq = True
        else:
            eq = False
        if m.size and abs(margin - 0.5) < 10 * tol:
            eq = None
        return JResult(eq, res, margin, m)

    def reduce(self, v):
        """Representative of ``v`` with lattice coordinates in ``[-1/2, 1/2)``."""
        v = np.asarray(v, complex).ravel()
        _, m = self._solve(v)
        return v - self.L @ np.floor(m + 0.5)


def intermediate_jacobian(V: HodgeLattice) -> JacobianTorus:
    """``J(V) = V_C / (F^0 V + V_Z)``; every weight of ``V`` must be negative.

    A lattice without weight data is accepted as is.
    """
    ws = V.weights()
    if ws and max(ws) >= 0:
        raise StructuralError(f"intermediate Jacobian needs negative weights, got {ws}")
    return JacobianTorus(V.Fp(0), np.eye(V.rank))


def hom_filtration(A: HodgeLattice, B: HodgeLattice, p: int) -> np.ndarray:
    """``F^p Hom(B, A)`` as vectors ``vec(phi)`` (column-major), ``phi: B -> A``."""
    a, b = A.rank, B.rank
    lo = min(B.p_range[0], A.p_range[0] - p) - 1
    hi = max(B.p_range[1], A.p_range[1] - p) + 1
    rows = []
    for q in range(lo, hi + 1):
        U = B.Fp(q)
        if U.shape[1] == 0:
            continue
        Q = perp_projector(A.Fp(q + p)) if A.Fp(q + p).shape[1] else np.eye(a)
        rows.append(np.kron(U.T, Q))
    if not rows:
        return np.eye(a * b, dtype=complex)
    return null(np.vstack(rows))


def hom_jacobian(A: HodgeLattice, B: HodgeLattice) -> JacobianTorus:
    return JacobianTorus(hom_filtration(A, B, 0), np.eye(A.rank * B.rank))


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------


@dataclass
class HodgeExtension:
    """``0 -> A -> H -> B -> 0`` with integer ``inject`` (h x a) and ``project`` (b x h)."""

    A: HodgeLattice
    H: HodgeLattice
    B: HodgeLattice
    inject: np.ndarray
    project: np.ndarray

    def __post_init__(self):
        self.inject = np.asarray(self.inject, dtype=np.int64).reshape(self.H.rank, self.A.rank)
        self.project = np.asarray(self.project, dtype=np.int64).reshape(self.B.rank, self.H.rank)

    def validate(self):
        from .extalg import FGModule, ModuleMap, ShortExactSequence, verify_exact

        if np.any(self.project @ self.inject):
            raise StructuralError("project o inject != 0")
        A = FGModule.free(self.A.rank)
        H = FGModule.free(self.H.rank)
        B = FGModule.free(self.B.rank)
        rep = verify_exact(ShortExactSequence(
            A, H, B, ModuleMap.from_matrix(A, H, self.inject.tolist()),
            ModuleMap.from_matrix(H, B, self.project.tolist())))
        if not rep.ok:
            raise StructuralError(f"not exact: {rep}")
        lo = min(self.A.p_range[0], self.H.p_range[0], self.B.p_range[0])
        hi = max(self.A.p_range[1], self.H.p_range[1], self.B.p_range[1])
        for p in range(lo, hi + 1):
            if not subspace_contains(self.H.Fp(p), self.inject @ self.A.Fp(p)):
                raise StructuralError(f"inject does not respect F^{p}")
            if not subspace_equal(self.project @ self.H.Fp(p), self.B.Fp(p)):
                raise StructuralError(f"project is not strict on F^{p}")
        return self

    def is_separated(self) -> bool:
        wa, wb = self.A.weights(), self.B.weights()
        if not wa or not wb:
            return False
        return max(wa) < min(wb)

    def change_basis(self, U) -> "HodgeExtension":
        U = np.asarray(U, dtype=np.int64)
        Uinv = np.rint(np.linalg.inv(U.astype(float))).astype(np.int64)
        return HodgeExtension(self.A, self.H.change_basis(U), self.B, Uinv @ self.inject,
                              self.project @ U)

    def adapted(self) -> tuple["HodgeExtension", np.ndarray]:
        """Equivalent extension with ``inject = [I; 0]`` and ``project = [0 I]``."""
        a, b = self.A.rank, self.B.rank
        lifts = []
        for j in range(b):
            e = [int(j == k) for k in range(b)]
            s = il.solve(self.project.tolist(), e, "Z", ncols=self.H.rank)
            if s is None:
                raise StructuralError("project is not surjective")
            lifts.append([int(v) for v in s])
        U = np.hstack([self.inject, np.array(lifts, dtype=np.int64).T.reshape(self.H.rank, b)])
        if round(abs(np.linalg.det(U.astype(float)))) != 1:
            raise StructuralError("inject and lifts do not form a basis")
        return self.change_basis(U), U


def integral_retraction(E: HodgeExtension) -> np.ndarray:
    """Integer ``r`` (a x h) with ``r o inject = 1``."""
    a, h = E.A.rank, E.H.rank
    # rows of r solve inject^T r_k^T = e_k
    injT = E.inject.T.tolist()
    rows = []
    for k in range(a):
        e = [int(k == j) for j in range(a)]
        s = il.solve(injT, e, "Z", ncols=h)
        if s is None:
            raise StructuralError("inject has no integral retraction")
        rows.append([int(v) for v in s])
    return np.array(rows, dtype=np.int64).reshape(a, h)


def filtered_section(E: HodgeExtension, tol: float = 1e-8) -> np.ndarray:
    """Complex ``s`` (h x b) with ``project o s = 1`` and ``s(F^p B) in F^p H`` for all p."""
    h, b = E.H.rank, E.B.rank
    rows = [np.kron(np.eye(b), E.project.astype(complex))]
    rhs = [np.eye(b, dtype=complex).ravel(order="F")]
    lo = min(E.B.p_range[0], E.H.p_range[0])
    hi = max(E.B.p_range[1], E.H.p_range[1])
    for p in range(lo, hi + 1):
        U = E.B.Fp(p)
        if U.shape[1] == 0:
            continue
        Q = perp_projector(E.H.Fp(p)) if E.H.Fp(p).shape[1] else np.eye(h)
        rows.append(np.kron(U.T, Q))
        rhs.append(np.zeros(U.shape[1] * h, complex))
    A = np.vstack(rows)
    y = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.linalg.norm(A @ x - y))
    if res > tol * max(1.0, float(np.linalg.norm(y))):
        raise StructuralError(f"no filtered section (residual {res:.2e})")
    return x.reshape((h, b), order="F")


def carlson_representative(E: HodgeExtension, check: bool = True):
    """``(phi, torus)``: ``phi = r_Z o s_F`` (a x b) and ``Hom(B, A)`` modulo ``F^0 + lattice``."""
    if check:
        E.validate()
        if E.A.W and E.B.W and not E.is_separated():
            raise StructuralError("extension is not separated")
    r = integral_retraction(E)
    s = filtered_section(E)
    return r @ s, hom_jacobian(E.A, E.B)


def j_equal(a, b, torus: JacobianTorus, tol: float = 1e-9) -> JResult:
    return torus.equal(np.asarray(a).ravel(order="F"), np.asarray(b).ravel(order="F"), tol)


def ambient_hom(phi, A: HodgeLattice, B: HodgeLattice):
    """A lattice-coordinate map ``B -> A`` in ambient coordinates."""
    return A.basis @ phi @ np.linalg.inv(B.basis)


# ---------------------------------------------------------------------------
# operations on extensions (adapted coordinates)
# ---------------------------------------------------------------------------


def baer_sum_hodge(E1: HodgeExtension, E2: HodgeExtension) -> HodgeExtension:
    """Baer sum of two extensions of ``B`` by ``A``."""
    E1, _ = E1.adapted()
    E2, _ = E2.adapted()
    a, b = E1.A.rank, E1.B.rank
    F = {}
    lo = min(E1.H.p_range[0], E2.H.p_range[0])
    hi = max(E1.H.p_range[1], E2.H.p_range[1])
    for p in range(lo, hi + 1):
        V1, V2 = E1.H.Fp(p), E2.H.Fp(p)
        X1, Y1 = V1[:a], V1[a:]
        X2, Y2 = V2[:a], V2[a:]
        K = null(np.hstack([Y1, -Y2]))
        k1 = V1.shape[1]
        c1, c2 = K[:k1], K[k1:]
        F[p] = np.vstack([X1 @ c1 + X2 @ c2, Y1 @ c1])
    W = {}
    for w in set(E1.H.W) | set(E2.H.W):
        W[w] = E1.H.W.get(w, E2.H.W.get(w))
    H = HodgeLattice(a + b, F, W)
    inj = np.vstack([np.eye(a, dtype=np.int64), np.zeros((b, a), np.int64)])
    proj = np.hstack([np.zeros((b, a), np.int64), np.eye(b, dtype=np.int64)])
    return HodgeExtension(E1.A, H, E1.B, inj, proj)


def pullback_hodge(E: HodgeExtension, g, Bp: HodgeLattice) -> HodgeExtension:
    """Pullback along an integral morphism ``g: B' -> B`` (b x b')."""
    E, _ = E.adapted()
    g = np.asarray(g, dtype=np.int64)
    a, b, bp = E.A.rank, E.B.rank, Bp.rank
    F = {}
    lo = min(E.H.p_range[0], Bp.p_range[0])
    hi = max(E.H.p_range[1], Bp.p_range[1])
    for p in range(lo, hi + 1):
        V, U = E.H.Fp(p), Bp.Fp(p)
        K = null(np.hstack([V[a:], -g @ U]))
        c1, c2 = K[:V.shape[1]], K[V.shape[1]:]
        F[p] = np.vstack([V[:a] @ c1, U @ c2])
    H = HodgeLattice(a + bp, F, {})
    inj = np.vstack([np.eye(a, dtype=np.int64), np.zeros((bp, a), np.int64)])
    proj = np.hstack([np.zeros((bp, a), np.int64), np.eye(bp, dtype=np.int64)])
    return HodgeExtension(E.A, H, Bp, inj, proj)


def pushforward_hodge(E: HodgeExtension, f, Ap: HodgeLattice) -> HodgeExtension:
    """Pushforward along an integral morphism ``f: A -> A'`` (a' x a)."""
    E, _ = E.adapted()
    f = np.asarray(f, dtype=np.int64)
    a, b, ap = E.A.rank, E.B.rank, Ap.rank
    F = {}
    lo = min(E.H.p_range[0], Ap.p_range[0])
    hi = max(E.H.p_range[1], Ap.p_range[1])
    for p in range(lo, hi + 1):
        V, U = E.H.Fp(p), Ap.Fp(p)
        # (a'', (a, b)) -> (a'' + f a, b)
        F[p] = np.hstack([np.vstack([U, np.zeros((b, U.shape[1]))]),
                          np.vstack([f @ V[:a], V[a:]])])
    H = HodgeLattice(ap + b, F, {})
    inj = np.vstack([np.eye(ap, dtype=np.int64), np.zeros((b, ap), np.int64)])
    proj = np.hstack([np.zeros((b, ap), np.int64), np.eye(b, dtype=np.int64)])
    return HodgeExtension(Ap, H, E.B, inj, proj)


# ---------------------------------------------------------------------------
# examples and random instances
# ---------------------------------------------------------------------------


def kummer_extension(u: complex) -> HodgeExtension:
    """Extension of ``Z(0)`` by ``Z(1)`` whose class is ``u`` modulo ``2 pi i Z``."""
    A = HodgeLattice.tate(1)
    B = HodgeLattice.tate(0)
    basis = np.array([[2j * np.pi, -u], [0, 1]])
    H = HodgeLattice.from_ambient(basis, {-1: np.eye(2), 0: [[0], [1]], 1: np.zeros((2, 0))},
                                  {-2: [[1], [0]], 0: np.eye(2, dtype=int)})
    return HodgeExtension(A, H, B, [[1], [0]], [[0, 1]])


def weight_minus_one(Z: np.ndarray) -> HodgeLattice:
    """Rank ``2m`` weight ``-1`` structure with ``F^0`` spanned by ``[Z; I]``."""
    m = Z.shape[0]
    F0 = np.vstack([Z, np.eye(m)])
    return HodgeLattice(2 * m, {-1: np.eye(2 * m), 0: F0, 1: np.zeros((2 * m, 0))},
                        {-1: np.eye(2 * m, dtype=int)})


def random_unimodular(rng, n: int, steps: int = 12) -> np.ndarray:
    U = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, 2, replace=False)
        U[:, i] += int(rng.integers(-2, 3)) * U[:, j]
    if rng.random() < 0.5 and n > 1:
        U[:, [0, 1]] = U[:, [1, 0]]
    return U


def random_period(rng, m: int) -> np.ndarray:
    """Symmetric ``Z`` with positive definite imaginary part."""
    X = rng.normal(size=(m, m))
    Y = rng.normal(size=(m, m))
    return (X + X.T) / 2 + 1j * (Y @ Y.T + m * np.eye(m))


def random_separated_extension(rng, A: HodgeLattice | None = None, b: int = 1, m: int = 1,
                               X=None, scramble: bool = True):
    """Extension of ``Z(0)^b`` by a weight ``-1`` structure ``A``, with chosen class ``X``.

    ``F^0 H = F^0 A + span [X; I]`` in adapted coordinates, so the Carlson
    class is ``X``.  ``scramble`` applies a random unimodular change of basis of ``H``.
    """
    if A is None:
        A = weight_minus_one(random_period(rng, m))
    a = A.rank
    if X is None:
        X = rng.normal(size=(a, b)) + 1j * rng.normal(size=(a, b))
    B = HodgeLattice(b, {0: np.eye(b), 1: np.zeros((b, 0))}, {0: np.eye(b, dtype=int)})
    F0 = np.hstack([np.vstack([A.Fp(0), np.zeros((b, A.Fp(0).shape[1]))]),
                    np.vstack([X, np.eye(b)])])
    H = HodgeLattice(a + b, {-1: np.eye(a + b), 0: F0, 1: np.zeros((a + b, 0))},
                     {-1: np.vstack([np.eye(a, dtype=int), np.zeros((b, a), int)]),
                      0: np.eye(a + b, dtype=int)})
    inj = np.vstack([np.eye(a, dtype=np.int64), np.zeros((b, a), np.int64)])
    proj = np.hstack([np.zeros((b, a), np.int64), np.eye(b, dtype=np.int64)])
    E = HodgeExtension(A, H, B, inj, proj)
    if scramble:
        E = E.change_basis(random_unimodular(rng, a + b))
    return E, X


# ---------------------------------------------------------------------------
# the torus of the main comparison
# ---------------------------------------------------------------------------


def curve_hom_jacobian(pd) -> JacobianTorus:
    """Torus for matrices ``F[j, i]`` (cycle ``alpha_j``, form ``dz_i``) modulo periods.

    The lattice is generated by ``2 pi i e_j (x) (int_{alpha_k} dz_i)_i``; ``F^0`` is zero.
    Vectors are ``F.ravel()`` (row-major).
    """
    g = pd.genus
    Pi = pd.Pi  # (2g, g)
    gens = []
    for j in range(2 * g):
        for k in range(2 * g):
            M = np.zeros((2 * g, g), complex)
            M[j, :] = 2j * np.pi * Pi[k, :]
            gens.append(M.ravel())
    return JacobianTorus(np.zeros((2 * g * g, 0), complex), np.array(gens).T)
