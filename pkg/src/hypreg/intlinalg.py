"""Exact linear algebra over the integers and the rationals.

Matrices are plain nested lists of ``int`` (ring ``"Z"``) or
``fractions.Fraction`` (ring ``"Q"``).  Everything here is exact; no
floating point is used anywhere in this module.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list  # list[list[int | Fraction]]

RINGS = ("Z", "Q")


def check_ring(ring: str) -> None:
    if ring not in RINGS:
        raise ValueError(f"unknown ring {ring!r}; expected one of {RINGS}")


def coerce(A, ring: str = "Z") -> Matrix:
    """Copy ``A`` into a nested list with entries of the ring's type."""
    check_ring(ring)
    conv = Fraction if ring == "Q" else _as_int
    return [[conv(a) for a in row] for row in A]


def _as_int(a) -> int:
    if isinstance(a, Fraction):
        if a.denominator != 1:
            raise ValueError(f"non-integral entry {a} in an integer matrix")
        return int(a.numerator)
    if isinstance(a, float):
        if a != int(a):
            raise ValueError(f"non-integral entry {a} in an integer matrix")
    return int(a)


def zeros(m: int, n: int, ring: str = "Z") -> Matrix:
    z = Fraction(0) if ring == "Q" else 0
    return [[z] * n for _ in range(m)]


def identity(n: int, ring: str = "Z") -> Matrix:
    M = zeros(n, n, ring)
    one = Fraction(1) if ring == "Q" else 1
    for i in range(n):
        M[i][i] = one
    return M


def shape(A: Matrix, ncols: int | None = None) -> tuple[int, int]:
    m = len(A)
    if m == 0:
        return 0, (ncols or 0)
    return m, len(A[0])


def matmul(A: Matrix, B: Matrix, ncols: int | None = None) -> Matrix:
    m = len(A)
    k = len(B)
    n = len(B[0]) if k else (ncols or 0)
    if m and len(A[0]) != k:
        raise ValueError(f"shape mismatch {len(A)}x{len(A[0])} @ {k}x{n}")
    Bt = list(zip(*B)) if k else [()] * n
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(A: Matrix, nrows: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*A)]


def hstack(*blocks: Matrix) -> Matrix:
    rows = max(len(b) for b in blocks)
    out = [[] for _ in range(rows)]
    for b in blocks:
        if not b:
            continue
        if len(b) != rows:
            raise ValueError("hstack: row counts differ")
        for i in range(rows):
            out[i].extend(b[i])
    return out


def vstack(*blocks: Matrix) -> Matrix:
    out = []
    for b in blocks:
        out.extend([list(r) for r in b])
    return out


def block_diag(A: Matrix, B: Matrix, a_cols: int, b_cols: int, ring: str = "Z") -> Matrix:
    z = Fraction(0) if ring == "Q" else 0
    top = [list(r) + [z] * b_cols for r in A]
    bot = [[z] * a_cols + list(r) for r in B]
    return top + bot


def columns(A: Matrix) -> list[list]:
    return [list(c) for c in zip(*A)] if A and A[0] else []


def from_columns(cols: Sequence[Sequence], nrows: int) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [list(r) for r in zip(*cols)]


def neg(A: Matrix) -> Matrix:
    return [[-a for a in row] for row in A]


def sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero(A: Matrix) -> bool:
    return all(a == 0 for row in A for a in row)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


class SmithForm:
    """``U @ A @ V == D`` with ``U``, ``V`` invertible over the ring.

    ``diag`` holds the nonzero diagonal entries of ``D`` (invariant factors
    over Z, all ones over Q); ``rank`` is their number.
    """

    def __init__(self, U, D, V, Uinv, Vinv, diag, m, n):
        self.U, self.D, self.V = U, D, V
        self.Uinv, self.Vinv = Uinv, Vinv
        self.diag = diag
        self.rank = len(diag)
        self.m, self.n = m, n


def smith(A: Matrix, ring: str = "Z", ncols: int | None = None,
          inverses: bool = True) -> SmithForm:
    """Smith normal form with both transforms and (optionally) their inverses."""
    check_ring(ring)
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    D = coerce(A, ring)
    U = identity(m, ring)
    Uinv = identity(m, ring)
    V = identity(n, ring)
    Vinv = identity(n, ring)
    exact = ring == "Q"

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for row in (Uinv if inverses else ()):
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        if inverses:
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q == 0:
            return
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        for row in (Uinv if inverses else ()):
            row[src] -= q * row[dst]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        if inverses:
            Vinv[src] = [a - q * b for a, b in zip(Vinv[src], Vinv[dst])]

    def scale_row(i, c):
        # c is a unit
        D[i] = [c * a for a in D[i]]
        U[i] = [c * a for a in U[i]]
        inv = 1 / c if exact else c
        for row in (Uinv if inverses else ()):
            row[i] = row[i] * inv

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v != 0 and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    q = D[i][t] / p if exact else D[i][t] // p
                    add_row(i, t, -q)
                    if D[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    q = D[t][j] / p if exact else D[t][j] // p
                    add_col(j, t, -q)
                    if D[t][j] != 0:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, m):
                    v = D[i][t]
                    if v != 0 and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, "r")
                for j in range(t, n):
                    v = D[t][j]
                    if v != 0 and (best is None or abs(v) < best[0]):
                        best = (abs(v), j, "c")
                if best[2] == "r" and best[1] != t:
                    swap_rows(best[1], t)
                elif best[2] == "c" and best[1] != t:
                    swap_cols(best[1], t)
                continue
            if not exact:
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if D[i][j] % p != 0:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    add_row(t, bad, 1)
                    continue
            break
        if D[t][t] < 0 or (exact and D[t][t] != 1):
            c = (1 / D[t][t]) if exact else -1
            scale_row(t, c)
        t += 1
    diag = [D[i][i] for i in range(min(m, n)) if D[i][i] != 0]
    return SmithForm(U, D, V, Uinv, Vinv, diag, m, n)


# ---------------------------------------------------------------------------
# Solving, kernels, lattices
# ---------------------------------------------------------------------------


def solve(A: Matrix, b: Sequence, ring: str = "Z", ncols: int | None = None,
          sf: SmithForm | None = None):
    """One solution ``x`` of ``A x = b`` over the ring, or ``None``."""
    if sf is None:
        return Echelon(A, ring, ncols).solve(b)
    sf = sf or smith(A, ring, ncols, inverses=False)
    m, n = sf.m, sf.n
    if len(b) != m:
        raise ValueError(f"rhs length {len(b)} != {m}")
    c = matvec(sf.U, coerce([b], ring)[0]) if m else []
    y = [Fraction(0) if ring == "Q" else 0] * n
    for i, d in enumerate(sf.diag):
        if ring == "Z":
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
        else:
            y[i] = c[i] / d
    for i in range(sf.rank, m):
        if c[i] != 0:
            return None
    return matvec(sf.V, y) if n else []


def solve_matrix(A: Matrix, B: Matrix, ring: str = "Z", ncols: int | None = None):
    """Solve ``A X = B`` column by column; ``None`` if any column fails."""
    ech = Echelon(A, ring, ncols)
    cols = []
    for b in columns(B) if B and B[0] else []:
        x = ech.solve(b)
        if x is None:
            return None
        cols.append(x)
    return from_columns(cols, ech.n) if cols else [[] for _ in range(ech.n)]


def kernel(A: Matrix, ring: str = "Z", ncols: int | None = None) -> Matrix:
    """Basis of ``{x : A x = 0}`` as columns of an ``n x k`` matrix.

    Over Z the returned basis spans the full (saturated) kernel lattice.
    """
    if ring in RINGS:
        return Echelon(A, ring, ncols).kernel()
    sf = smith(A, ring, ncols, inverses=False)
    cols = [[sf.V[i][j] for i in range(sf.n)] for j in range(sf.rank, sf.n)]
    return from_columns(cols, sf.n)


def in_span(vectors: Matrix, b: Sequence, ring: str = "Z", nrows: int | None = None) -> bool:
    """Whether ``b`` is a ring combination of the columns of ``vectors``."""
    if not vectors or not vectors[0]:
        return all(v == 0 for v in b)
    return solve(vectors, b, ring) is not None


def contains(L: Matrix, M: Matrix, ring: str = "Z") -> bool:
    """Whether every column of ``M`` lies in the span of the columns of ``L``."""
    if not M or not M[0]:
        return True
    if not L or not L[0]:
        return is_zero(M)
    ech = Echelon(L, ring)
    return all(ech.solve(b) is not None for b in columns(M))


def column_basis(L: Matrix, ring: str = "Z", nrows: int | None = None) -> Matrix:
    """A basis (as columns) of the lattice / subspace spanned by ``L``'s columns."""
    m = len(L) if L else (nrows or 0)
    if not L or not L[0]:
        return [[] for _ in range(m)]
    sf = smith(L, ring)
    # L V = Uinv D, so the first ``rank`` columns of Uinv scaled by diag span.
    cols = [[sf.Uinv[i][j] * sf.diag[j] for i in range(m)] for j in range(sf.rank)]
    return from_columns(cols, m)


def rank(A: Matrix, ring: str = "Q") -> int:
    if not A or not A[0]:
        return 0
    return smith(A, "Q").rank


# ---------------------------------------------------------------------------
# fast paths over Q: plain Gauss-Jordan elimination
# ---------------------------------------------------------------------------


def rref(A: Matrix, ncols: int | None = None):
    """Reduced row echelon form over Q; returns (R, pivot columns)."""
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    R = [[Fraction(a) for a in row] for row in A]
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        k = next((i for i in range(r, m) if R[i][c] != 0), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        inv = 1 / R[r][c]
        R[r] = [v * inv for v in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                q = R[i][c]
                R[i] = [a - q * b for a, b in zip(R[i], R[r])]
        piv.append(c)
        r += 1
    return R, piv


def _solve_q(A: Matrix, b: Sequence, ncols: int | None = None):
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    if len(b) != m:
        raise ValueError(f"rhs length {len(b)} != {m}")
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = R[i][n]
    return x


def _kernel_q(A: Matrix, ncols: int | None = None) -> Matrix:
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    R, piv = rref(A, n) if m else ([], [])
    free = [c for c in range(n) if c not in piv]
    cols = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        cols.append(v)
    return from_columns(cols, n)


def _egcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class Echelon:
    """Column echelon form ``A @ T.T = L`` (``T`` unimodular over the ring).

    Obtained by row reduction of ``A.T``; good for repeated solves against
    the same matrix and for kernel lattices.
    """

    def __init__(self, A: Matrix, ring: str = "Z", ncols: int | None = None):
        check_ring(ring)
        m = len(A)
        n = len(A[0]) if m else (ncols or 0)
        self.m, self.n, self.ring = m, n, ring
        E = transpose(coerce(A, ring), n) if m else [[] for _ in range(n)]
        T = identity(n, ring)
        piv = []
        r = 0
        for c in range(m):
            if r == n:
                break
            rows = [i for i in range(r, n) if E[i][c] != 0]
            if not rows:
                continue
            if ring == "Q":
                k = rows[0]
                E[r], E[k] = E[k], E[r]
                T[r], T[k] = T[k], T[r]
                p = E[r][c]
                for i in range(r + 1, n):
                    if E[i][c] == 0:
                        continue
                    q = E[i][c] / p
                    E[i] = [a - q * b for a, b in zip(E[i], E[r])]
                    T[i] = [a - q * b for a, b in zip(T[i], T[r])]
            else:
                # Euclid on the column: bring the smallest entry up, reduce the rest
                while True:
                    k = min(rows, key=lambda i: abs(E[i][c]))
                    if k != r:
                        E[r], E[k] = E[k], E[r]
                        T[r], T[k] = T[k], T[r]
                    a = E[r][c]
                    Er, Tr = E[r], T[r]
                    for i in range(r + 1, n):
                        bi = E[i][c]
                        if bi == 0:
                            continue
                        q = (bi + (abs(a) // 2) * (1 if a > 0 else -1)) // a  # nearest quotient
                        E[i] = [x - q * y for x, y in zip(E[i], Er)]
                        T[i] = [x - q * y for x, y in zip(T[i], Tr)]
                    rows = [i for i in range(r, n) if E[i][c] != 0]
                    if rows == [r]:
                        break
                if E[r][c] < 0:
                    E[r] = [-x for x in E[r]]
                    T[r] = [-x for x in T[r]]
            piv.append(c)
            r += 1
        self.E, self.T, self.piv = E, T, piv
        self.rank = len(piv)

    def solve(self, b: Sequence):
        if len(b) != self.m:
            raise ValueError(f"rhs length {len(b)} != {self.m}")
        ring = self.ring
        b = coerce([b], ring)[0] if self.m else []
        E, piv = self.E, self.piv
        y = []
        res = list(b)
        # subtract contributions column by column of L = E.T
        for k, c in enumerate(piv):
            # residual at pivot row c must be divisible by pivot
            d = E[k][c]
            v = res[c]
            if ring == "Z":
                if v % d:
                    return None
                yk = v // d
            else:
                yk = v / d
            y.append(yk)
            if yk:
                Ek = E[k]
                res = [ri - yk * e for ri, e in zip(res, Ek)]
        if any(v != 0 for v in res):
            return None
        zero = Fraction(0) if ring == "Q" else 0
        x = [zero] * self.n
        for k, yk in enumerate(y):
            if yk:
                x = [xi + yk * t for xi, t in zip(x, self.T[k])]
        return x

    def kernel(self) -> Matrix:
        return from_columns([list(self.T[k]) for k in range(self.rank, self.n)], self.n)
