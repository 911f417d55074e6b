"""Quadrature primitives: Gauss-Legendre panels, running integrals, 2-D cells.

Running (indefinite) integrals on a panel use the spectral integration
matrix of the Gauss-Legendre interpolant, so iterated integrals are advanced
as a triangular system instead of nested quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as npleg


class ToleranceError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights on [0, 1]."""
    x, w = npleg.leggauss(n)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=None)
def running_matrix(n: int) -> np.ndarray:
    """``S[i, j] = int_0^{t_i} l_j(t) dt`` for the Lagrange basis on GL nodes in [0, 1]."""
    t, _ = gauss_legendre(n)
    # express the Lagrange basis in Legendre polynomials on [-1, 1]
    V = npleg.legvander(2 * t - 1, n - 1)          # V[i, k] = P_k(x_i)
    Vinv = np.linalg.inv(V)
    S = np.zeros((n, n))
    for k in range(n):
        c = np.zeros(n)
        c[k] = 1.0
        ci = npleg.legint(c, lbnd=-1)              # antiderivative from -1
        S[:, k] = npleg.legval(2 * t - 1, ci) / 2  # dx = 2 dt
    return S @ Vinv


# ---------------------------------------------------------------------------
# 1-D adaptive panels
# ---------------------------------------------------------------------------


def adaptive_panels(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                    tol: float = 1e-12, n: int = 20, breaks: Sequence[float] = (),
                    max_depth: int = 40, min_width: float = 1e-14,
                    max_panels: int = 50000) -> list[tuple[float, float]]:
    """Split ``[a, b]`` until the GL-``n`` rule on each panel agrees with its halves.

    ``f`` maps an array of parameters to an array of shape ``(len(t), m)``
    (several integrands at once); the criterion uses the max over columns.
    The tolerance is absolute and spread in proportion to panel width.
    """
    t, w = gauss_legendre(n)
    pts = sorted({a, b, *[c for c in breaks if a < c < b]})
    out = []
    stack = [(lo, hi, 0) for lo, hi in zip(pts[:-1], pts[1:])][::-1]
    total = b - a
    cache = {}

    def rule(lo, hi):
        key = (lo, hi)
        if key not in cache:
            vals = np.asarray(f(lo + (hi - lo) * t))
            if vals.ndim == 1:
                vals = vals[:, None]
            cache[key] = (hi - lo) * (w @ vals)
        return cache[key]

    while stack:
        if len(cache) > 3 * max_panels:
            raise ToleranceError(f"more than {max_panels} panels; tolerance {tol:.1e} below the noise floor")
        lo, hi, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        whole = rule(lo, hi)
        halves = rule(lo, mid) + rule(mid, hi)
        err = np.max(np.abs(whole - halves))
        budget = tol * max((hi - lo) / total, 1e-3)
        if err <= budget or depth >= max_depth or hi - lo < min_width:
            if err > 1e3 * budget and depth >= max_depth:
                raise ToleranceError(f"panel [{lo}, {hi}] did not converge (err {err:.2e})")
            out.append((lo, mid))
            out.append((mid, hi))
        else:
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    out.sort()
    return out


def integrate_1d(f, a, b, tol=1e-12, n=20, breaks=()):
    """Adaptive composite GL integral of a (vector-valued) function."""
    t, w = gauss_legendre(n)
    panels = adaptive_panels(f, a, b, tol, n, breaks)
    total = 0
    for lo, hi in panels:
        vals = np.asarray(f(lo + (hi - lo) * t))
        total = total + (hi - lo) * (w @ vals)
    return total


# ---------------------------------------------------------------------------
# 2-D adaptive cells with Duffy corners
# ---------------------------------------------------------------------------


@dataclass
class Cell:
    x0: float
    x1: float
    y0: float
    y1: float
    corner: tuple | None = None   # singular corner (x, y) if any
    depth: int = 0


@dataclass
class Result2D:
    value: complex
    error: float
    ncells: int
    worst: list = field(default_factory=list)


def _tensor_rule(n):
    t, w = gauss_legendre(n)
    X, Y = np.meshgrid(t, t, indexing="ij")
    W = np.outer(w, w)
    return X.ravel(), Y.ravel(), W.ravel()


def cell_rule(f, c: Cell, n: int = 12):
    """Tensor GL on a rectangle; Duffy split into two triangles at a singular corner."""
    U, V, W = _tensor_rule(n)
    dx, dy = c.x1 - c.x0, c.y1 - c.y0
    if c.corner is None:
        xs = c.x0 + dx * U
        ys = c.y0 + dy * V
        vals = f(xs, ys)
        return dx * dy * np.tensordot(W, vals, axes=(0, 0))
    cx, cy = c.corner
    corners = [(c.x0, c.y0), (c.x1, c.y0), (c.x1, c.y1), (c.x0, c.y1)]
    k = min(range(4), key=lambda i: (corners[i][0] - cx) ** 2 + (corners[i][1] - cy) ** 2)
    P0 = np.array(corners[k])
    P1 = np.array(corners[(k + 1) % 4])
    P2 = np.array(corners[(k + 2) % 4])
    P3 = np.array(corners[(k + 3) % 4])
    total = 0
    for A, B in ((P1, P2), (P2, P3)):
        # (u, v) -> P0 + u (A - P0) + u v (B - A), Jacobian u |det(A - P0, B - A)|
        e1 = A - P0
        e2 = B - A
        det = abs(e1[0] * e2[1] - e1[1] * e2[0])
        xs = P0[0] + U * e1[0] + U * V * e2[0]
        ys = P0[1] + U * e1[1] + U * V * e2[1]
        vals = f(xs, ys)
        jac = (U * det)
        total = total + np.tensordot(W * jac, vals, axes=(0, 0))
    return total


def _split(c: Cell) -> list[Cell]:
    xm = 0.5 * (c.x0 + c.x1)
    ym = 0.5 * (c.y0 + c.y1)
    kids = [Cell(c.x0, xm, c.y0, ym), Cell(xm, c.x1, c.y0, ym),
            Cell(c.x0, xm, ym, c.y1), Cell(xm, c.x1, ym, c.y1)]
    for k in kids:
        k.depth = c.depth + 1
        if c.corner is not None:
            cx, cy = c.corner
            if cx in (k.x0, k.x1) and cy in (k.y0, k.y1):
                k.corner = c.corner
    return kids


def adaptive_2d(f, xbreaks: Sequence[float], ybreaks: Sequence[float],
                singular: Sequence[tuple] = (), tol: float = 1e-10, n: int = 12,
                max_cells: int = 200000, max_depth: int = 30, rel: bool = False) -> Result2D:
    """Integrate ``f(x, y)`` (vectorised, values of shape ``(len, m)`` or ``(len,)``).

    The domain is the union of the grid cells given by the break lists.
    Every singular point must lie on a grid node; cells touching one use the
    Duffy rule there.  Refinement is global-error driven: the cell with the
    largest local error estimate is split first.
    """
    import heapq

    xb = sorted(set(xbreaks))
    yb = sorted(set(ybreaks))
    sing = [tuple(p) for p in singular]
    cells = []
    todo = [Cell(x0, x1, y0, y1) for x0, x1 in zip(xb[:-1], xb[1:])
            for y0, y1 in zip(yb[:-1], yb[1:])]
    while todo:
        c = todo.pop()
        hits = [(sx, sy) for (sx, sy) in sing if sx in (c.x0, c.x1) and sy in (c.y0, c.y1)]
        if len(hits) > 1:
            # at most one singular corner per cell
            todo.extend(_split(c))
            continue
        c.corner = hits[0] if hits else None
        cells.append(c)

    def estimate(c):
        whole = cell_rule(f, c, n)
        kids = _split(c)
        parts = [cell_rule(f, k, n) for k in kids]
        fine = sum(parts)
        err = float(np.max(np.abs(np.atleast_1d(fine - whole))))
        return err, fine, kids, parts

    heap = []
    total = 0
    counter = 0
    for c in cells:
        err, fine, kids, parts = estimate(c)
        total = total + fine
        heapq.heappush(heap, (-err, counter, c, fine, kids, parts))
        counter += 1
    errsum = sum(-h[0] for h in heap)
    ncells = len(heap)

    def target():
        if rel:
            return tol * max(float(np.max(np.abs(np.atleast_1d(total)))), 1e-300)
        return tol

    while errsum > target():
        if ncells > max_cells:
            worst = [(h[2].x0, h[2].x1, h[2].y0, h[2].y1, -h[0]) for h in heapq.nsmallest(5, heap)]
            raise ToleranceError(f"2-D quadrature stalled at error {errsum:.2e} "
                                 f"with {ncells} cells; worst cells {worst}")
        negerr, _, c, fine, kids, parts = heapq.heappop(heap)
        errsum += negerr
        total = total - fine
        if c.depth >= max_depth:
            total = total + fine
            continue
        for k, pk in zip(kids, parts):
            err, kfine, kkids, kparts = estimate(k)
            total = total + kfine
            errsum += err
            heapq.heappush(heap, (-err, counter, k, kfine, kkids, kparts))
            counter += 1
            ncells += 1
    worst = [(h[2].x0, h[2].x1, h[2].y0, h[2].y1, -h[0]) for h in heapq.nsmallest(3, heap)]
    return Result2D(total, errsum, ncells, worst)
