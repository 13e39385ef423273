"""Orbit hit counting and classical discrepancy.

count_hits is the central quantity: how many points of the orbit
{theta + n*alpha} with 1 <= n <= N land in a semi-algebraic set.  Counting
runs in chunks (optionally on a thread pool); integer tallies merge by
addition, so the result is independent of chunking and thread count.

classical_discrepancy measures the worst deviation of empirical anchored-box
counts from Lebesgue measure.  Exact star modes exist for b <= 2; the
approximate mode restricts the sup to a candidate corner grid and is a
certified lower bound.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .semialgebraic import SemiAlgebraicSet, contains_many, degree, measure_estimate
from .torus import Frequency, TorusVector, _as_coords, orbit_points, torus_norms

__all__ = [
    "HitCountResult",
    "ExponentFit",
    "SeparationResult",
    "count_hits",
    "classical_discrepancy",
    "separation_check",
    "fit_exponent",
]

_CHUNK = 1 << 16


def _thread_count() -> int:
    raw = os.environ.get("KRONORBIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class HitCountResult:
    N: int
    count: int
    set_degree: int
    set_measure_estimate: float
    theta: TorusVector
    alpha: Frequency

    def __post_init__(self):
        if not (0 <= self.count <= self.N):
            raise ValueError("count must lie in [0, N]")


@dataclass(frozen=True)
class ExponentFit:
    points: tuple
    slope: float
    intercept: float
    r_squared: float


class SeparationResult(NamedTuple):
    ok: bool
    min_gap: float
    argmin: int


def count_hits(
    theta,
    alpha,
    N: int,
    S: SemiAlgebraicSet,
    eq_tol: float = 0.0,
    measure_samples: int = 4096,
    measure_seed: int = 0,
) -> HitCountResult:
    """Count n in [1, N] with {theta + n*alpha} in S.

    Exact for the membership semantics of `contains`; the n = 0 point is
    not included (test it with a separate membership call when needed).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    tc = _as_coords(theta)
    ac = _as_coords(alpha)
    starts = list(range(1, N + 1, _CHUNK))

    def tally(start: int) -> int:
        m = min(_CHUNK, N + 1 - start)
        pts = orbit_points(tc, ac, start, m)
        return int(contains_many(S, pts, eq_tol).sum())

    workers = _thread_count()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(tally, starts))
    else:
        total = sum(tally(s) for s in starts)

    mean, _ = measure_estimate(S, measure_samples, measure_seed, eq_tol)
    theta_v = theta if isinstance(theta, TorusVector) else TorusVector(tc)
    alpha_v = alpha if isinstance(alpha, Frequency) else Frequency(ac)
    return HitCountResult(
        N=N,
        count=total,
        set_degree=degree(S),
        set_measure_estimate=mean,
        theta=theta_v,
        alpha=alpha_v,
    )


def _points_matrix(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points
        if arr.ndim == 1:
            arr = arr[:, None]
        return np.asarray(arr, dtype=np.float64)
    rows = []
    for p in points:
        rows.append(_as_coords(p))
    if not rows:
        raise ValueError("points must be nonempty")
    return np.asarray(rows, dtype=np.float64)


def _star_1d(x: np.ndarray) -> float:
    # max_i max(i/N - x_(i), x_(i) - (i-1)/N) over sorted points
    xs = np.sort(x[:, 0])
    N = len(xs)
    up = np.arange(1, N + 1) / N - xs
    dn = xs - np.arange(0, N) / N
    return float(max(up.max(), dn.max()))


def _star_2d(pts: np.ndarray) -> float:
    # Exact sup over anchored boxes [0,t]x[0,u]: sweep x-candidates, and for
    # each one scan the y-order statistics of the active points.  O(N^2).
    N = len(pts)
    order = np.argsort(pts[:, 0], kind="stable")
    xs = pts[order, 0]
    ys = pts[order, 1]
    tvals = np.unique(np.concatenate([xs, [1.0]]))
    best = 0.0
    for t in tvals:
        m_cl = int(np.searchsorted(xs, t, side="right"))  # x <= t
        m_op = int(np.searchsorted(xs, t, side="left"))   # x <  t
        # overshoot: closed counts at u in {active y} and u -> 1
        if m_cl:
            yc = np.sort(ys[:m_cl])
            cnt_le = np.searchsorted(yc, yc, side="right")
            best = max(best, float(np.max(cnt_le / N - t * yc)))
            best = max(best, m_cl / N - t)
        # undershoot: open counts at u in {active y} and u = 1
        if m_op:
            yo = np.sort(ys[:m_op])
            cnt_lt = np.searchsorted(yo, yo, side="left")
            best = max(best, float(np.max(t * yo - cnt_lt / N)))
            best = max(best, t - m_op / N)
        else:
            best = max(best, t)
    return best


def _anchored_approx(pts: np.ndarray, grid: int) -> float:
    """Lower bound on the star discrepancy from a candidate corner lattice.

    Candidates per axis: a uniform grid of `grid` values plus up to `grid`
    point coordinates.  Counts at all corners come from a binned cumulative
    sum, with closed (x <= t) and open (x < t) variants.
    """
    N, b = pts.shape
    cands = []
    for j in range(b):
        uni = np.arange(1, grid + 1) / grid
        coords = np.unique(pts[:, j])
        if len(coords) > grid:
            coords = coords[:: max(1, len(coords) // grid)][:grid]
        cands.append(np.unique(np.concatenate([uni, coords])))
    sizes = [len(c) + 1 for c in cands]
    total = int(np.prod(sizes))
    if total > 1 << 26:
        raise ValueError("candidate corner lattice too large; lower `grid`")
    idx_le = [np.searchsorted(cands[j], pts[:, j], side="left") for j in range(b)]
    idx_lt = [np.searchsorted(cands[j], pts[:, j], side="right") for j in range(b)]

    def corner_counts(idx) -> np.ndarray:
        flat = idx[0]
        for j in range(1, b):
            flat = flat * sizes[j] + idx[j]
        M = np.bincount(flat, minlength=total).reshape(sizes).astype(np.float64)
        for ax in range(b):
            M = np.cumsum(M, axis=ax)
        return M

    closed = corner_counts(idx_le)
    opened = corner_counts(idx_lt)
    vol = cands[0]
    for j in range(1, b):
        vol = np.multiply.outer(vol, cands[j])
    sl = tuple(slice(0, len(c)) for c in cands)
    d1 = np.abs(closed[sl] / N - vol)
    d2 = np.abs(opened[sl] / N - vol)
    return float(max(d1.max(), d2.max()))


def classical_discrepancy(points, family: str = "star", grid: int = 256) -> float:
    """Worst-case anchored-box deviation of a point set from uniformity.

    family "star": exact; supported for b <= 2 only (the 2-d sweep is
    O(N^2)).  family "anchored-boxes-approx": sup restricted to boxes with
    corners on point coordinates plus a grid refinement; the result is a
    lower bound on the exact value.
    """
    pts = _points_matrix(points)
    N, b = pts.shape
    if N < 1:
        raise ValueError("points must be nonempty")
    if family == "star":
        if b == 1:
            return _star_1d(pts)
        if b == 2:
            return _star_2d(pts)
        raise ValueError("exact star mode supports b <= 2 only; use anchored-boxes-approx")
    if family == "anchored-boxes-approx":
        return _anchored_approx(pts, grid)
    raise ValueError("family must be 'star' or 'anchored-boxes-approx'")


def separation_check(alpha, N: int, gamma: float, tau: float) -> SeparationResult:
    """Smallest torus norm among {k*alpha}, k < N, versus gamma / N^tau.

    Two orbit points with indices n != n' in [1, N] can share a ball of
    radius gamma/(2 N^tau) only if some gap {k*alpha}, k = n'-n, has torus
    norm <= gamma/N^tau; `ok` certifies that no gap does.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    coords = _as_coords(alpha)
    theta0 = (0.0,) * len(coords)
    best = math.inf
    best_k = 0
    for start in range(1, N, _CHUNK):
        m = min(_CHUNK, N - start)
        pts = orbit_points(theta0, coords, start, m)
        norms = torus_norms(pts)
        i = int(np.argmin(norms))
        if norms[i] < best:
            best = float(norms[i])
            best_k = start + i
    threshold = gamma / N ** tau
    return SeparationResult(ok=best > threshold, min_gap=best, argmin=best_k)


def fit_exponent(points: Sequence[Tuple[int, int]]) -> ExponentFit:
    """OLS of log(max(count, 1)) against log N.

    Needs at least three distinct N values.
    """
    pts = [(int(n), int(c)) for n, c in points]
    if len({n for n, _ in pts}) < 3:
        raise ValueError("need at least 3 points with distinct N")
    if any(c < 0 for _, c in pts):
        raise ValueError("counts must be >= 0")
    x = np.log([n for n, _ in pts])
    y = np.log([max(c, 1) for _, c in pts])
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    sst = float(((y - ym) ** 2).sum())
    r2 = 1.0 if sst == 0.0 else 1.0 - float((resid ** 2).sum()) / sst
    return ExponentFit(points=tuple(pts), slope=slope, intercept=intercept, r_squared=max(0.0, min(1.0, r2)))
