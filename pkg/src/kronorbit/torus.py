"""Arithmetic on the b-dimensional torus [0,1)^b.

Fractional parts, orbit points theta + n*alpha mod Z^b, torus norms, and
the angular distance between directions.  Orbit points are computed
independently per index n with a compensated product (never by cumulative
addition), so the per-point error stays near one ulp even for n up to 2^40.

Scalar entry points and the vectorized kernels share the exact same
floating-point operation sequence; a scalar call and the matching row of a
vectorized call are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "TorusVector",
    "Frequency",
    "SNAP_TOL",
    "MAX_ORBIT_INDEX",
    "frac",
    "orbit_point",
    "orbit_points",
    "torus_norm",
    "angular_dist",
    "subspace_angular_dist",
]

_SPLIT = 134217729.0  # 2^27 + 1, Veltkamp splitting constant

# Values within this distance of an integer reduce to exactly 0.
SNAP_TOL = 2.0 ** -50

# Accuracy budget: orbit indices beyond this are rejected.
MAX_ORBIT_INDEX = 2 ** 40


@dataclass(frozen=True)
class TorusVector:
    """A point of [0,1)^b; every coordinate c satisfies 0 <= c < 1."""

    coords: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coords)
        if len(c) < 1:
            raise ValueError("torus vector needs dimension >= 1")
        for x in c:
            if not (0.0 <= x < 1.0):
                raise ValueError(f"coordinate {x!r} outside [0, 1)")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.float64)


@dataclass(frozen=True)
class Frequency:
    """A frequency vector alpha; `description` is documentation only.

    Coordinates are plain doubles; an exact tag like "sqrt(2) mod 1" is
    metadata and never enters any computation.
    """

    coords: tuple
    description: Optional[str] = None

    def __post_init__(self):
        c = tuple(float(x) for x in self.coords)
        if len(c) < 1:
            raise ValueError("frequency needs dimension >= 1")
        for x in c:
            if not math.isfinite(x):
                raise ValueError("frequency coordinates must be finite")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.float64)

    def reduced(self) -> TorusVector:
        return frac(self.coords)


def _as_coords(x) -> tuple:
    if isinstance(x, (TorusVector, Frequency)):
        return x.coords
    if isinstance(x, np.ndarray):
        return tuple(float(v) for v in x)
    if isinstance(x, (int, float)):
        return (float(x),)
    return tuple(float(v) for v in x)


def _frac_scalar(x: float) -> float:
    f = x - math.floor(x)
    g = f - math.floor(f)
    if min(g, 1.0 - g) < SNAP_TOL:
        return 0.0
    return g


def frac(x) -> TorusVector:
    """Componentwise fractional part, with 0 <= {x} < 1.

    Values within 2^-50 of an integer reduce to exactly 0, consistent with
    the half-open convention.
    """
    coords = _as_coords(x)
    for v in coords:
        if not math.isfinite(v):
            raise ValueError(f"frac of non-finite value {v!r}")
    return TorusVector(tuple(_frac_scalar(v) for v in coords))


def _orbit_scalar(theta_j: float, alpha_j: float, n: float) -> float:
    # n*alpha as an exact hi+lo pair (Dekker two-product), then reduce.
    hi = n * alpha_j
    ah = _SPLIT * n
    ah = ah - (ah - n)
    al = n - ah
    bh = _SPLIT * alpha_j
    bh = bh - (bh - alpha_j)
    bl = alpha_j - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    f = hi - math.floor(hi)
    g = f + lo + theta_j
    g = g - math.floor(g)
    g = g - math.floor(g)
    if min(g, 1.0 - g) < SNAP_TOL:
        return 0.0
    return g


def orbit_point(theta: TorusVector, alpha: Frequency, n: int) -> TorusVector:
    """The orbit point {theta + n*alpha}, computed directly from n.

    Requires 0 <= n <= 2^40 (accuracy budget).  Coordinate error is below
    1e-12 for n <= 1e9.
    """
    if n < 0 or n > MAX_ORBIT_INDEX:
        raise ValueError(f"orbit index {n} outside [0, 2^40] accuracy budget")
    tc = _as_coords(theta)
    ac = _as_coords(alpha)
    if len(tc) != len(ac):
        raise ValueError("theta and alpha dimensions differ")
    nn = float(n)
    return TorusVector(tuple(_orbit_scalar(t, a, nn) for t, a in zip(tc, ac)))


def orbit_points(theta, alpha, n_start: int, count: int) -> np.ndarray:
    """Orbit points for n = n_start .. n_start+count-1 as a (count, b) array.

    Row i is bitwise identical to orbit_point(theta, alpha, n_start + i).
    """
    if n_start < 0 or n_start + count - 1 > MAX_ORBIT_INDEX:
        raise ValueError("orbit index range outside [0, 2^40] accuracy budget")
    t = np.asarray(_as_coords(theta), dtype=np.float64)[None, :]
    a = np.asarray(_as_coords(alpha), dtype=np.float64)[None, :]
    n = np.arange(n_start, n_start + count, dtype=np.float64)[:, None]
    hi = n * a
    ah = _SPLIT * n
    ah = ah - (ah - n)
    al = n - ah
    bh = _SPLIT * a
    bh = bh - (bh - a)
    bl = a - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    f = hi - np.floor(hi)
    g = f + lo + t
    g = g - np.floor(g)
    g = g - np.floor(g)
    return np.where(np.minimum(g, 1.0 - g) < SNAP_TOL, 0.0, g)


def torus_norm(x) -> float:
    """Distance to the integer lattice: max_j min(c_j, 1 - c_j)."""
    coords = _as_coords(x)
    if isinstance(x, (TorusVector,)):
        cs = coords
    else:
        cs = frac(coords).coords
    return max(min(c, 1.0 - c) for c in cs)


def torus_norms(points: np.ndarray) -> np.ndarray:
    """Vectorized torus_norm for an array of points already in [0,1)^b."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return np.minimum(pts, 1.0 - pts).max(axis=1)


def angular_dist(u, v) -> float:
    """sqrt(1 - <u,v>^2 / (<u,u><v,v>)): 0 iff parallel, 1 iff orthogonal."""
    uu = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    nu = float(uu @ uu)
    nv = float(vv @ vv)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angular distance undefined for the zero vector")
    c2 = float(uu @ vv) ** 2 / (nu * nv)
    return math.sqrt(max(0.0, 1.0 - min(c2, 1.0)))


def subspace_angular_dist(u, basis) -> float:
    """Angular distance from u to the span of the basis vectors.

    Equals min over nonzero v in the span of angular_dist(u, v), computed as
    sqrt(1 - |proj u|^2 / |u|^2) with an orthogonal projection.  An empty
    basis gives 1.0 (the span is trivial).  A rank-deficient basis is
    rejected.
    """
    uu = np.asarray(u, dtype=np.float64)
    nu = float(uu @ uu)
    if nu == 0.0:
        raise ValueError("angular distance undefined for the zero vector")
    vecs = [np.asarray(_as_coords(b), dtype=np.float64) for b in basis]
    if not vecs:
        return 1.0
    B = np.column_stack(vecs)
    q, r = np.linalg.qr(B)
    diag = np.abs(np.diag(r))
    scale = max(np.abs(B).max(), 1.0)
    if np.any(diag <= 1e-12 * scale):
        raise ValueError("basis vectors are linearly dependent")
    proj = q.T @ uu
    c2 = float(proj @ proj) / nu
    return math.sqrt(max(0.0, 1.0 - min(c2, 1.0)))
