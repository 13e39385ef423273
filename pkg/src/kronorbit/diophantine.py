"""Frequency classification by brute-force margin scans.

A scan certifies a lower bound gamma on the torus distance of lattice
combinations of alpha, up to the scan bound only; reports carry that bound
explicitly and downstream checks must stay inside the certified range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .torus import Frequency, _as_coords, orbit_points, torus_norms

__all__ = [
    "DiophantineReport",
    "wdc_margin",
    "dc_margin",
    "continued_fraction",
]

CF_MAX_TERMS = 40  # double precision stops being trustworthy past this

_DC_BUDGET = 40_000_000  # max lattice points a DC scan may enumerate


@dataclass(frozen=True)
class DiophantineReport:
    kind: str  # "WDC" or "DC"
    tau: float
    gamma_lower: float
    scan_bound: int
    argmin: Union[int, Tuple[int, ...]]


def wdc_margin(alpha, tau: float, n_max: int) -> DiophantineReport:
    """Scan min over 1 <= n <= n_max of |n|^tau * dist(n*alpha, Z^b).

    A torus distance of exactly 0 is a rational resonance: gamma_lower is 0
    and argmin records the smallest resonant n.
    """
    coords = _as_coords(alpha)
    b = len(coords)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if tau < 1.0 / b:
        raise ValueError(f"weak condition needs tau >= 1/b = {1.0 / b}")
    theta0 = (0.0,) * b
    best = math.inf
    best_n = 0
    chunk = 1 << 17
    for start in range(1, n_max + 1, chunk):
        m = min(chunk, n_max + 1 - start)
        pts = orbit_points(theta0, coords, start, m)
        norms = torus_norms(pts)
        if np.any(norms == 0.0):
            n = start + int(np.nonzero(norms == 0.0)[0][0])
            return DiophantineReport("WDC", tau, 0.0, n_max, n)
        ns = np.arange(start, start + m, dtype=np.float64)
        margins = ns ** tau * norms
        i = int(np.argmin(margins))
        if margins[i] < best:
            best = float(margins[i])
            best_n = start + i
    return DiophantineReport("WDC", tau, best, n_max, best_n)


def _shell_points(b: int, s: int) -> np.ndarray:
    """Integer vectors with sup-norm exactly s, one per +-pair.

    The representative has its first nonzero coordinate positive; the torus
    distance of <n, alpha> is the same for n and -n.
    """
    rng = np.arange(-s, s + 1)
    grids = np.meshgrid(*([rng] * b), indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    on_shell = np.abs(pts).max(axis=1) == s
    pts = pts[on_shell]
    lead = np.zeros(len(pts), dtype=bool)
    decided = np.zeros(len(pts), dtype=bool)
    for j in range(b):
        col = pts[:, j]
        lead |= (~decided) & (col > 0)
        decided |= col != 0
    return pts[lead]


def dc_margin(alpha, tau: float, box_bound: int) -> DiophantineReport:
    """Scan min over 0 < |n|_inf <= box_bound of |n|_inf^tau * dist(<n, alpha>, Z).

    Shells are scanned inside out so a rational resonance short-circuits.
    For b = 1 this agrees exactly with wdc_margin at the same bound.
    """
    coords = _as_coords(alpha)
    b = len(coords)
    if box_bound < 1:
        raise ValueError("box_bound must be >= 1")
    if tau < b:
        raise ValueError(f"Diophantine condition needs tau >= b = {b}")
    cost = (2 * box_bound + 1) ** b
    if cost > _DC_BUDGET:
        raise ValueError(
            f"DC scan would enumerate {cost} lattice points, over the {_DC_BUDGET} budget"
        )

    if b == 1:
        # <n, alpha> = n*alpha_1; reuse the compensated orbit kernel so the
        # b = 1 values agree bitwise with wdc_margin.
        rep = wdc_margin(coords, tau, box_bound)
        return DiophantineReport("DC", tau, rep.gamma_lower, box_bound, rep.argmin)

    a = np.asarray(coords, dtype=np.float64)
    best = math.inf
    best_n: Tuple[int, ...] = ()
    for s in range(1, box_bound + 1):
        pts = _shell_points(b, s)
        dots = pts @ a
        f = dots - np.floor(dots)
        dist = np.minimum(f, 1.0 - f)
        dist = np.where(dist < 2.0 ** -50, 0.0, dist)
        if np.any(dist == 0.0):
            i = int(np.nonzero(dist == 0.0)[0][0])
            return DiophantineReport("DC", tau, 0.0, box_bound, tuple(int(x) for x in pts[i]))
        margins = float(s) ** tau * dist
        i = int(np.argmin(margins))
        if margins[i] < best:
            best = float(margins[i])
            best_n = tuple(int(x) for x in pts[i])
    return DiophantineReport("DC", tau, best, box_bound, best_n)


def continued_fraction(alpha_scalar: float, k: int):
    """Partial quotients a_1..a_k of the regular continued fraction.

    Stops early when the remainder is rational to working precision, so the
    returned sequence may be shorter than k.  k is capped at 40.
    """
    x = float(alpha_scalar)
    if not (0.0 < x < 1.0):
        raise ValueError("alpha_scalar must lie in (0, 1)")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > CF_MAX_TERMS:
        raise ValueError(f"k = {k} beyond the k <= {CF_MAX_TERMS} reliability horizon")
    out = []
    r = x
    for _ in range(k):
        inv = 1.0 / r
        a = int(math.floor(inv))
        out.append(a)
        r = inv - a
        if r < 1e-12:
            break
    return tuple(out)
