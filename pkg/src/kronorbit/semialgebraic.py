"""Semi-algebraic subsets of [0,1]^b.

A set is a union of clauses; each clause is a conjunction of polynomial
sign conditions (>= 0, <= 0, == 0).  Membership is decided exactly by
evaluating the stored polynomials; equality conditions carry an explicit
tolerance because measure-zero sets cannot be hit by floating-point
probes otherwise.

The scalar evaluator and the vectorized one run the identical sequence of
IEEE operations (same term order, same compensated accumulation), so
point-by-point decisions agree bitwise between the two paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .torus import TorusVector

__all__ = [
    "Polynomial",
    "SignCondition",
    "SemiAlgebraicSet",
    "CoverReport",
    "evaluate",
    "contains",
    "contains_many",
    "degree",
    "measure_estimate",
    "grid_cover_count",
]

RELATIONS = (">=", "<=", "==")


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial: terms (coefficient, exponent tuple), fixed order."""

    terms: tuple

    def __post_init__(self):
        norm = []
        seen = set()
        dim = None
        for coeff, exps in self.terms:
            e = tuple(int(x) for x in exps)
            if any(x < 0 for x in e):
                raise ValueError("exponents must be nonnegative")
            if dim is None:
                dim = len(e)
            elif len(e) != dim:
                raise ValueError("inconsistent term dimensions")
            if e in seen:
                raise ValueError(f"duplicate exponent tuple {e}")
            seen.add(e)
            c = float(coeff)
            if not math.isfinite(c):
                raise ValueError("coefficients must be finite")
            norm.append((c, e))
        if dim is None:
            raise ValueError("polynomial needs at least one term")
        object.__setattr__(self, "terms", tuple(norm))

    @property
    def dim(self) -> int:
        return len(self.terms[0][1])

    @property
    def degree(self) -> int:
        return max(sum(e) for _, e in self.terms)


@dataclass(frozen=True)
class SignCondition:
    poly_index: int
    relation: str

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}")


@dataclass(frozen=True)
class SemiAlgebraicSet:
    """Union-of-intersections of polynomial sign conditions.

    `declared_degree` may exceed the computed degree s*d; when absent the
    computed value is reported.
    """

    polys: tuple
    clauses: tuple
    declared_degree: Optional[int] = None

    def __post_init__(self):
        polys = tuple(self.polys)
        dims = {p.dim for p in polys}
        if len(dims) > 1:
            raise ValueError("polynomials have mixed dimensions")
        clauses = []
        for clause in self.clauses:
            conds = tuple(clause)
            for c in conds:
                if not (0 <= c.poly_index < len(polys)):
                    raise ValueError(f"condition references missing polynomial {c.poly_index}")
            clauses.append(conds)
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "clauses", tuple(clauses))

    @property
    def dim(self) -> int:
        if not self.polys:
            raise ValueError("empty set has no intrinsic dimension")
        return self.polys[0].dim


@dataclass(frozen=True)
class CoverReport:
    epsilon: float
    cell_count: int
    grid_side: int

    def __post_init__(self):
        if self.cell_count < 0:
            raise ValueError("negative cell count")


def _points_array(x, dim=None) -> np.ndarray:
    if isinstance(x, TorusVector):
        arr = x.as_array()[None, :]
    else:
        arr = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"point dimension {arr.shape[1]} != polynomial dimension {dim}")
    return arr


def _evaluate_many(poly: Polynomial, pts: np.ndarray) -> np.ndarray:
    # Fixed term order with Neumaier-compensated accumulation; the scalar
    # path routes through here so both paths share every rounding.
    m = pts.shape[0]
    s = np.zeros(m)
    comp = np.zeros(m)
    for coeff, exps in poly.terms:
        t = np.full(m, coeff)
        for j, e in enumerate(exps):
            xj = pts[:, j]
            for _ in range(e):
                t = t * xj
        tot = s + t
        comp = comp + np.where(np.abs(s) >= np.abs(t), (s - tot) + t, (t - tot) + s)
        s = tot
    return s + comp


def evaluate(poly: Polynomial, x) -> float:
    """Evaluate at one point (direct term sum, compensated accumulation)."""
    pts = _points_array(x, poly.dim)
    if pts.shape[0] != 1:
        raise ValueError("evaluate takes a single point; use contains_many for batches")
    return float(_evaluate_many(poly, pts)[0])


def contains_many(S: SemiAlgebraicSet, pts, eq_tol: float = 0.0) -> np.ndarray:
    """Boolean membership mask for an array of points."""
    if eq_tol < 0:
        raise ValueError("eq_tol must be >= 0")
    arr = _points_array(pts, S.polys[0].dim if S.polys else None)
    m = arr.shape[0]
    if not S.clauses:
        return np.zeros(m, dtype=bool)
    values = {}
    needed = {c.poly_index for clause in S.clauses for c in clause}
    for i in needed:
        values[i] = _evaluate_many(S.polys[i], arr)
    result = np.zeros(m, dtype=bool)
    for clause in S.clauses:
        ok = np.ones(m, dtype=bool)
        for c in clause:
            v = values[c.poly_index]
            if c.relation == ">=":
                ok &= v >= 0.0
            elif c.relation == "<=":
                ok &= v <= 0.0
            else:
                ok &= np.abs(v) <= eq_tol
        result |= ok
    return result


def contains(S: SemiAlgebraicSet, x, eq_tol: float = 0.0) -> bool:
    """True iff some clause has all of its sign conditions satisfied.

    ">=0" and "<=0" compare strictly against 0; "==0" means |P(x)| <= eq_tol.
    An empty clause list is the empty set.
    """
    return bool(contains_many(S, x, eq_tol)[0])


def degree(S: SemiAlgebraicSet) -> int:
    """s*d for the stored representation (s polynomials, max degree d)."""
    if not S.polys:
        return 0
    return len(S.polys) * max(p.degree for p in S.polys)


def measure_estimate(
    S: SemiAlgebraicSet,
    samples: int,
    seed: int,
    eq_tol: float = 0.0,
) -> Tuple[float, float]:
    """Monte Carlo estimate of Leb(S intersect [0,1]^b) with binomial stderr.

    Deterministic given the seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    b = S.dim if S.polys else 1
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    chunk = 1 << 16
    while remaining > 0:
        m = min(chunk, remaining)
        pts = rng.random((m, b))
        hits += int(contains_many(S, pts, eq_tol).sum())
        remaining -= m
    mean = hits / samples
    stderr = math.sqrt(mean * (1.0 - mean) / samples)
    return mean, stderr


def grid_cover_count(
    S: SemiAlgebraicSet,
    epsilon: float,
    probe_density: int = 4,
    eq_tol: float = 0.0,
    max_probes: int = 1 << 33,
) -> CoverReport:
    """Count grid cells of side epsilon whose probe lattice meets S.

    [0,1]^b is split into ceil(1/epsilon)^b cells; each cell carries a
    probe_density^b lattice of interior probes.  A cell counts when any of
    its probes lies in S.  Probes can miss a set between lattice points, so
    the count may undercount cells; callers validating covering laws should
    use sets (or an eq_tol) for which probe hits are provably sufficient.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    if probe_density < 1:
        raise ValueError("probe_density must be >= 1")
    b = S.dim if S.polys else 1
    grid_side = int(math.ceil(1.0 / epsilon))
    total_probes = (grid_side * probe_density) ** b
    if total_probes > max_probes:
        raise ValueError(
            f"cover scan needs {total_probes} probes, over the {max_probes} budget"
        )
    offs = (np.arange(probe_density) + 0.5) / probe_density * epsilon
    # Per-axis probe coordinates, identical formula on every axis so that
    # symmetric sets (like the diagonal) see bitwise-equal probe values.
    axis = np.minimum((np.arange(grid_side)[:, None] * epsilon + offs[None, :]), 1.0)
    if b == 1:
        mask = contains_many(S, axis.reshape(-1, 1), eq_tol)
        cells = int(mask.reshape(grid_side, probe_density).any(axis=1).sum())
        return CoverReport(epsilon=epsilon, cell_count=cells, grid_side=grid_side)

    flat = axis.reshape(-1)  # grid_side * probe_density values along one axis
    npb = grid_side * probe_density
    # Chunk over the leading axis to bound memory.
    row_chunk = max(1, int(4e6 // (npb ** (b - 1) * probe_density)) )
    count = 0
    rest_shape = (npb,) * (b - 1)
    rest_grids = np.meshgrid(*([flat] * (b - 1)), indexing="ij")
    rest = np.stack([g.reshape(-1) for g in rest_grids], axis=1)  # (npb^{b-1}, b-1)
    for c0 in range(0, grid_side, row_chunk):
        c1 = min(c0 + row_chunk, grid_side)
        lead = axis[c0:c1].reshape(-1)  # ((c1-c0)*pd,)
        pts = np.empty((lead.size * rest.shape[0], b))
        pts[:, 0] = np.repeat(lead, rest.shape[0])
        pts[:, 1:] = np.tile(rest, (lead.size, 1))
        mask = contains_many(S, pts, eq_tol)
        mask = mask.reshape(c1 - c0, probe_density, *((grid_side, probe_density) * (b - 1)))
        ax = (1,) + tuple(2 * i + 3 for i in range(b - 1))
        cellhits = mask.any(axis=ax)
        count += int(cellhits.sum())
    return CoverReport(epsilon=epsilon, cell_count=count, grid_side=grid_side)


def box(bounds: Sequence[Tuple[float, float]]) -> SemiAlgebraicSet:
    """Axis-aligned box prod [a_i, b_i] as a one-clause set (2b conditions)."""
    polys = []
    conds = []
    b = len(bounds)
    for i, (lo, hi) in enumerate(bounds):
        e = tuple(1 if j == i else 0 for j in range(b))
        e0 = (0,) * b
        polys.append(Polynomial(((1.0, e), (-float(lo), e0))))
        conds.append(SignCondition(len(polys) - 1, ">="))
        polys.append(Polynomial(((1.0, e), (-float(hi), e0))))
        conds.append(SignCondition(len(polys) - 1, "<="))
    return SemiAlgebraicSet(tuple(polys), (tuple(conds),))


def halfspace_eq(normal: Sequence[float], offset: float = 0.0) -> SemiAlgebraicSet:
    """The hyperplane <x, normal> = offset as a single-equality set."""
    n = tuple(float(v) for v in normal)
    b = len(n)
    terms = [(-float(offset), (0,) * b)] if offset else []
    for i, c in enumerate(n):
        if c != 0.0:
            terms.append((c, tuple(1 if j == i else 0 for j in range(b))))
    if not terms:
        raise ValueError("normal vector must be nonzero")
    poly = Polynomial(tuple(terms))
    return SemiAlgebraicSet((poly,), ((SignCondition(0, "=="),),))
