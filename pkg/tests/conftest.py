import numpy as np
import pytest

from kronorbit.semialgebraic import Polynomial, SemiAlgebraicSet, SignCondition
from kronorbit.torus import Frequency, TorusVector, frac, orbit_point
from kronorbit.semialgebraic import contains


def random_set(rng: np.random.Generator, b: int, max_polys: int = 3,
               max_degree: int = 4) -> SemiAlgebraicSet:
    """Random union-of-intersections set with small random polynomials."""
    n_polys = int(rng.integers(1, max_polys + 1))
    polys = []
    for _ in range(n_polys):
        n_terms = int(rng.integers(1, 4))
        terms = {}
        for _ in range(n_terms):
            exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=b))
            while sum(exps) > max_degree:
                exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=b))
            terms[exps] = float(rng.normal())
        polys.append(Polynomial(tuple((c, e) for e, c in terms.items())))
    n_clauses = int(rng.integers(1, 3))
    clauses = []
    for _ in range(n_clauses):
        n_conds = int(rng.integers(1, 3))
        conds = []
        for _ in range(n_conds):
            idx = int(rng.integers(0, n_polys))
            rel = (">=", "<=", "==")[int(rng.integers(0, 3))]
            conds.append(SignCondition(idx, rel))
        clauses.append(tuple(conds))
    return SemiAlgebraicSet(tuple(polys), tuple(clauses))


def naive_count_hits(theta, alpha, N, S, eq_tol=0.0) -> int:
    """Sequential single-loop oracle for count_hits."""
    th = frac(theta)
    al = Frequency(tuple(float(a) for a in alpha))
    total = 0
    for n in range(1, N + 1):
        if contains(S, orbit_point(th, al, n), eq_tol):
            total += 1
    return total
