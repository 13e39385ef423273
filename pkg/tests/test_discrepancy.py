import math

import numpy as np
import pytest

from conftest import naive_count_hits, random_set
from kronorbit.discrepancy import (
    classical_discrepancy,
    count_hits,
    fit_exponent,
    separation_check,
)
from kronorbit.frequencies import GOLDEN_MEAN
from kronorbit.semialgebraic import (
    Polynomial,
    SemiAlgebraicSet,
    SignCondition,
    box,
    contains,
    halfspace_eq,
)
from kronorbit.torus import Frequency, frac, orbit_point, orbit_points


def test_count_full_cube():
    S = box([(0.0, 1.0)])
    res = count_hits(frac((0.0,)), Frequency((GOLDEN_MEAN.coords[0],)), 50, S)
    assert res.count == 50
    assert res.set_degree == 1
    assert res.set_measure_estimate == 1.0


def test_count_halved_orbit():
    # alpha = 1/2: even n land exactly on 0, odd n on 1/2
    S = SemiAlgebraicSet(
        (Polynomial(((1.0, (1,)), (-0.25, (0,)))),),
        ((SignCondition(0, "<="),),),
    )
    res = count_hits(frac((0.0,)), Frequency((0.5,)), 10, S)
    assert res.count == 5


def test_count_sum_line():
    # alpha = (.3, .7): fractional parts sum to exactly 1 unless n = 0 mod 10
    S = halfspace_eq((1.0, 1.0), offset=1.0)
    res = count_hits(frac((0.0, 0.0)), Frequency((0.3, 0.7)), 100, S, eq_tol=1e-9)
    assert res.count == 90


def test_count_matches_naive_oracle():
    rng = np.random.default_rng(123)
    for _ in range(12):
        b = int(rng.integers(1, 4))
        S = random_set(rng, b)
        N = int(rng.integers(10, 400))
        theta = tuple(rng.random(b))
        alpha = tuple(rng.random(b))
        eq_tol = float(rng.choice([0.0, 1e-6, 1e-2]))
        res = count_hits(frac(theta), Frequency(alpha), N, S, eq_tol)
        assert res.count == naive_count_hits(theta, alpha, N, S, eq_tol)


def test_count_threaded_matches_serial(monkeypatch):
    rng = np.random.default_rng(5)
    S = random_set(rng, 2)
    theta = (0.2, 0.8)
    alpha = (math.sqrt(2) - 1, math.sqrt(3) - 1)
    base = count_hits(frac(theta), Frequency(alpha), 3 * 10 ** 5, S, 1e-6).count
    monkeypatch.setenv("KRONORBIT_THREADS", "4")
    threaded = count_hits(frac(theta), Frequency(alpha), 3 * 10 ** 5, S, 1e-6).count
    assert threaded == base


def test_count_subadditive_under_union():
    rng = np.random.default_rng(17)
    alpha = (math.sqrt(2) - 1, math.sqrt(5) - 2)
    for _ in range(5):
        S1 = random_set(rng, 2)
        S2 = random_set(rng, 2)
        union = SemiAlgebraicSet(
            S1.polys + S2.polys,
            S1.clauses
            + tuple(
                tuple(SignCondition(c.poly_index + len(S1.polys), c.relation) for c in cl)
                for cl in S2.clauses
            ),
        )
        N = 500
        cu = count_hits(frac((0.0, 0.0)), Frequency(alpha), N, union, 1e-6).count
        c1 = count_hits(frac((0.0, 0.0)), Frequency(alpha), N, S1, 1e-6).count
        c2 = count_hits(frac((0.0, 0.0)), Frequency(alpha), N, S2, 1e-6).count
        assert cu <= c1 + c2


def test_count_shift_consistency():
    # boxes with faces far from the orbit: shifting theta by alpha and
    # dropping the last index matches dropping the first index
    alpha = (math.sqrt(2) - 1,)
    theta = (0.15,)
    S = box([(0.2, 0.7)])
    N = 400
    shifted = orbit_point(frac(theta), Frequency(alpha), 1)
    a = count_hits(shifted, Frequency(alpha), N - 1, S).count
    full = count_hits(frac(theta), Frequency(alpha), N, S).count
    first = 1 if contains(S, orbit_point(frac(theta), Frequency(alpha), 1)) else 0
    assert a == full - first


# --- classical discrepancy ---------------------------------------------------


def _star_oracle_1d(xs):
    # sup over t in (0,1] of |#{x <= t}/N - t| and |#{x < t}/N - t|
    xs = sorted(xs)
    N = len(xs)
    best = 0.0
    for t in list(xs) + [1.0]:
        le = sum(1 for x in xs if x <= t)
        lt = sum(1 for x in xs if x < t)
        best = max(best, abs(le / N - t), abs(lt / N - t))
    return best


def _star_oracle_2d(pts):
    N = len(pts)
    cand_x = sorted({p[0] for p in pts} | {1.0})
    cand_y = sorted({p[1] for p in pts} | {1.0})
    best = 0.0
    for t in cand_x:
        for u in cand_y:
            le = sum(1 for p in pts if p[0] <= t and p[1] <= u)
            lt = sum(1 for p in pts if p[0] < t and p[1] < u)
            best = max(best, abs(le / N - t * u), abs(lt / N - t * u))
    return best


def test_star_examples():
    assert classical_discrepancy(np.array([[0.25], [0.75]])) == pytest.approx(0.25)
    assert classical_discrepancy(np.array([[0.0]])) == pytest.approx(1.0)
    N = 16
    grid = np.arange(N)[:, None] / N
    assert classical_discrepancy(grid) == pytest.approx(1.0 / N)


def test_star_1d_matches_oracle():
    rng = np.random.default_rng(31)
    for _ in range(20):
        xs = rng.random(int(rng.integers(1, 40)))
        got = classical_discrepancy(xs[:, None])
        assert got == pytest.approx(_star_oracle_1d(xs), abs=1e-12)


def test_star_2d_matches_oracle():
    rng = np.random.default_rng(57)
    for _ in range(15):
        pts = rng.random((int(rng.integers(2, 25)), 2))
        got = classical_discrepancy(pts)
        want = _star_oracle_2d([tuple(p) for p in pts])
        assert got == pytest.approx(want, abs=1e-12)


def test_star_rejects_high_dim():
    with pytest.raises(ValueError):
        classical_discrepancy(np.random.default_rng(0).random((10, 3)), family="star")


def test_approx_is_lower_bound():
    rng = np.random.default_rng(91)
    for _ in range(10):
        pts = rng.random((int(rng.integers(4, 60)), 2))
        exact = classical_discrepancy(pts, family="star")
        approx = classical_discrepancy(pts, family="anchored-boxes-approx", grid=64)
        assert approx <= exact + 1e-12


def test_approx_close_on_small_sets():
    # with candidates covering every point coordinate the approximation
    # recovers the exact value
    rng = np.random.default_rng(8)
    pts = rng.random((30, 2))
    exact = classical_discrepancy(pts, family="star")
    approx = classical_discrepancy(pts, family="anchored-boxes-approx", grid=40)
    assert approx == pytest.approx(exact, abs=1e-12)


# --- separation and exponent fits -------------------------------------------


def test_separation_examples():
    res = separation_check((0.5,), 4, 0.4, 1.0)
    assert res.min_gap == 0.0 and res.argmin == 2 and not res.ok

    res = separation_check(GOLDEN_MEAN, 10 ** 3, 0.44, 1.0)
    assert res.ok and res.min_gap > 0.44 / 10 ** 3

    alpha = (0.137,)
    res = separation_check(alpha, 2, 0.1, 1.0)
    assert res.min_gap == pytest.approx(0.137, abs=1e-15)


def test_fit_examples():
    fit = fit_exponent([(10, 10), (100, 100), (1000, 1000)])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    pts = [(N, int(math.isqrt(N)) + (1 if math.isqrt(N) ** 2 < N else 0))
           for N in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5)]
    fit = fit_exponent(pts)
    assert abs(fit.slope - 0.5) <= 0.02

    fit = fit_exponent([(10, 7), (100, 7), (1000, 7)])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)


def test_fit_rejects_degenerate():
    with pytest.raises(ValueError):
        fit_exponent([(10, 1), (10, 2), (10, 3)])
    with pytest.raises(ValueError):
        fit_exponent([(10, 1), (20, 2)])
    with pytest.raises(ValueError):
        fit_exponent([(10, 1), (20, -2), (30, 1)])
