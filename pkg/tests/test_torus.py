import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from kronorbit.torus import (
    Frequency,
    TorusVector,
    angular_dist,
    frac,
    orbit_point,
    orbit_points,
    subspace_angular_dist,
    torus_norm,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

finite = st.floats(min_value=-1e9, max_value=1e9, allow_nan=False, allow_infinity=False)


def test_frac_examples():
    assert frac((1.7, -0.3)).coords == pytest.approx((0.7, 0.7), abs=1e-15)
    assert frac((0.0, 0.0)).coords == (0.0, 0.0)
    assert frac((2.25, 3.5)).coords == (0.25, 0.5)


def test_frac_rejects_nonfinite():
    with pytest.raises(ValueError):
        frac((float("nan"),))
    with pytest.raises(ValueError):
        frac((float("inf"), 0.5))


def test_frac_snaps_near_integers():
    assert frac((1.0 - 2.0 ** -53,)).coords == (0.0,)
    assert frac((2.0 ** -53,)).coords == (0.0,)
    # outside the snap window survives
    assert frac((2.0 ** -40,)).coords == (2.0 ** -40,)


@given(st.lists(finite, min_size=1, max_size=4))
def test_frac_idempotent(xs):
    once = frac(xs)
    twice = frac(once.coords)
    assert once.coords == twice.coords


def test_torusvector_invariant():
    with pytest.raises(ValueError):
        TorusVector((1.0,))
    with pytest.raises(ValueError):
        TorusVector((-0.1, 0.5))
    with pytest.raises(ValueError):
        TorusVector(())


def test_orbit_examples():
    assert orbit_point(frac((0.0,)), Frequency((0.5,)), 3).coords == (0.5,)
    assert orbit_point(frac((0.1,)), Frequency((0.25,)), 4).coords == pytest.approx((0.1,), abs=1e-12)
    p = orbit_point(frac((0.0, 0.0)), Frequency((0.3, 0.7)), 2)
    assert p.coords == pytest.approx((0.6, 0.4), abs=1e-12)


def test_orbit_budget():
    with pytest.raises(ValueError):
        orbit_point(frac((0.0,)), Frequency((0.3,)), 2 ** 41)
    with pytest.raises(ValueError):
        orbit_point(frac((0.0,)), Frequency((0.3,)), -1)


def test_orbit_scalar_matches_vectorized_bitwise():
    theta = frac((0.123456789, 0.87654321))
    alpha = Frequency((math.sqrt(2) - 1.0, math.pi - 3.0))
    pts = orbit_points(theta, alpha, 1, 200)
    for i in range(200):
        assert orbit_point(theta, alpha, i + 1).coords == tuple(pts[i])


def test_orbit_additivity():
    # {theta + (m+n) alpha} == frac({theta + m alpha} + n alpha) to 1e-11
    theta = frac((0.3, 0.05))
    alpha = Frequency((GOLDEN, math.sqrt(3) - 1.0))
    for m, n in [(10, 7), (1234, 4321), (10 ** 6, 10 ** 6)]:
        lhs = orbit_point(theta, alpha, m + n)
        mid = orbit_point(theta, alpha, m)
        rhs = orbit_point(mid, alpha, n)
        diff = [min(abs(a - b), 1 - abs(a - b)) for a, b in zip(lhs.coords, rhs.coords)]
        assert max(diff) < 1e-11


def test_orbit_precision_large_n():
    # against exact rational arithmetic at n = 1e9
    from fractions import Fraction

    alpha = math.sqrt(2) - 1.0
    n = 10 ** 9
    exact = Fraction(alpha) * n
    exact_frac = float(exact - math.floor(exact))
    got = orbit_point(frac((0.0,)), Frequency((alpha,)), n).coords[0]
    assert abs(got - exact_frac) < 1e-12


def test_torus_norm_examples():
    assert torus_norm(TorusVector((0.7, 0.1))) == pytest.approx(0.3, abs=1e-15)
    assert torus_norm(TorusVector((0.0, 0.0))) == 0.0
    assert torus_norm(TorusVector((0.5, 0.5))) == 0.5


@given(st.lists(st.floats(min_value=0.0, max_value=0.999999, exclude_max=False), min_size=1, max_size=4))
def test_torus_norm_flip_symmetry(coords):
    x = frac(coords)
    flipped = frac(tuple(1.0 - c for c in x.coords))
    assert torus_norm(x) == pytest.approx(torus_norm(flipped), abs=1e-12)


def test_angular_examples():
    assert angular_dist((1.0, 2.0), (1.0, 2.0)) == 0.0
    assert angular_dist((1.0, 0.0), (0.0, 1.0)) == 1.0
    assert angular_dist((1.0, 0.0), (1.0, 1.0)) == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_angular_rejects_zero():
    with pytest.raises(ValueError):
        angular_dist((0.0, 0.0), (1.0, 0.0))


@given(
    st.lists(st.floats(min_value=-10, max_value=10), min_size=2, max_size=2),
    st.lists(st.floats(min_value=-10, max_value=10), min_size=2, max_size=2),
    st.floats(min_value=0.001, max_value=100.0),
    st.floats(min_value=0.001, max_value=100.0),
)
def test_angular_scale_invariance(u, v, s, t):
    if abs(u[0]) + abs(u[1]) < 1e-6 or abs(v[0]) + abs(v[1]) < 1e-6:
        return
    base = angular_dist(u, v)
    scaled = angular_dist([s * x for x in u], [t * x for x in v])
    # squared distances are assertable at 1e-12; the square root amplifies
    # rounding near parallel pairs, where only ~1e-6 is meaningful
    assert scaled ** 2 == pytest.approx(base ** 2, abs=1e-12)
    assert scaled == pytest.approx(base, abs=1e-6)
    assert angular_dist(v, u) == pytest.approx(base, abs=1e-12)


def test_subspace_examples():
    assert subspace_angular_dist((0, 0, 1), [(1, 0, 0), (0, 1, 0)]) == pytest.approx(1.0)
    assert subspace_angular_dist((1, 0), [(1, 0)]) == pytest.approx(0.0, abs=1e-12)
    got = subspace_angular_dist((1, 1, 0), [(1, 0, 0)])
    assert got == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_subspace_rejects_degenerate():
    with pytest.raises(ValueError):
        subspace_angular_dist((1, 0, 0), [(1, 1, 0), (2, 2, 0)])


def _grid_min_angular(u, basis, lo, hi, steps):
    best = 2.0
    grids = [np.linspace(lo[i], hi[i], steps) for i in range(len(basis))]
    mesh = np.meshgrid(*grids, indexing="ij")
    coeffs = np.stack([g.reshape(-1) for g in mesh], axis=1)
    B = np.array(basis, dtype=float)
    vs = coeffs @ B
    norms = (vs ** 2).sum(axis=1)
    keep = norms > 1e-12
    vs = vs[keep]
    uu = np.asarray(u, dtype=float)
    c2 = (vs @ uu) ** 2 / ((vs ** 2).sum(axis=1) * (uu @ uu))
    d = np.sqrt(np.maximum(0.0, 1.0 - np.minimum(c2, 1.0)))
    i = int(np.argmin(d))
    return float(d[i]), coeffs[keep][i]


def test_subspace_matches_refined_grid_search():
    # independent oracle: minimize over span coefficients by iterated grid zoom
    cases = [
        ((1.0, 1.0, 0.0), [(1.0, 0.0, 0.0)]),
        ((0.3, -0.7, 0.2), [(1.0, 0.5, 0.0), (0.0, 1.0, 1.0)]),
        ((1.0, 2.0, 3.0), [(0.5, 0.1, -0.3)]),
    ]
    for u, basis in cases:
        k = len(basis)
        lo = [-10.0] * k
        hi = [10.0] * k
        best, c = _grid_min_angular(u, basis, lo, hi, 41)
        for _ in range(6):
            span = [(h - l) / 8 for l, h in zip(lo, hi)]
            lo = [ci - s for ci, s in zip(c, span)]
            hi = [ci + s for ci, s in zip(c, span)]
            best, c = _grid_min_angular(u, basis, lo, hi, 41)
        assert subspace_angular_dist(u, basis) == pytest.approx(best, abs=1e-6)


def test_subspace_empty_basis_is_one():
    assert subspace_angular_dist((1.0, 2.0), []) == 1.0
