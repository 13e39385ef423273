"""Constructive hyperplane witnesses for orbit hit lower bounds.

The construction builds b-1 orbit vectors {n_i * alpha} that are short in
sup norm and pairwise angularly independent, by drawing a target direction
w, searching the orbit for the first index whose point lands in a small
window around w, and verifying the norm and angle requirements directly on
the found vector (retrying with fresh windows when a draw fails).

The spanned hyperplane through the origin then carries many orbit points:
every admissible integer combination sum k_i * {n_i alpha} stays inside
[0,1]^b without wraparound and equals {(sum k_i n_i) alpha}, which is the
certificate that enumerate_lattice_hits produces and checks.

Scale split: construct_independent_vectors works entirely at the scale of
its own N argument.  To certify hits among the first N_target orbit points,
build the witness at M = ceil(N_target^{b/(b+1)}) and enumerate at N_target;
`hyperplane_demo` packages that pipeline.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .torus import (
    Frequency,
    TorusVector,
    _as_coords,
    orbit_points,
    subspace_angular_dist,
)

__all__ = [
    "HyperplaneWitness",
    "LatticeHitCertificate",
    "ConstructionFailure",
    "TargetDirectionError",
    "choose_target_w",
    "search_window",
    "construct_independent_vectors",
    "assemble_normal",
    "enumerate_lattice_hits",
    "count_hyperplane_hits",
    "hyperplane_demo",
]

_CHUNK = 1 << 16

DEFAULT_W_SAMPLES = 10_000
RETRY_BUDGET = 3  # target-w redraws per induction step


class TargetDirectionError(ValueError):
    """No sampled direction reached the requested angular margin."""

    def __init__(self, best_delta: float, delta_min: float):
        self.best_delta = best_delta
        self.delta_min = delta_min
        super().__init__(
            f"best sampled direction achieves delta = {best_delta:.6g} < {delta_min:.6g};"
            " lower delta_min or raise samples"
        )


class ConstructionFailure(RuntimeError):
    """Induction step exhausted its retry budget."""

    def __init__(self, step: int, window_center, message: str):
        self.step = step
        self.window_center = None if window_center is None else tuple(window_center)
        super().__init__(f"induction step {step}: {message}")


@dataclass(frozen=True)
class HyperplaneWitness:
    """b-1 short, angularly independent orbit vectors and their normal.

    Invariants (verified by `validate`): 1 <= n_i <= N^(1+2 eps),
    sup-norm of each spanning vector <= N^(-1/b), the spanning vectors have
    rank b-1, and the unit normal is orthogonal to each of them to 1e-9.
    """

    n_list: tuple
    spanning: tuple
    normal: tuple
    N: int
    epsilon: float
    delta: float
    achieved_delta: float = math.nan

    @property
    def dim(self) -> int:
        return len(self.normal)

    def spanning_array(self) -> np.ndarray:
        return np.array([v.coords for v in self.spanning], dtype=np.float64)

    def validate(self) -> None:
        b = self.dim
        if len(self.n_list) != b - 1 or len(self.spanning) != b - 1:
            raise ValueError("witness needs exactly b-1 vectors")
        n_cap = self.N ** (1.0 + 2.0 * self.epsilon)
        norm_cap = self.N ** (-1.0 / b)
        for n, v in zip(self.n_list, self.spanning):
            if not (1 <= n <= n_cap):
                raise ValueError(f"index {n} outside [1, N^(1+2eps)]")
            if max(v.coords) > norm_cap:
                raise ValueError(f"spanning vector sup norm {max(v.coords)} > N^(-1/b)")
        A = self.spanning_array()
        if np.linalg.matrix_rank(A, tol=1e-10) != b - 1:
            raise ValueError("spanning vectors are rank deficient")
        nrm = np.asarray(self.normal)
        if abs(float(nrm @ nrm) - 1.0) > 1e-9:
            raise ValueError("normal is not a unit vector")
        resid = np.abs(A @ nrm).max()
        if resid > 1e-9:
            raise ValueError(f"normal residual {resid} > 1e-9")


@dataclass(frozen=True)
class LatticeHitCertificate:
    """Admissible combinations sum k_i n_i together with their orbit points.

    `count` is the number of distinct orbit indices; `bound` is the target
    N^((b-1)/(b+1) - eps); `product_bound` is the guaranteed product
    prod_i min(N^(1-r(1+2 eps)), N^(r/b)) / b^(b-1) with r = b/(b+1).
    """

    hits: tuple
    count: int
    bound: float
    product_bound: float
    exhaustive: bool
    max_point_residual: float


def choose_target_w(
    spanning_so_far: Sequence,
    N: int,
    delta_min: float,
    samples: int = DEFAULT_W_SAMPLES,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
    dim: Optional[int] = None,
) -> np.ndarray:
    """Draw a nonnegative target direction, scaled so |w|_2 = N^(-1/b)/2.

    The best of `samples` seeded draws by angular distance to the current
    span is returned; with an empty span any direction qualifies and the
    first draw is used.  Raises TargetDirectionError when even the best draw
    stays below delta_min.
    """
    if not (0.0 < delta_min < 1.0):
        raise ValueError("delta_min must lie in (0, 1)")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    vecs = [np.asarray(_as_coords(v), dtype=np.float64) for v in spanning_so_far]
    if vecs:
        b = len(vecs[0])
    elif dim is not None:
        b = dim
    else:
        raise ValueError("pass dim when spanning_so_far is empty")
    if len(vecs) >= b - 1 and b > 1 and vecs:
        raise ValueError("spanning_so_far must have fewer than b-1 vectors")
    gen = rng if rng is not None else np.random.default_rng(seed)
    scale = 0.5 * N ** (-1.0 / b)
    if not vecs:
        d = gen.random(b)
        while float(d @ d) == 0.0:
            d = gen.random(b)
        return d / np.linalg.norm(d) * scale
    B = np.column_stack(vecs)
    q, r = np.linalg.qr(B)
    if np.any(np.abs(np.diag(r)) <= 1e-12 * max(1.0, np.abs(B).max())):
        raise ValueError("spanning vectors are linearly dependent")
    draws = gen.random((samples, b))
    norms2 = (draws ** 2).sum(axis=1)
    good = norms2 > 0
    draws = draws[good]
    norms2 = norms2[good]
    proj = draws @ q
    c2 = (proj ** 2).sum(axis=1) / norms2
    dists = np.sqrt(np.maximum(0.0, 1.0 - np.minimum(c2, 1.0)))
    i = int(np.argmax(dists))
    if dists[i] < delta_min:
        raise TargetDirectionError(float(dists[i]), delta_min)
    w = draws[i]
    return w / np.linalg.norm(w) * scale


def _window_bounds(w: np.ndarray, halfwidth: float) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.maximum(w - halfwidth, 0.0)
    hi = np.minimum(w + halfwidth, 1.0)
    return lo, hi


def _iter_window_hits(alpha_coords, N: int, epsilon: float, w: np.ndarray):
    """Yield orbit indices n = 1 .. ceil(N^(1+2eps)) with {n alpha} in I_w."""
    b = len(alpha_coords)
    halfwidth = N ** (-(1.0 + epsilon) / b)
    lo, hi = _window_bounds(np.asarray(w, dtype=np.float64), halfwidth)
    n_max = int(math.ceil(N ** (1.0 + 2.0 * epsilon)))
    theta0 = (0.0,) * b
    for start in range(1, n_max + 1, _CHUNK):
        m = min(_CHUNK, n_max + 1 - start)
        pts = orbit_points(theta0, alpha_coords, start, m)
        inside = np.all((pts >= lo) & (pts <= hi), axis=1)
        for idx in np.nonzero(inside)[0]:
            yield start + int(idx), pts[idx]


def search_window(alpha, N: int, epsilon: float, w) -> Optional[int]:
    """Smallest n <= ceil(N^(1+2eps)) with {n alpha} inside the window I_w.

    I_w is the cube of half-width N^(-(1+eps)/b) around w, clipped to
    [0,1]^b.  Returns None when the range holds no hit.
    """
    coords = _as_coords(alpha)
    wa = np.asarray(_as_coords(w), dtype=np.float64)
    if wa.min() < 0.0 or wa.max() > 1.0:
        raise ValueError("w must lie in [0,1]^b")
    for n, _ in _iter_window_hits(coords, N, epsilon, wa):
        return n
    return None


def construct_independent_vectors(
    alpha,
    N: int,
    epsilon: float,
    delta_min: float,
    seed: int = 0,
    samples: int = DEFAULT_W_SAMPLES,
    retry: int = RETRY_BUDGET,
) -> HyperplaneWitness:
    """Build the b-1 witness vectors by induction on target windows.

    Each step draws a target w (angularly delta_min away from the current
    span), walks the window hits in increasing n, and accepts the first
    unused index whose vector has sup norm <= N^(-1/b) and angular distance
    >= delta_min/2 from the span.  The classical sufficient condition
    N^(-1/b) - sqrt(b) N^(-(1+eps)/b) > 0 is replaced by these direct
    checks, which also succeed on many N where the sufficient condition is
    vacuous.  Raises ConstructionFailure naming the failing step.
    """
    coords = _as_coords(alpha)
    b = len(coords)
    if b < 2:
        raise ValueError("b >= 2 required (a hyperplane needs codimension 1 in b >= 2)")
    if N < 2:
        raise ValueError("N must be >= 2")
    if not (0.0 < epsilon):
        raise ValueError("epsilon must be positive")
    rng = np.random.default_rng(seed)
    norm_cap = N ** (-1.0 / b)
    spanning: List[np.ndarray] = []
    n_list: List[int] = []
    achieved = math.inf
    for step in range(1, b):
        accepted = None
        last_w = None
        best_delta_seen = 0.0
        for _attempt in range(retry):
            try:
                w = choose_target_w(
                    spanning, N, delta_min, samples=samples, rng=rng, dim=b
                )
            except TargetDirectionError:
                continue
            last_w = w
            for n, v in _iter_window_hits(coords, N, epsilon, w):
                if n in n_list:
                    continue
                if not v.any():  # exact return to 0 spans nothing
                    continue
                if v.max() > norm_cap:
                    continue
                if spanning:
                    d = subspace_angular_dist(v, spanning)
                    best_delta_seen = max(best_delta_seen, d)
                    if d < delta_min / 2.0:
                        continue
                    achieved = min(achieved, d)
                accepted = (n, v)
                break
            if accepted:
                break
        if not accepted:
            raise ConstructionFailure(
                step,
                last_w,
                "no window hit passed the norm and angle checks within the retry budget"
                + (f" (best angular margin {best_delta_seen:.4g})" if spanning else ""),
            )
        n_list.append(accepted[0])
        spanning.append(accepted[1])
    normal = assemble_normal(spanning)
    witness = HyperplaneWitness(
        n_list=tuple(n_list),
        spanning=tuple(TorusVector(tuple(v)) for v in spanning),
        normal=tuple(float(x) for x in normal),
        N=N,
        epsilon=epsilon,
        delta=delta_min,
        achieved_delta=1.0 if math.isinf(achieved) else achieved,
    )
    witness.validate()
    return witness


def assemble_normal(spanning: Sequence) -> np.ndarray:
    """Unit vector orthogonal to b-1 spanning vectors of rank b-1.

    The one-dimensional null space is taken from a complete QR
    factorization; the sign makes the first coordinate of magnitude above
    1e-12 positive.
    """
    vecs = [np.asarray(_as_coords(v), dtype=np.float64) for v in spanning]
    if not vecs:
        raise ValueError("spanning must be nonempty")
    b = len(vecs[0])
    if len(vecs) != b - 1:
        raise ValueError(f"need exactly b-1 = {b - 1} spanning vectors")
    B = np.column_stack(vecs)
    q, r = np.linalg.qr(B, mode="complete")
    diag = np.abs(np.diag(r[: b - 1, : b - 1]))
    if np.any(diag <= 1e-10 * max(1.0, np.abs(B).max())):
        raise ValueError("spanning vectors are rank deficient (tolerance 1e-10)")
    normal = q[:, -1]
    for x in normal:
        if abs(x) > 1e-12:
            if x < 0:
                normal = -normal
            break
    return normal / np.linalg.norm(normal)


def _admissible_k_max(n: int, vmax: float, N: int, b: int) -> int:
    # k n <= N/b (exact integer arithmetic) and k vmax < 1/b (floats).
    k1 = N // (b * n)
    if vmax <= 0.0:
        return k1
    k2 = int(math.floor((1.0 / b) / vmax))
    while (k2 + 1) * vmax < 1.0 / b:
        k2 += 1
    while k2 >= 1 and k2 * vmax >= 1.0 / b:
        k2 -= 1
    return min(k1, k2)


def enumerate_lattice_hits(
    witness: HyperplaneWitness,
    alpha,
    N: int,
    max_tuples: int = 1_000_000,
) -> LatticeHitCertificate:
    """Enumerate k-tuples with 1 <= k_i n_i <= N/b and k_i |v_i|_inf < 1/b.

    Each admissible tuple gives the orbit index n = sum k_i n_i and the
    point sum k_i v_i; the point is compared against {n alpha} (they agree
    because no coordinate sum can wrap).  Indices colliding across tuples
    are deduplicated before counting.  When the tuple grid exceeds
    max_tuples, a lexicographic prefix is enumerated and the certificate is
    flagged non-exhaustive.
    """
    coords = _as_coords(alpha)
    b = witness.dim
    if len(coords) != b:
        raise ValueError("alpha dimension does not match the witness")
    vs = witness.spanning_array()
    k_caps = [
        _admissible_k_max(n, float(v.max()), N, b)
        for n, v in zip(witness.n_list, vs)
    ]
    r = b / (b + 1.0)
    per_factor = min(
        N ** (1.0 - r * (1.0 + 2.0 * witness.epsilon)), N ** (r / b)
    ) / b
    product_bound = per_factor ** (b - 1)
    bound = N ** ((b - 1.0) / (b + 1.0) - witness.epsilon)
    if any(c < 1 for c in k_caps):
        return LatticeHitCertificate(
            hits=(), count=0, bound=bound, product_bound=product_bound,
            exhaustive=True, max_point_residual=0.0,
        )
    total = 1
    for c in k_caps:
        total *= c
    exhaustive = total <= max_tuples
    theta0 = (0.0,) * b
    hits = []
    seen = {}
    max_resid = 0.0
    taken = 0
    for ks in itertools.product(*(range(1, c + 1) for c in k_caps)):
        if taken >= max_tuples:
            break
        taken += 1
        n = sum(k * m for k, m in zip(ks, witness.n_list))
        point = np.zeros(b)
        for k, v in zip(ks, vs):
            point = point + k * v
        orbit = orbit_points(theta0, coords, n, 1)[0]
        resid = float(np.abs(point - orbit).max())
        max_resid = max(max_resid, resid)
        if n not in seen:
            seen[n] = True
            hits.append((ks, n, TorusVector(tuple(point))))
    return LatticeHitCertificate(
        hits=tuple(hits),
        count=len(hits),
        bound=bound,
        product_bound=product_bound,
        exhaustive=exhaustive,
        max_point_residual=max_resid,
    )


def count_hyperplane_hits(alpha, N: int, normal, tol: float) -> int:
    """Count n in [1, N] with |<{n alpha}, normal>| <= tol.

    The plane passes through the origin; the tolerance thickens it, so the
    result dominates the exact on-plane count.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    coords = _as_coords(alpha)
    nrm = np.asarray(_as_coords(normal), dtype=np.float64)
    theta0 = (0.0,) * len(coords)
    total = 0
    for start in range(1, N + 1, _CHUNK):
        m = min(_CHUNK, N + 1 - start)
        pts = orbit_points(theta0, coords, start, m)
        total += int((np.abs(pts @ nrm) <= tol).sum())
    return total


def hyperplane_demo(
    alpha,
    N: int,
    epsilon: float = 0.1,
    delta_min: float = 0.1,
    seed: int = 0,
) -> Tuple[HyperplaneWitness, LatticeHitCertificate]:
    """Witness-plus-certificate pipeline for hit counting among n <= N.

    The witness is constructed at the reduced scale M = ceil(N^(b/(b+1))),
    so the searched indices stay within N^{r(1+2 eps)} and the admissible
    k-ranges at scale N are balanced; the certificate is enumerated at N.
    """
    coords = _as_coords(alpha)
    b = len(coords)
    r = b / (b + 1.0)
    M = max(2, int(math.ceil(N ** r)))
    witness = construct_independent_vectors(
        coords, M, epsilon, delta_min, seed=seed
    )
    certificate = enumerate_lattice_hits(witness, coords, N)
    return witness, certificate
