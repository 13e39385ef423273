"""Finite-window simulation of long-range quasi-periodic lattice operators.

The operator acts on l^2(Z) by a shift-invariant exponentially decaying
hopping kernel plus a quasi-periodic diagonal lambda * V({theta + n alpha}),
with V a real trigonometric polynomial on the b-torus.  Everything here is
desk scale: the window [-L, L] is a dense matrix, time evolution goes
through one eigendecomposition, and Green's functions are direct inverses
of window restrictions.

Finite-volume control: a propagated state is only trusted while its mass
near the window edge stays below 1e-8; results breaching that are flagged
and moment fits refuse to use them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .torus import Frequency, TorusVector, _as_coords, frac, orbit_points

__all__ = [
    "OperatorSpec",
    "MomentSeries",
    "LDTParams",
    "EvolveResult",
    "LdtVerdict",
    "MomentGrowthFit",
    "EdgeMassError",
    "make_operator_spec",
    "potential_value",
    "spectral_bound",
    "build_hamiltonian",
    "Propagator",
    "evolve",
    "moments",
    "green_function",
    "ldt_check",
    "bad_set",
    "bad_phase_measure",
    "moment_growth_fit",
]

EDGE_ZONE = 10          # sites counted as "near the edge"
EDGE_MASS_LIMIT = 1e-8  # validity threshold for propagated states

_BAD_SET_BUDGET = 4_000_000_000  # ~ (2N+1) * (2N1+1)^3 flop guard


class EdgeMassError(RuntimeError):
    """A propagated state leaked into the window edge zone."""


@dataclass(frozen=True)
class OperatorSpec:
    """Hopping kernel, coupling, potential, phase, frequency, window radius.

    kernel holds every stored offset (negative ones included) and must be
    Hermitian: a_{-k} = conj(a_k).  Each |a_k| must respect the declared
    envelope C1 * exp(-c1 |k|), and no offset may pass the cutoff.  The
    potential is a trigonometric polynomial with conjugate-symmetric
    coefficients, hence real-valued.
    """

    kernel: tuple                 # ((offset, complex amplitude), ...)
    decay_C1: float
    decay_c1: float
    cutoff: int
    coupling: float
    potential: tuple              # ((freq vector, complex coefficient), ...)
    theta: TorusVector
    alpha: Frequency
    L: int

    def __post_init__(self):
        amps = {}
        for k, a in self.kernel:
            k = int(k)
            a = complex(a)
            if k in amps:
                raise ValueError(f"duplicate kernel offset {k}")
            amps[k] = a
        if self.decay_C1 <= 0 or self.decay_c1 <= 0:
            raise ValueError("decay envelope constants must be positive")
        for k, a in amps.items():
            if abs(k) > self.cutoff:
                raise ValueError(f"offset {k} beyond cutoff {self.cutoff}")
            if abs(a) > self.decay_C1 * math.exp(-self.decay_c1 * abs(k)) + 1e-12:
                raise ValueError(f"|a_{k}| violates the decay envelope")
            conj = amps.get(-k)
            if conj is None or abs(conj - a.conjugate()) > 0:
                raise ValueError(f"kernel not Hermitian at offset {k}")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        harm = {}
        for m, c in self.potential:
            key = tuple(int(x) for x in m)
            if key in harm:
                raise ValueError(f"duplicate harmonic {key}")
            harm[key] = complex(c)
        for m, c in harm.items():
            neg = tuple(-x for x in m)
            conj = harm.get(neg)
            if conj is None or abs(conj - c.conjugate()) > 1e-15 * max(1.0, abs(c)):
                raise ValueError(f"potential coefficients not conjugate symmetric at {m}")
        if self.theta.dim != self.alpha.dim:
            raise ValueError("theta and alpha dimensions differ")
        for m in harm:
            if len(m) != self.alpha.dim:
                raise ValueError("harmonic dimension does not match the torus")
        if self.L < 1:
            raise ValueError("window radius L must be >= 1")
        object.__setattr__(self, "kernel", tuple(sorted(amps.items())))
        object.__setattr__(self, "potential", tuple(sorted(harm.items())))

    def with_theta(self, theta: TorusVector) -> "OperatorSpec":
        return OperatorSpec(
            kernel=self.kernel, decay_C1=self.decay_C1, decay_c1=self.decay_c1,
            cutoff=self.cutoff, coupling=self.coupling, potential=self.potential,
            theta=theta, alpha=self.alpha, L=self.L,
        )


def make_operator_spec(
    offsets,
    coupling: float,
    harmonics,
    theta,
    alpha,
    L: int,
    decay_C1: Optional[float] = None,
    decay_c1: float = 1.0,
    cutoff: Optional[int] = None,
) -> OperatorSpec:
    """Build a spec from one-sided data.

    `offsets` maps k >= 0 to a_k (negative offsets are filled in by
    conjugation); `harmonics` maps a frequency vector (or scalar for b = 1)
    to its coefficient, again one-sided.  The decay envelope defaults to the
    smallest C1 fitting the given amplitudes at the given c1.
    """
    amps = {}
    for k, a in dict(offsets).items():
        k = int(k)
        if k < 0:
            raise ValueError("give offsets k >= 0; negatives are implied")
        a = complex(a)
        if k == 0 and abs(a.imag) > 0:
            raise ValueError("a_0 must be real")
        amps[k] = a
        if k > 0:
            amps[-k] = a.conjugate()
    harm = {}
    for m, c in dict(harmonics).items():
        key = (int(m),) if isinstance(m, int) else tuple(int(x) for x in m)
        c = complex(c)
        if all(x == 0 for x in key) and abs(c.imag) > 0:
            raise ValueError("the constant harmonic must be real")
        harm[key] = c
        neg = tuple(-x for x in key)
        if neg != key:
            harm[neg] = c.conjugate()
    cut = max((abs(k) for k in amps), default=0) if cutoff is None else cutoff
    if decay_C1 is None:
        decay_C1 = max(
            (abs(a) * math.exp(decay_c1 * abs(k)) for k, a in amps.items()),
            default=1.0,
        ) or 1.0
    theta_v = theta if isinstance(theta, TorusVector) else frac(_as_coords(theta))
    alpha_v = alpha if isinstance(alpha, Frequency) else Frequency(_as_coords(alpha))
    return OperatorSpec(
        kernel=tuple(amps.items()),
        decay_C1=decay_C1,
        decay_c1=decay_c1,
        cutoff=cut,
        coupling=float(coupling),
        potential=tuple(harm.items()),
        theta=theta_v,
        alpha=alpha_v,
        L=int(L),
    )


@dataclass(frozen=True)
class MomentSeries:
    times: tuple
    values: tuple
    p: float
    spectral_bound: float

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if any(v < 0 for v in self.values):
            raise ValueError("moment values must be >= 0")


@dataclass(frozen=True)
class LDTParams:
    """Exponents for the restricted Green's function checks.

    norm_ok demands operator norm <= exp(N^sigma1); decay_ok demands
    |G(n,m)| <= exp(-c2 |n-m|) whenever |n-m| >= N/10.  sigma2 is the
    measure exponent used only for reporting; eps0 caps the imaginary part
    of probed energies.
    """

    sigma1: float = 0.9
    c2: float = 0.5
    sigma2: Optional[float] = None
    eps0: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.sigma1 < 1.0):
            raise ValueError("sigma1 must lie in (0, 1)")
        if self.c2 <= 0:
            raise ValueError("c2 must be positive")
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")


class EvolveResult(NamedTuple):
    psi: np.ndarray
    edge_mass: float
    edge_ok: bool


class LdtVerdict(NamedTuple):
    norm_ok: bool
    decay_ok: bool


class MomentGrowthFit(NamedTuple):
    ballistic_slope: float
    loglog_exponent: float
    series: MomentSeries
    edge_masses: tuple = ()


def potential_value(spec: OperatorSpec, x) -> float:
    coords = np.asarray(_as_coords(x), dtype=np.float64)
    total = 0.0 + 0.0j
    for m, c in spec.potential:
        total += c * cmath.exp(2j * math.pi * float(np.dot(m, coords)))
    return total.real


def _potential_on_points(spec: OperatorSpec, pts: np.ndarray) -> np.ndarray:
    vals = np.zeros(pts.shape[0], dtype=np.complex128)
    for m, c in spec.potential:
        vals += c * np.exp(2j * math.pi * (pts @ np.asarray(m, dtype=np.float64)))
    return vals.real


def spectral_bound(spec: OperatorSpec) -> float:
    """Crude bound K with all eigenvalues of any window inside [-K, K]."""
    hop = sum(abs(a) for _, a in spec.kernel)
    vmax = sum(abs(c) for _, c in spec.potential)
    return hop + spec.coupling * vmax + 1.0


def _phases(theta, alpha, lo: int, hi: int) -> np.ndarray:
    """Phases {theta + n alpha} for n = lo..hi, compensated per point.

    Negative n uses the exact identity {theta - m alpha} = {theta + m (1-alpha)}
    so every orbit index handed to the kernel stays nonnegative; the one
    rounding in 1-alpha costs at most m ulps, negligible at window scale.
    """
    tc = _as_coords(theta)
    ac = _as_coords(alpha)
    blocks = []
    if lo < 0:
        comp = tuple(1.0 - a for a in ac)
        m_hi = -lo
        m_lo = max(1, -hi)
        neg = orbit_points(tc, comp, m_lo, m_hi - m_lo + 1)
        blocks.append(neg[::-1])
    if hi >= 0:
        blocks.append(orbit_points(tc, ac, max(lo, 0), hi - max(lo, 0) + 1))
    return np.concatenate(blocks, axis=0)


def _window_matrix(spec: OperatorSpec, lo: int, hi: int) -> np.ndarray:
    size = hi - lo + 1
    if size < 1:
        raise ValueError("empty window")
    H = np.zeros((size, size), dtype=np.complex128)
    for k, a in spec.kernel:
        if a == 0:
            continue
        idx = np.arange(max(0, k), min(size, size + k))
        H[idx, idx - k] += a
    pts = _phases(spec.theta, spec.alpha, lo, hi)
    V = _potential_on_points(spec, pts)
    H[np.arange(size), np.arange(size)] += spec.coupling * V
    return H


def build_hamiltonian(spec: OperatorSpec) -> np.ndarray:
    """Dense window Hamiltonian over sites n in [-L, L].

    Entry (n, m) is a_{n-m} plus, on the diagonal,
    coupling * V({theta + n alpha}).  Hermitian by construction; returned
    real when every entry is real.
    """
    if spec.cutoff > 2 * spec.L:
        raise ValueError("kernel cutoff exceeds the window diameter")
    H = _window_matrix(spec, -spec.L, spec.L)
    if np.abs(H - H.conj().T).max() > 0:
        raise ValueError("assembled window is not Hermitian")
    if np.abs(H.imag).max() == 0.0:
        return H.real.copy()
    return H


def _is_tridiagonal(H: np.ndarray) -> bool:
    if H.shape[0] < 3:
        return False
    test = H.copy()
    n = H.shape[0]
    idx = np.arange(n)
    test[idx, idx] = 0
    test[idx[:-1], idx[:-1] + 1] = 0
    test[idx[1:], idx[1:] - 1] = 0
    return not np.any(test)


class Propagator:
    """One eigendecomposition, many evolution times."""

    def __init__(self, H: np.ndarray):
        H = np.asarray(H)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        if np.abs(H - H.conj().T).max() > 1e-12 * max(1.0, np.abs(H).max()):
            raise ValueError("H must be Hermitian")
        if not np.iscomplexobj(H) and _is_tridiagonal(H):
            d = np.ascontiguousarray(np.diag(H).astype(np.float64))
            e = np.ascontiguousarray(np.diag(H, 1).astype(np.float64))
            self.eigvals, self.eigvecs = scipy.linalg.eigh_tridiagonal(d, e)
        else:
            self.eigvals, self.eigvecs = scipy.linalg.eigh(H)
        self.size = H.shape[0]

    def apply(self, psi0: np.ndarray, t: float) -> np.ndarray:
        c = self.eigvecs.conj().T @ np.asarray(psi0, dtype=np.complex128)
        return self.eigvecs @ (np.exp(-1j * self.eigvals * t) * c)


def _edge_mass(psi: np.ndarray) -> float:
    size = psi.shape[0]
    L = (size - 1) // 2
    ns = np.arange(size) - L
    zone = np.abs(ns) > L - EDGE_ZONE
    return float(np.sum(np.abs(psi[zone]) ** 2))


def evolve(H: np.ndarray, psi0: np.ndarray, t: float) -> EvolveResult:
    """Propagate psi0 for time t through a fresh eigendecomposition.

    The returned state keeps unit norm to 1e-10.  edge_ok marks whether the
    mass within EDGE_ZONE sites of the window edge stayed below 1e-8; a
    breach is a finite-volume artifact, not an error.
    """
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    prop = Propagator(H)
    psi = prop.apply(psi0, t)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ArithmeticError("propagation lost unitarity past 1e-10")
    em = _edge_mass(psi)
    return EvolveResult(psi=psi, edge_mass=em, edge_ok=em < EDGE_MASS_LIMIT)


def moments(psi: np.ndarray, p: float) -> float:
    """p-th moment sum |n|^p |psi(n)|^2 over the window."""
    if p <= 0:
        raise ValueError("p must be positive")
    psi = np.asarray(psi)
    size = psi.shape[0]
    L = (size - 1) // 2
    ns = np.abs(np.arange(size) - L).astype(np.float64)
    return float(np.sum(ns ** p * np.abs(psi) ** 2))


def green_function(spec: OperatorSpec, interval: Tuple[int, int], z: complex) -> np.ndarray:
    """Inverse of the window restriction of (H - z) on integer sites [lo, hi].

    Well-defined for Im z > 0 by self-adjointness; restrictions with
    Im z < 1e-12 are rejected as numerically singular.
    """
    z = complex(z)
    if z.imag < 1e-12:
        raise ValueError("green_function needs Im z >= 1e-12")
    lo, hi = int(interval[0]), int(interval[1])
    A = _window_matrix(spec, lo, hi)
    size = hi - lo + 1
    A = A - z * np.eye(size)
    return np.linalg.inv(A)


def ldt_check(G: np.ndarray, N: int, params: LDTParams) -> LdtVerdict:
    """Norm and off-diagonal decay verdicts for a [-N, N] Green's function."""
    G = np.asarray(G)
    size = 2 * N + 1
    if G.shape != (size, size):
        raise ValueError(f"G must be indexed by [-{N}, {N}]")
    norm_ok = bool(np.linalg.norm(G, 2) <= math.exp(N ** params.sigma1))
    ii, jj = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    dist = np.abs(ii - jj)
    far = dist >= N / 10.0
    decay_ok = bool(np.all(np.abs(G[far]) <= np.exp(-params.c2 * dist[far])))
    return LdtVerdict(norm_ok=norm_ok, decay_ok=decay_ok)


def bad_set(
    theta,
    alpha,
    z: complex,
    N: int,
    N1: int,
    params: LDTParams,
    spec: OperatorSpec,
) -> List[int]:
    """Sites n in [-N, N] whose shifted-phase Green's function fails the check.

    For each n the window [-N1, N1] Green's function is computed at phase
    {theta + n alpha} and tested with ldt_check.
    """
    if N1 > N:
        raise ValueError("N1 must be <= N")
    cost = (2 * N + 1) * (2 * N1 + 1) ** 3
    if cost > _BAD_SET_BUDGET:
        raise ValueError(
            f"bad_set scan costs ~{cost} operations, over the {_BAD_SET_BUDGET} budget"
        )
    phases = _phases(theta, alpha, -N, N)
    bad = []
    for i in range(2 * N + 1):
        shifted = spec.with_theta(TorusVector(tuple(phases[i])))
        G = green_function(shifted, (-N1, N1), z)
        verdict = ldt_check(G, N1, params)
        if not (verdict.norm_ok and verdict.decay_ok):
            bad.append(i - N)
    return bad


def bad_phase_measure(
    alpha,
    z: complex,
    N1: int,
    params: LDTParams,
    spec_template: OperatorSpec,
    samples: int,
    seed: int,
) -> float:
    """Monte Carlo fraction of uniform phases failing the window-N1 check."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    b = spec_template.alpha.dim
    failures = 0
    for _ in range(samples):
        theta = TorusVector(tuple(rng.random(b)))
        G = green_function(spec_template.with_theta(theta), (-N1, N1), z)
        verdict = ldt_check(G, N1, params)
        if not (verdict.norm_ok and verdict.decay_ok):
            failures += 1
    return failures / samples


def moment_growth_fit(
    spec: OperatorSpec,
    psi0: np.ndarray,
    p: float,
    T_grid: Sequence[float],
) -> MomentGrowthFit:
    """Moment series over T_grid with power-law and polylog exponent fits.

    ballistic_slope is the OLS slope of log moment against log T;
    loglog_exponent regresses against log log T instead.  Any time whose
    state fails the edge-mass check aborts the fit.
    """
    ts = [float(t) for t in T_grid]
    if len(ts) < 3 or any(b_ <= a_ for a_, b_ in zip(ts, ts[1:])):
        raise ValueError("T_grid must be increasing with at least 3 times")
    if any(t <= 0 for t in ts):
        raise ValueError("times must be positive")
    H = build_hamiltonian(spec)
    prop = Propagator(H)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    values = []
    edges = []
    for t in ts:
        psi = prop.apply(psi0, t)
        em = _edge_mass(psi)
        if em >= EDGE_MASS_LIMIT:
            raise EdgeMassError(
                f"edge mass {em:.3e} at t = {t} exceeds {EDGE_MASS_LIMIT}; enlarge L"
            )
        values.append(moments(psi, p))
        edges.append(em)
    series = MomentSeries(
        times=tuple(ts), values=tuple(values), p=p, spectral_bound=spectral_bound(spec)
    )
    x = np.log(ts)
    y = np.log(np.maximum(values, 1e-300))
    slope = float(np.polyfit(x, y, 1)[0])
    xx = np.log(np.log(np.maximum(ts, 1.0 + 1e-9)))
    loglog = float(np.polyfit(xx, y, 1)[0])
    return MomentGrowthFit(
        ballistic_slope=slope, loglog_exponent=loglog, series=series,
        edge_masses=tuple(edges),
    )
