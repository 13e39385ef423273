"""Kronecker-orbit hit counting, hyperplane witnesses, and quasi-periodic transport."""

__version__ = "0.1.0"

from .diophantine import DiophantineReport, continued_fraction, dc_margin, wdc_margin
from .discrepancy import (
    ExponentFit,
    HitCountResult,
    SeparationResult,
    classical_discrepancy,
    count_hits,
    fit_exponent,
    separation_check,
)
from .dynamics import (
    LDTParams,
    MomentSeries,
    OperatorSpec,
    Propagator,
    bad_phase_measure,
    bad_set,
    build_hamiltonian,
    evolve,
    green_function,
    ldt_check,
    make_operator_spec,
    moment_growth_fit,
    moments,
)
from .hyperplane import (
    ConstructionFailure,
    HyperplaneWitness,
    LatticeHitCertificate,
    assemble_normal,
    choose_target_w,
    construct_independent_vectors,
    count_hyperplane_hits,
    enumerate_lattice_hits,
    hyperplane_demo,
    search_window,
)
from .semialgebraic import (
    CoverReport,
    Polynomial,
    SemiAlgebraicSet,
    SignCondition,
    contains,
    degree,
    evaluate,
    grid_cover_count,
    measure_estimate,
)
from .torus import (
    Frequency,
    TorusVector,
    angular_dist,
    frac,
    orbit_point,
    orbit_points,
    subspace_angular_dist,
    torus_norm,
)
