"""Periodic solutions of resonant forced oscillators with saturating damping."""

from .bvp import (
    DirichletProblem,
    SolutionCurve,
    SolutionCurvePoint,
    count_solutions,
    solutions_at,
    find_fold,
    galerkin_residual,
    solve_at_xi,
    sweep_curve,
)
from .errors import (
    ConfigError,
    FoldOnBoundary,
    NewtonDiverged,
    NoContractionFound,
    NoFixedPoint,
    RadiusTooSmall,
    SolverFailure,
    StepSizeUnderflow,
    SweepIncomplete,
    ZeroDirection,
)
from .ode_core import (
    DEFAULT_TOL,
    ORACLE_TOL,
    ForcingTerm,
    OscillatorProblem,
    PhaseState,
    PolarState,
    SaturatingNonlinearity,
    Tolerances,
    Trajectory,
    eval_forcing,
    fourier_coefficient,
    integrate,
    lienard_rhs,
    polar_rhs,
    scaled_rhs,
)
from .poincare import (
    PeriodicSolution,
    SeedGrid,
    drift_certificate,
    equation_residual,
    find_fixed_point,
    find_fixed_points,
    periodic_solution,
    invariant_radius,
    return_map,
    verify_periodicity,
)
from .resonance import (
    ConditionReport,
    check_dirichlet_necessary,
    check_periodic_condition,
    identity_integral,
    lemma_positive_part_integral,
)

__version__ = "0.1.0"
