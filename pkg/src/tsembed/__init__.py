"""Delta calculus on discrete time scales and embedded Euler-Lagrange equations."""

from .embeddings import (
    Residual,
    action,
    action_gradient,
    action_usual,
    integral_raw,
    residual_differential,
    residual_integral,
    residual_variational_backward,
)
from .lagrangian import (
    POTENTIALS,
    Lagrangian,
    PartialsReport,
    Potential,
    apply_along,
    check_partials,
    get_lagrangian,
    get_potential,
    mechanical,
)
from .solvers import (
    ConvergenceReport,
    EnergySeries,
    NewtonOptions,
    SolverError,
    Trajectory,
    convergence_order,
    energy_series,
    reference_solution,
    reference_state,
    solve_differential_scheme,
    solve_variational,
)
from .timescale import (
    DomainError,
    GridFunction,
    TimeScale,
    cumulative_to_sigma,
    delta_derivative,
    delta_integral,
    integrate_to_sigma,
    make_arbitrary,
    make_qscale,
    make_random,
    make_uniform,
    mu,
    rho,
    sigma,
)

__version__ = "0.1.0"
