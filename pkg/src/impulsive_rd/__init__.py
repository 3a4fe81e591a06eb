"""Impulsive reaction-diffusion population models.

Seasons alternate a between-season growth map ``g`` with a within-season
reaction-diffusion-advection flow on a habitat with a hostile boundary.
The package computes principal eigenvalues, critical habitat sizes and
extreme volumes, and simulates the hybrid dynamics on a lattice.
"""

__version__ = "0.1.0"

from .errors import (
    DivergenceError,
    DomainError,
    NumericError,
    ParameterError,
    ResolutionError,
    SingularIntegrandError,
    UnsupportedError,
)
from .geometry import (
    Ball,
    Grid,
    HyperRect,
    Masked,
    parse_domain,
    rasterize,
    read_mask,
    symmetrize,
    unit_ball_volume,
    volume,
    write_mask,
)
from .kinetics import (
    BevertonHolt,
    LinearMap,
    LinearReaction,
    Logistic,
    QuadraticGrowth,
    Ricker,
    Skellam,
    check_viability,
    eval_growth,
    gprime_at_zero,
    iterate_nonspatial,
    parse_growth_map,
    parse_reaction,
    solve_equilibrium,
)
from .simulation import (
    Classification,
    FieldState,
    SeasonPropagator,
    Tolerances,
    classify_domain,
    impulse_cycle,
    iterate_and_classify,
    linearized_growth_factor,
    propagate_Q,
)
from .spectral import (
    SpectralResult,
    ball_bessel_zero,
    bessel_first_zero,
    lambda1_closed,
    lambda1_numeric,
    liyau_bound,
    rfk_bound,
)
from .thresholds import (
    EXTINCTION,
    INCONCLUSIVE,
    PERSISTENCE,
    ThresholdReport,
    application_preset,
    critical_hypercube_L,
    critical_radius_ball,
    critical_rect_constraint,
    extreme_volume,
    fisher_critical_length,
    fisher_speeds,
    viability_margin,
)
