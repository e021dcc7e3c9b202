"""Exact spectral-side solver for dU/dt + L_g U = X with measure-valued data.

The operator L_g acts as a Fourier multiplier with symbol g. Sources and
initial conditions are finite combinations of atoms and grid densities in
frequency, times atoms and piecewise-constant rates in time; solutions are
evaluated in closed form as cadlag-in-time families of spectral measures.
"""

from .asymptotics import (
    AsymptoticsReport,
    c_phi,
    convergence_gap,
    fixed_point_check,
    t_epsilon,
    translation_sweep,
    verify_bound,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    EvolutionError,
    PreconditionError,
    QuadratureError,
    RepresentationError,
)
from .evolution import (
    EvolutionProblem,
    PairedTrajectory,
    cauchy_snapshot,
    duhamel_snapshot,
    exp_kernel,
    increment_identity,
    invert_elliptic,
    snapshot,
    steady_snapshot,
    weak_residual,
)
from .measures import (
    FrequencyGrid,
    SpaceTimeMeasure,
    SpectralMeasure,
    TemporalProfile,
    TestFunctional,
    convexity_inequality_holds,
    hermitian_symmetrize,
    pair,
    primitive_1d,
    restrict_nonneg_time,
    total_variation,
    weighted_mass,
)
from .oracle import StepperConfig, quadrature_duhamel, step_modal
from .symbols import (
    Advection,
    Damping,
    FractionalLaplacian,
    FractionalMatern,
    LinearCombination,
    check_hermitian,
    effective_kappa,
    evaluate,
)
from .trajectory import MollifierParams, Trajectory
from .transform import FieldSample, SpatialGrid, forward_grid_transform, synthesize_field

__version__ = "0.1.0"
