"""Adaptive-memory functionals on finite horizons.

A numerical library for kernel-weighted, state-sensitive accumulation along
trajectories: classified memory kernels, adaptive sensitivity models
(including the history-dependent, habituating construction), the induced
memory functional with its comparison bounds, and a seeded verification
suite that checks every inequality the framework guarantees.
"""

from .errors import (
    ConfigError,
    DegenerateInput,
    InvalidParameter,
    MemfunError,
    NonConvergence,
    UnsupportedKernelClass,
)
from .functionals import (
    DifferenceBoundResult,
    MemoryFunctionalReport,
    StrictGainResult,
    difference_bound_check,
    memory_functional,
    memory_response,
    strict_gain_check,
    weighted_accumulation,
)
from .generators import TrajectorySpec, random_trajectory
from .grid import (
    DEFAULT_GRID_N,
    DEFAULT_REL_TOL,
    Jump,
    QuadratureResult,
    SupremumResult,
    TimeDomain,
    Trajectory,
    combine,
    constant_trajectory,
    indicator_trajectory,
    integrate,
    regrid,
    scale,
    step_trajectory,
    sup_norm,
    supremum,
)
from .kernels import (
    AdmissibilityReport,
    ClassifyTolerances,
    Kernel,
    KernelConstants,
    classify,
    cumulative_weight,
    exponential_kernel,
    finite_memory_kernel,
    grid_total_variation,
    is_regular,
    power_law_kernel,
    sampled_kernel,
    weighted_convolution,
)
from .sensitivity import (
    AxiomReport,
    HistoricalSensitivity,
    InducedSensitivity,
    InstantaneousSensitivity,
    ProbePlan,
    SensitivityModel,
    constant_sensitivity,
    default_probe_plan,
    deviation_accumulator,
    induce,
    instantaneous_sensitivity,
    lipschitz_constant,
    modulated_values,
    tanh_deviation,
    verify_axioms,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
