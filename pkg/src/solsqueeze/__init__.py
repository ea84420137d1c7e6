"""Photon-number squeezing of fiber solitons.

Linearized quantum-noise propagation around the fundamental soliton,
realizable spectral filtering with vacuum injection, and the observed
photon-number squeezing of single-stage and cascaded squeezers.

The numerical pipeline:

    grid        shared time/frequency discretization and transforms
    soliton     sech mean field, discrete perturbation modes, projections
    propagator  Bogoliubov solution operator of the linearized dynamics
    filters     realizable spectral filters, bandwidth calibration
    measurement covariance kernels and the squeezing metric S
    cascade     fiber-and-filter stages; single- and dual-stage squeezers
    cli         config-driven sweeps, validation suite, mode dumps
"""

__version__ = "0.1.0"

from .grid import (
    ComplexField,
    SampledGrid,
    forward_transform,
    inner_product_re,
    inverse_transform,
    make_grid,
)
from .soliton import (
    MODE_NAMES,
    MeanField,
    ModeSet,
    discrete_modes,
    gram_matrix,
    mean_field,
    mode_evolution_check,
    project,
)
from .propagator import (
    BogoliubovMap,
    FluctuationState,
    apply_map,
    build_generator,
    compose_maps,
    propagate_map,
    soliton_period_to_xi,
    symplectic_residual,
    vacuum_state,
)
from .filters import (
    SpectralFilter,
    apply_filter,
    calibrate_bandwidth,
    custom_filter,
    identity_filter,
    mean_field_loss,
    parabolic_filter,
)
from .measurement import (
    CovarianceKernel,
    assemble_covariance,
    squeezing,
    squeezing_db,
    squeezing_from_kernel,
    time_covariance,
)
from .cascade import (
    SqueezedInputModel,
    StageChain,
    StageSpec,
    dss_covariance,
    extract_r,
    first_stage_mean_perturbation,
    run_chain,
    run_dss,
    run_sss,
    sweep_sss,
)

__all__ = [
    "__version__",
    "ComplexField",
    "SampledGrid",
    "forward_transform",
    "inner_product_re",
    "inverse_transform",
    "make_grid",
    "MODE_NAMES",
    "MeanField",
    "ModeSet",
    "discrete_modes",
    "gram_matrix",
    "mean_field",
    "mode_evolution_check",
    "project",
    "BogoliubovMap",
    "FluctuationState",
    "apply_map",
    "build_generator",
    "compose_maps",
    "propagate_map",
    "soliton_period_to_xi",
    "symplectic_residual",
    "vacuum_state",
    "SpectralFilter",
    "apply_filter",
    "calibrate_bandwidth",
    "custom_filter",
    "identity_filter",
    "mean_field_loss",
    "parabolic_filter",
    "CovarianceKernel",
    "assemble_covariance",
    "squeezing",
    "squeezing_db",
    "squeezing_from_kernel",
    "time_covariance",
    "SqueezedInputModel",
    "StageChain",
    "StageSpec",
    "dss_covariance",
    "extract_r",
    "first_stage_mean_perturbation",
    "run_chain",
    "run_dss",
    "run_sss",
    "sweep_sss",
]
