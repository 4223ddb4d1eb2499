"""Pseudo-spectral laboratory for a nonlocal dispersive front equation.

Fourier-side fields on the torus, a symmetric-weight paraproduct with
its expansion identities, fractional powers of the associated operator
weight (eigendecomposition and a contour-integral cross-check), a
Galerkin solver with an integrating-factor scheme, and the experiment
batteries behind the `sqgfront` command.
"""

from .errors import (
    BlowUpError,
    ConfigError,
    ContinuationError,
    DimensionMismatch,
    NotPositiveDefinite,
    ResolventError,
    SqgError,
)
from .spectral import (
    MultiplierSymbol,
    PeriodicField,
    SpectralSpace,
    analyze,
    apply_multiplier,
    cosine,
    embed,
    hermitian_defect,
    hs_norm,
    inner_l2,
    product,
    product3,
    project,
    sine,
    sobolev_inf_norm,
    synthesize,
    zero_field,
)
from .paraproduct import (
    CutoffChi,
    ParaOperator,
    bony_remainder,
    operator_matrix,
    operator_norm,
    paraproduct,
)
from .calculus import (
    WeightOperator,
    apply_weight,
    build_contour_quadrature,
    build_weight,
    helffer_sjostrand_apply,
    weight_derivative_residual,
)
from .diagnostics import EnergyReport, continuation_check, energy_es, energy_report
from .evolution import (
    SolverConfig,
    SolverState,
    decomposed_rhs,
    decomposition_remainder,
    default_time_step,
    flux,
    integrate,
    reflect,
    rhs,
    step,
    transport_coefficient,
)
from .experiments import (
    BonaSmithTable,
    ConvergenceTable,
    StabilityReport,
    bona_smith_table,
    convergence_study,
    stability_experiment,
)
from .initial_data import exp_cos, multi_mode, power_law, single_mode

__version__ = "0.1.0"

__all__ = [
    "SqgError",
    "DimensionMismatch",
    "ConfigError",
    "NotPositiveDefinite",
    "BlowUpError",
    "ContinuationError",
    "ResolventError",
    "SpectralSpace",
    "PeriodicField",
    "MultiplierSymbol",
    "analyze",
    "synthesize",
    "cosine",
    "sine",
    "zero_field",
    "product",
    "product3",
    "apply_multiplier",
    "project",
    "embed",
    "hs_norm",
    "sobolev_inf_norm",
    "inner_l2",
    "hermitian_defect",
    "CutoffChi",
    "ParaOperator",
    "paraproduct",
    "bony_remainder",
    "operator_matrix",
    "operator_norm",
    "WeightOperator",
    "build_weight",
    "apply_weight",
    "build_contour_quadrature",
    "helffer_sjostrand_apply",
    "weight_derivative_residual",
    "EnergyReport",
    "energy_es",
    "energy_report",
    "continuation_check",
    "SolverConfig",
    "SolverState",
    "default_time_step",
    "flux",
    "rhs",
    "transport_coefficient",
    "decomposition_remainder",
    "decomposed_rhs",
    "reflect",
    "step",
    "integrate",
    "ConvergenceTable",
    "StabilityReport",
    "BonaSmithTable",
    "convergence_study",
    "stability_experiment",
    "bona_smith_table",
    "single_mode",
    "multi_mode",
    "power_law",
    "exp_cos",
    "__version__",
]
