"""Strong-stability-preserving explicit Runge-Kutta methods.

Representations and order analysis (:mod:`ssprk.tableau`), radius of absolute
monotonicity and optimal convex representations (:mod:`ssprk.analysis`),
fixed-register execution (:mod:`ssprk.lowstorage`), the five-stage third order
families and optimizer (:mod:`ssprk.family53`), the built-in method catalog
(:mod:`ssprk.catalog`), and total-variation/convergence experiments
(:mod:`ssprk.experiments`).
"""

from .analysis import (
    FeasibilityReport,
    canonical_optimal_representation,
    invariance_transform,
    monotonicity_feasible,
    radius_absolute_monotonicity,
    representation_ssp_coefficient,
    sparsify_gamma,
)
from .catalog import (
    MethodRecord,
    export_json,
    list_methods,
    lookup,
    method_from_json,
    ssp_first_order,
    ssp_second_order,
)
from .exceptions import SSPError
from .experiments import (
    BLConfig,
    SweepResult,
    bl_rhs,
    convergence_order,
    forward_euler_threshold,
    mu_ratio,
    observed_ssp_sweep,
    tv_seminorm,
)
from .family53 import (
    Family53Params,
    TwoNStarParams,
    build_2nstar_tableau,
    build_family53,
    certify_no_2nstar_ssp53,
    family53_order_residuals,
    family53_sparse_representation,
    optimize_2nstar,
    ssp53_optimal_radius,
    twonstar_shu_osher,
)
from .lowstorage import (
    RegisterProgram,
    StorageClass,
    classify,
    compile,
    step_naive,
    step_registers,
)
from .tableau import (
    ButcherTableau,
    ShuOsherForm,
    StabilityPolynomial,
    error_constant,
    extended_matrix,
    order_residuals,
    real_stability_interval,
    shu_osher_to_butcher,
    stability_polynomial,
    stability_region_grid,
)

__version__ = "0.1.0"
