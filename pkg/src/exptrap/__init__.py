from .config import AdaptiveConfig, PlanConfig, QuadConfig, StudyConfig
from .decay_model import (
    Aggregates,
    TailKind,
    TailSum,
    aggregates,
    brute_force_tail,
    tail_bound_dexp,
    tail_bound_dexp_printed,
    tail_bound_exp,
    tail_bound_exp_unit,
)
from .harness import (
    CatalogEntry,
    CatalogError,
    EmitError,
    RateFit,
    RateFitError,
    StudyRecord,
    catalog_lookup,
    emit,
    fit_rate,
    run_study,
)
from .main import QuadratureApp
from .model import (
    DecayKind,
    DecayModelError,
    DecayProfile,
    FourierExponential,
    FunctionDoubleExponential,
    FunctionExponential,
    PolynomialDecay,
)
from .numerics import NumericsDomainError, PrecisionContext, gamma, lambert_w
from .planner import (
    Balance,
    ErrorBoundReport,
    PlanMode,
    PlanningError,
    QuadraturePlan,
    balance_residual,
    discretization_bound,
    plan_double_exponential,
    plan_exponential,
    truncation_bound_dexp,
    truncation_bound_exp,
)
from .quadrature import (
    Integrand,
    QuadratureError,
    QuadratureResult,
    error_split,
    evaluate_adaptive,
    evaluate_box,
    poisson_check,
)
from .transforms import (
    Transform1D,
    TransformChain,
    apply_chain,
    de_exp_eval,
    ooura_eval,
    ooura_params,
)
from .version import __version__

__all__ = [
    "__version__",
    "AdaptiveConfig",
    "Aggregates",
    "Balance",
    "CatalogEntry",
    "CatalogError",
    "DecayKind",
    "DecayModelError",
    "DecayProfile",
    "EmitError",
    "ErrorBoundReport",
    "FourierExponential",
    "FunctionDoubleExponential",
    "FunctionExponential",
    "Integrand",
    "NumericsDomainError",
    "PlanConfig",
    "PlanMode",
    "PlanningError",
    "PolynomialDecay",
    "PrecisionContext",
    "QuadConfig",
    "QuadratureApp",
    "QuadratureError",
    "QuadraturePlan",
    "QuadratureResult",
    "RateFit",
    "RateFitError",
    "StudyConfig",
    "StudyRecord",
    "TailKind",
    "TailSum",
    "Transform1D",
    "TransformChain",
    "aggregates",
    "apply_chain",
    "balance_residual",
    "brute_force_tail",
    "catalog_lookup",
    "de_exp_eval",
    "discretization_bound",
    "emit",
    "error_split",
    "evaluate_adaptive",
    "evaluate_box",
    "fit_rate",
    "gamma",
    "lambert_w",
    "ooura_eval",
    "ooura_params",
    "plan_double_exponential",
    "plan_exponential",
    "poisson_check",
    "run_study",
    "tail_bound_dexp",
    "tail_bound_dexp_printed",
    "tail_bound_exp",
    "tail_bound_exp_unit",
    "truncation_bound_dexp",
    "truncation_bound_exp",
]
