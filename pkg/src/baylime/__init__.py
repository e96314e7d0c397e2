"""Local surrogate explanations for black-box models, with Bayesian priors.

The workflow: perturb an instance, probe the black box, weight samples by
proximity, fit a weighted linear surrogate, rank features by coefficient
magnitude. The surrogate is either a plain ridge regression or a Bayesian
linear regression whose prior can encode knowledge from earlier
explanations; two metrics quantify how consistent repeated explanations
are and how robust they stay under kernel-width changes.
"""

__version__ = "0.1.0"

from .blackbox import PredictorHandle, probe, select_class, with_class
from .errors import (
    BaylimeError,
    ConfigError,
    ContractViolationError,
    ConvergenceError,
    DecompositionError,
    FitError,
    InvalidInputError,
    ProbeError,
    ShapeError,
    SingularityError,
    UndefinedMetricError,
)
from .explainer import (
    BayLime,
    ExplainConfig,
    LimeRidge,
    elicit_prior,
    explain,
    explain_repeated,
)
from .kernel import KernelConfig, apply_weights, default_width, kernel_weight
from .metrics import (
    MetricReport,
    inconsistency,
    kendalls_w,
    pair_ratio,
    robustness,
    robustness_from_pset,
    width_pairs,
)
from .perturb import (
    PerturbConfig,
    build_perturbation_set,
    column_statistics,
    config_from_data,
    frequency_table,
    perturb_matrix,
)
from .regression import (
    PriorSpec,
    SurrogateFit,
    bayes_fit_full,
    bayes_fit_noninformative,
    bayes_fit_partial,
    decompose,
    fit_surrogate,
    ridge_fit,
)
from .types import (
    BINARY_MASK,
    CATEGORICAL,
    NUMERICAL,
    Explanation,
    ExplanationEnsemble,
    Instance,
    PerturbationSet,
    normalize_coefficients,
    rank_features,
)

__all__ = [
    "__version__",
    "BINARY_MASK", "CATEGORICAL", "NUMERICAL",
    "BayLime", "BaylimeError", "ConfigError", "ContractViolationError",
    "ConvergenceError", "DecompositionError", "ExplainConfig", "Explanation",
    "ExplanationEnsemble", "FitError", "Instance", "InvalidInputError",
    "KernelConfig", "LimeRidge", "MetricReport", "PerturbConfig",
    "PerturbationSet", "PredictorHandle", "PriorSpec", "ProbeError",
    "ShapeError", "SingularityError", "SurrogateFit", "UndefinedMetricError",
    "apply_weights", "bayes_fit_full", "bayes_fit_noninformative",
    "bayes_fit_partial", "build_perturbation_set", "column_statistics",
    "config_from_data", "decompose", "default_width", "elicit_prior",
    "explain", "explain_repeated", "fit_surrogate", "frequency_table",
    "inconsistency", "kendalls_w", "kernel_weight", "normalize_coefficients",
    "pair_ratio", "perturb_matrix", "probe", "rank_features", "ridge_fit",
    "robustness", "robustness_from_pset", "select_class", "width_pairs",
    "with_class",
]
