"""Conditional density trees: decision trees with MDL-optimal histogram
leaves, learned without regularization hyperparameters."""

from .codes import (
    RegretCache,
    log2_catalan,
    log_multinomial_regret,
    regret_oracle,
    rissanen_code_length,
)
from .core import (
    Bounds,
    CdTree,
    ColumnKind,
    DataError,
    DataFrame,
    FitConfig,
    FitError,
    FittedHistogram,
    Internal,
    Leaf,
    MdlScore,
    Schema,
    SplitCondition,
    ValidationError,
    validate,
)
from .data import (
    IngestConfig,
    NoiseSpec,
    inject_noise_features,
    kfold,
    load_csv,
    make_step_dataset,
    save_csv,
)
from .evaluation import (
    CvReport,
    EvalReport,
    count_irrelevant_splits,
    cross_validate,
    evaluate_nll,
    leaf_count,
)
from .histogram import (
    LeafScore,
    fit_histogram,
    histogram_nll_bits,
    leaf_score,
    optimal_histogram,
)
from .inference import LeafRule, density_grid, leaf_rules, log_density, route
from .kernels import BACKEND
from .learner import FitTrace, fit, model_code_length_bits, total_mdl_score
from .splitter import SplitProposal, best_split_for_node, candidate_thresholds, evaluate_candidate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bounds",
    "CdTree",
    "ColumnKind",
    "CvReport",
    "DataError",
    "DataFrame",
    "EvalReport",
    "FitConfig",
    "FitError",
    "FitTrace",
    "FittedHistogram",
    "IngestConfig",
    "Internal",
    "Leaf",
    "LeafRule",
    "LeafScore",
    "MdlScore",
    "NoiseSpec",
    "RegretCache",
    "Schema",
    "SplitCondition",
    "SplitProposal",
    "ValidationError",
    "best_split_for_node",
    "candidate_thresholds",
    "count_irrelevant_splits",
    "cross_validate",
    "density_grid",
    "evaluate_candidate",
    "evaluate_nll",
    "fit",
    "fit_histogram",
    "histogram_nll_bits",
    "inject_noise_features",
    "kfold",
    "leaf_count",
    "leaf_rules",
    "leaf_score",
    "load_csv",
    "log2_catalan",
    "log_density",
    "log_multinomial_regret",
    "make_step_dataset",
    "model_code_length_bits",
    "optimal_histogram",
    "regret_oracle",
    "rissanen_code_length",
    "route",
    "save_csv",
    "total_mdl_score",
    "validate",
]
