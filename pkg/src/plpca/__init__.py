"""Persistent-Laplacian-regularized PCA and friends.

Dimension reduction for labeled expression matrices by a family of
related objectives (plain, supervised-sparse, graph-regularized, and
robust variants, up to aggregate multi-threshold Laplacian smoothing),
plus the simplicial machinery behind the aggregate regularizer and a
KNN evaluation harness.
"""

from .data import (
    ExpressionDataset,
    SplitPlan,
    export_csv,
    ingest_csv,
    make_splits,
    normalize,
    one_hot,
    synth_outliers,
)
from .errors import (
    ConfigurationError,
    CSVParseError,
    InclusionError,
    LabelError,
    NumericalError,
)
from .estimator import RegularizedPCA
from .evaluation import (
    EvalReport,
    METRIC_KEYS,
    outlier_benchmark,
    sweep_dimensions,
)
from .filtration import (
    FILTRATION_DIRECTIONS,
    PersistentRegularizer,
    aggregate_pl,
    filtered_family,
    persistent_regularizer,
)
from .graph import GraphLaplacian, build_knn_graph, laplacian_quadratic, to_coordinate_text
from .metrics import (
    MacroMetrics,
    RSScores,
    confusion_matrix,
    knn_predict,
    macro_auc,
    macro_metrics,
    rs_scores,
)
from .presets import PRESETS, preset
from .solver import (
    METHODS,
    ProjectionModel,
    SolverConfig,
    SolverState,
    build_regularizer,
    fit_projection,
    l21_norm,
    objective,
    project,
    q_subproblem,
    save_model,
    uses_labels,
    uses_regularizer,
)
from .topology import (
    PersistentSpectrum,
    SimplicialComplex,
    boundary_matrix,
    build_complex_vr,
    combinatorial_laplacian,
    combinatorial_spectrum,
    persistent_laplacian_q,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "CSVParseError",
    "EvalReport",
    "ExpressionDataset",
    "FILTRATION_DIRECTIONS",
    "GraphLaplacian",
    "InclusionError",
    "LabelError",
    "MacroMetrics",
    "METHODS",
    "METRIC_KEYS",
    "NumericalError",
    "PersistentRegularizer",
    "PersistentSpectrum",
    "PRESETS",
    "ProjectionModel",
    "RegularizedPCA",
    "RSScores",
    "SimplicialComplex",
    "SolverConfig",
    "SolverState",
    "SplitPlan",
    "aggregate_pl",
    "boundary_matrix",
    "build_complex_vr",
    "build_knn_graph",
    "build_regularizer",
    "combinatorial_laplacian",
    "combinatorial_spectrum",
    "confusion_matrix",
    "export_csv",
    "filtered_family",
    "fit_projection",
    "ingest_csv",
    "knn_predict",
    "l21_norm",
    "laplacian_quadratic",
    "macro_auc",
    "macro_metrics",
    "make_splits",
    "normalize",
    "objective",
    "one_hot",
    "outlier_benchmark",
    "persistent_laplacian_q",
    "persistent_regularizer",
    "preset",
    "project",
    "q_subproblem",
    "rs_scores",
    "save_model",
    "sweep_dimensions",
    "synth_outliers",
    "to_coordinate_text",
    "uses_labels",
    "uses_regularizer",
]
