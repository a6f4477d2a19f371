"""Multi-structure geometric model fitting by mode seeking on hypergraphs.

The pipeline estimates the number and the parameters of model instances
(lines, circles, homographies, fundamental matrices) in heavily
contaminated data: hypotheses sampled from minimal subsets become the
vertices of a hypergraph whose hyperedges are data points, vertices are
weighted by kernel density over their inliers, low-information vertices
are removed by an entropy threshold, and the surviving modes are found by
ranking minimum Tanimoto distances between preference vectors.
"""

from .backend import active_backend, available_backends
from .errors import (
    DegenerateSubset,
    DivergedScale,
    EmptyHypergraph,
    FileFormatError,
    InsufficientData,
    LengthMismatch,
    MshfError,
    PipelineStageError,
    TooManyDegenerate,
    UnknownTemplate,
)
from .hypergraph import (
    Hypergraph,
    ReductionReport,
    Vertex,
    build_hypergraph,
    epanechnikov,
    epanechnikov_bandwidth,
    reduce_hypergraph,
    vertex_weight,
)
from .metrics import TrialReport, fitting_error, run_trials
from .models import (
    DataSet,
    ModelKind,
    ModelParams,
    fit_minimal,
    fit_minimal_all,
    minimal_subset_size,
    residual,
    residuals,
)
from .modes import (
    DecisionGraphEntry,
    ModeSelection,
    PreferenceVector,
    derive_labels,
    minimum_t_distance,
    neighbor_set,
    preference_vector,
    select_modes,
    tanimoto_distance,
)
from .pipeline import FitResult, ModeInfo, PreparedHypergraph, RunConfig, fit, prepare, seek_modes
from .sampling import (
    HypothesisPool,
    SamplerConfig,
    default_proximity_sigma,
    sample_hypotheses,
    sample_pool,
)
from .scale import (
    INLIER_BAND,
    ScaleConfig,
    ScaleEstimate,
    ikose_scale,
    ikose_scale_detailed,
    normal_quantile,
)
from .synth import SyntheticScene, generate_scene, scene_templates

__version__ = "0.1.0"

__all__ = [
    "DataSet",
    "DecisionGraphEntry",
    "DegenerateSubset",
    "DivergedScale",
    "EmptyHypergraph",
    "FileFormatError",
    "FitResult",
    "Hypergraph",
    "HypothesisPool",
    "INLIER_BAND",
    "InsufficientData",
    "LengthMismatch",
    "ModeInfo",
    "ModeSelection",
    "ModelKind",
    "ModelParams",
    "MshfError",
    "PipelineStageError",
    "PreferenceVector",
    "PreparedHypergraph",
    "ReductionReport",
    "RunConfig",
    "SamplerConfig",
    "ScaleConfig",
    "ScaleEstimate",
    "SyntheticScene",
    "TooManyDegenerate",
    "TrialReport",
    "UnknownTemplate",
    "Vertex",
    "active_backend",
    "available_backends",
    "build_hypergraph",
    "default_proximity_sigma",
    "derive_labels",
    "epanechnikov",
    "epanechnikov_bandwidth",
    "fit",
    "fit_minimal",
    "fit_minimal_all",
    "fitting_error",
    "generate_scene",
    "ikose_scale",
    "ikose_scale_detailed",
    "minimal_subset_size",
    "minimum_t_distance",
    "neighbor_set",
    "normal_quantile",
    "preference_vector",
    "prepare",
    "reduce_hypergraph",
    "residual",
    "residuals",
    "run_trials",
    "sample_hypotheses",
    "sample_pool",
    "scene_templates",
    "seek_modes",
    "select_modes",
    "tanimoto_distance",
    "vertex_weight",
]
