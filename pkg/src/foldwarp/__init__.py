"""Clustering with temporal alignment of Gaussian fold-change estimators.

The pipeline: estimate per-entity fold-change distributions from replicated
two-condition time courses (or simulate them), compute optimal-warping
dissimilarity matrices over a set of integer time shifts, and run k-medoids so
that entities are clustered and aligned to their medoids simultaneously.
"""

__version__ = "0.1.0"

from .dataset import (
    FoldChange,
    FoldChangeSet,
    ReplicateDataset,
    TimeVector,
    make_fold_change_set,
    validate_dataset,
)
from .estimation import PreprocessOptions, estimate, fc_norm, preprocess
from .metrics import d2_squared, hellinger_sq, pairwise_matrix, wasserstein_sq
from .warping import (
    OWDMatrices,
    WarpSpec,
    build_owd_ow,
    diss,
    diss_profiles,
    sign_penalty,
    warp_time,
)
from .clustering import (
    ClusterConfig,
    ClusteringResult,
    cluster_classic,
    cluster_fast,
    kmeanspp_init,
    silhouette,
    total_cost,
)
from .scores import ari, v_measure
from .simulation import SCENARIO_CODES, ScenarioSpec, SimulatedSet, simulate

__all__ = [
    "TimeVector",
    "ReplicateDataset",
    "FoldChange",
    "FoldChangeSet",
    "make_fold_change_set",
    "validate_dataset",
    "PreprocessOptions",
    "estimate",
    "fc_norm",
    "preprocess",
    "d2_squared",
    "wasserstein_sq",
    "hellinger_sq",
    "pairwise_matrix",
    "WarpSpec",
    "OWDMatrices",
    "warp_time",
    "diss",
    "diss_profiles",
    "sign_penalty",
    "build_owd_ow",
    "ClusterConfig",
    "ClusteringResult",
    "kmeanspp_init",
    "cluster_fast",
    "cluster_classic",
    "total_cost",
    "silhouette",
    "ari",
    "v_measure",
    "ScenarioSpec",
    "SimulatedSet",
    "simulate",
    "SCENARIO_CODES",
    "__version__",
]
