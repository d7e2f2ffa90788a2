"""Unsupervised domain adaptation across asymmetric category sets.

The pipeline orders source categories by how well their subspace aligns
with an unlabeled target, picks a stopping point on the error curve,
aligns the selected subspace, and trains a linear max-margin classifier
whose predictions happen directly in the target subspace.
"""

from .alignment import AlignedModel, align, project_source, project_target, similarity
from .classifier import (
    AdaptedClassifier,
    ClassifierConfig,
    evaluate,
    load_classifier,
    predict,
    save_classifier,
    train,
)
from .dataio import (
    Dataset,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    load_matrix_bin,
    read_synthetic_config,
    relabel_to_reference,
    save_csv,
    save_matrix_bin,
)
from .evolution import (
    EvolutionTrace,
    StopRule,
    evolve,
    select_k,
    selected_categories,
    write_trace_csv,
)
from .linalg import Standardization, Subspace, frobenius_norm, pca, standardize
from .multisource import (
    SourcePool,
    enforce_cover,
    evolve_multi,
    pool_sources,
    unpool,
    write_pooled_trace_csv,
)
from .scoring import (
    ErrorKind,
    SubsetScorer,
    reprojection_error,
    subspace_alignment_error,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptedClassifier",
    "AlignedModel",
    "ClassifierConfig",
    "Dataset",
    "ErrorKind",
    "EvolutionTrace",
    "SourcePool",
    "Standardization",
    "StopRule",
    "Subspace",
    "SubsetScorer",
    "SyntheticSpec",
    "align",
    "enforce_cover",
    "evaluate",
    "evolve",
    "evolve_multi",
    "frobenius_norm",
    "generate_synthetic",
    "load_classifier",
    "load_csv",
    "load_matrix_bin",
    "pca",
    "pool_sources",
    "predict",
    "project_source",
    "project_target",
    "read_synthetic_config",
    "relabel_to_reference",
    "reprojection_error",
    "save_classifier",
    "save_csv",
    "save_matrix_bin",
    "select_k",
    "selected_categories",
    "similarity",
    "standardize",
    "subspace_alignment_error",
    "train",
    "unpool",
    "write_pooled_trace_csv",
    "write_trace_csv",
    "__version__",
]
