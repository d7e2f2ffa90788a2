"""Projection errors that score source category subsets against a target.

Two criteria measure how far the target-aligned source subspace (built from
only the given categories) sits from the target:

* subspace alignment error, ``||Us - Xt||_F``: subspace-level, compares the
  aligned source basis with the target basis directly.
* reprojection error, ``||T - (T Us) Us'||_F``: sampling-level, measures how
  poorly the target rows are reconstructed after passing through the aligned
  source subspace.

Both standardize each domain with its own statistics before PCA, so scores
are invariant to per-column scaling of either domain.
"""

from __future__ import annotations

import enum
from typing import Iterable

import numpy as np

from .alignment import align
from .dataio import Dataset
from .exceptions import DimensionError, InsufficientSamplesError, UnknownCategoryError
from .linalg import frobenius_norm, pca, standardize


class ErrorKind(enum.Enum):
    SUBSPACE_ALIGNMENT = "sa"
    REPROJECTION = "reproj"


def _normalize_subset(subset: Iterable[int]) -> tuple[int, ...]:
    labels = [int(v) for v in subset]
    if not labels:
        raise ValueError("category subset must be non-empty")
    if len(set(labels)) != len(labels):
        raise ValueError("category subset contains duplicates")
    # Canonical sorted order: scores have set semantics.
    return tuple(sorted(labels))


class SubsetScorer:
    """Scores category subsets of one source against one fixed target.

    The target subspace and the standardized matrices are computed once at
    construction and shared by every call, which is what makes greedy
    category selection affordable. ``score`` is a pure function of the
    subset, so concurrent scoring of different subsets is safe.
    """

    def __init__(self, source: Dataset, target: Dataset, d: int, kind: ErrorKind):
        if source.labels is None:
            raise ValueError("source dataset must be labeled")
        if target.n_samples < 1:
            raise DimensionError("target dataset is empty")
        if source.dim != target.dim:
            raise DimensionError(
                f"feature dimensions differ: source {source.dim}, target {target.dim}"
            )
        self.d = d
        self.kind = kind
        self._source_std, self.source_stats = standardize(source.features)
        self._source_labels = source.labels
        self._known = set(source.label_set())
        self.standardized_target, self.target_stats = standardize(target.features)
        self.target_subspace = pca(self.standardized_target, d)

    def score(self, subset: Iterable[int]) -> float:
        labels = _normalize_subset(subset)
        unknown = [v for v in labels if v not in self._known]
        if unknown:
            raise UnknownCategoryError(f"categories not in source: {unknown}")
        rows = self._source_std[np.isin(self._source_labels, labels)]
        if rows.shape[0] < self.d:
            raise InsufficientSamplesError(
                f"subset {labels} has {rows.shape[0]} samples, need at least {self.d}"
            )
        model = align(pca(rows, self.d), self.target_subspace)
        if self.kind is ErrorKind.SUBSPACE_ALIGNMENT:
            return frobenius_norm(model.u_s - self.target_subspace.basis)
        reconstructed = (self.standardized_target @ model.u_s) @ model.u_s.T
        return frobenius_norm(self.standardized_target - reconstructed)

    def score_or_inf(self, subset: Iterable[int]) -> float:
        """Like ``score`` but +inf when the subset is too small for PCA."""
        try:
            return self.score(subset)
        except InsufficientSamplesError:
            return float("inf")


def subspace_alignment_error(
    subset: Iterable[int], source: Dataset, target: Dataset, d: int
) -> float:
    """Subspace-level score ``||Us - Xt||_F`` for one category subset."""
    return SubsetScorer(source, target, d, ErrorKind.SUBSPACE_ALIGNMENT).score(subset)


def reprojection_error(
    subset: Iterable[int], source: Dataset, target: Dataset, d: int
) -> float:
    """Sampling-level score ``||T - (T Us) Us'||_F`` for one category subset."""
    return SubsetScorer(source, target, d, ErrorKind.REPROJECTION).score(subset)
