"""Linear max-margin classification across the aligned subspace pair.

Training rows are source samples standardized with the full source-domain
statistics, restricted to the selected categories, then projected through
the target-aligned basis ``u_s``. Prediction rows are target samples
standardized with the target-domain statistics and projected through the
plain target basis. One binary max-margin model per category, trained with
a stochastic subgradient schedule, combined one-vs-rest by highest score.

The trained model serializes to a small binary container (magic ``SADM``)
holding both domains' statistics, both bases and the per-class weights, so
prediction needs no access to the original datasets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .alignment import AlignedModel, align
from .dataio import Dataset, _read_exact
from .exceptions import (
    BadMagicError,
    DimensionError,
    InsufficientSamplesError,
    LengthMismatchError,
    NonFiniteDataError,
    UnknownCategoryError,
    UnsupportedVersionError,
)
from .linalg import Standardization, Subspace, _readonly, pca, standardize

_MAGIC = b"SADM"
_VERSION = 1


@dataclass(frozen=True)
class ClassifierConfig:
    """Hyperparameters for the stochastic max-margin solver."""

    reg: float = 1e-4
    epochs: int = 50
    seed: int = 42

    def __post_init__(self):
        if not self.reg > 0:
            raise ValueError(f"reg must be positive, got {self.reg}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be at least 1, got {self.epochs}")


@dataclass(frozen=True)
class AdaptedClassifier:
    """One-vs-rest linear model operating across an aligned subspace pair.

    ``weights`` has one row per class, in ``class_ids`` order; score ties at
    prediction time resolve to the smaller class identifier because ids are
    kept sorted. Source rows live in ``model.u_s`` coordinates, target rows
    in plain target-basis coordinates, and each domain keeps its own
    standardization statistics.
    """

    model: AlignedModel
    class_ids: tuple[int, ...]
    weights: np.ndarray
    biases: np.ndarray
    source_stats: Standardization
    target_stats: Standardization
    category_names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(np.atleast_2d(self.weights)))
        object.__setattr__(
            self, "biases", _readonly(np.asarray(self.biases, dtype=np.float64))
        )
        c = len(self.class_ids)
        if self.weights.shape != (c, self.model.sub_dim):
            raise DimensionError(
                f"weights shape {self.weights.shape} does not match "
                f"{c} classes x {self.model.sub_dim} dimensions"
            )
        if self.biases.shape != (c,):
            raise DimensionError(f"expected {c} biases, got shape {self.biases.shape}")
        if list(self.class_ids) != sorted(set(self.class_ids)):
            raise ValueError("class_ids must be strictly increasing")

    @property
    def ambient_dim(self) -> int:
        return self.model.ambient_dim

    @property
    def sub_dim(self) -> int:
        return self.model.sub_dim

    @property
    def num_classes(self) -> int:
        return len(self.class_ids)


def _pegasos(features: np.ndarray, targets: np.ndarray, config: ClassifierConfig):
    """Binary max-margin solver; returns (weight vector, bias).

    Learning rate 1/(reg*t) with the weight shrunk by (1 - 1/t) each step;
    the bias rides along as a constant feature. The same seed yields the
    same visit order for every class, keeping training deterministic.
    """
    n, dim = features.shape
    x = np.concatenate([features, np.ones((n, 1))], axis=1)
    w = np.zeros(dim + 1)
    rng = np.random.default_rng(config.seed)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            margin = targets[i] * (w @ x[i])
            w *= 1.0 - 1.0 / t
            if margin < 1.0:
                w += (targets[i] / (config.reg * t)) * x[i]
    return w[:dim], float(w[dim])


def train(
    source: Dataset,
    c_train: Sequence[int],
    target: Dataset,
    d: int,
    config: ClassifierConfig | None = None,
) -> AdaptedClassifier:
    """Fit the one-vs-rest model on the ``c_train`` source categories.

    Standardization statistics come from the whole source domain even when
    only a few categories are kept, matching how subsets are scored during
    evolution. The restricted source subspace is aligned to the target
    subspace and training happens in the aligned coordinates.
    """
    if config is None:
        config = ClassifierConfig()
    if source.labels is None:
        raise ValueError("source dataset must be labeled")
    if source.dim != target.dim:
        raise DimensionError(
            f"source dim {source.dim} does not match target dim {target.dim}"
        )
    class_ids = tuple(sorted(set(int(c) for c in c_train)))
    if not class_ids:
        raise ValueError("c_train must be non-empty")
    unknown = set(class_ids) - set(source.label_set())
    if unknown:
        raise UnknownCategoryError(f"unknown source categories: {sorted(unknown)}")

    std_source, source_stats = standardize(source.features)
    std_target, target_stats = standardize(target.features)
    mask = np.isin(source.labels, class_ids)
    rows = std_source[mask]
    row_labels = source.labels[mask]
    if rows.shape[0] < d:
        raise InsufficientSamplesError(
            f"{rows.shape[0]} samples cannot support a {d}-dimensional subspace"
        )
    model = align(pca(rows, d), pca(std_target, d))
    train_x = rows @ model.u_s

    weights = np.empty((len(class_ids), d))
    biases = np.empty(len(class_ids))
    for row, ident in enumerate(class_ids):
        y = np.where(row_labels == ident, 1.0, -1.0)
        weights[row], biases[row] = _pegasos(train_x, y, config)
    names = {c: source.category_names.get(c, str(c)) for c in class_ids}
    return AdaptedClassifier(
        model=model,
        class_ids=class_ids,
        weights=weights,
        biases=biases,
        source_stats=source_stats,
        target_stats=target_stats,
        category_names=names,
    )


def predict(classifier: AdaptedClassifier, target) -> np.ndarray:
    """Predict class ids for target-domain rows (a Dataset or raw matrix)."""
    features = target.features if isinstance(target, Dataset) else target
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2D array, got {arr.ndim}D")
    if arr.shape[1] != classifier.ambient_dim:
        raise DimensionError(
            f"expected {classifier.ambient_dim} features, got {arr.shape[1]}"
        )
    if arr.size and not np.isfinite(arr).all():
        raise NonFiniteDataError("features contain nan or inf")
    if arr.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    std, _ = standardize(arr, classifier.target_stats)
    scores = std @ classifier.model.target_subspace.basis @ classifier.weights.T
    scores += classifier.biases
    picks = np.argmax(scores, axis=1)
    ids = np.asarray(classifier.class_ids, dtype=np.int64)
    return ids[picks]


def evaluate(predictions, ground_truth) -> float:
    """Fraction of exact label matches between two equally long sequences."""
    predicted = np.asarray(predictions)
    truth = np.asarray(ground_truth)
    if predicted.shape != truth.shape:
        raise LengthMismatchError(
            f"{predicted.shape[0]} predictions vs {truth.shape[0]} labels"
        )
    if predicted.size == 0:
        raise ValueError("cannot compute accuracy of zero predictions")
    return float(np.mean(predicted == truth))


def save_classifier(classifier: AdaptedClassifier, path) -> None:
    """Write the SADM binary container."""
    d = classifier.sub_dim
    big_d = classifier.ambient_dim
    c = classifier.num_classes
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQQ", _VERSION, big_d, d, c))
        fh.write(classifier.source_stats.mean.astype("<f8").tobytes())
        fh.write(classifier.source_stats.scale.astype("<f8").tobytes())
        fh.write(classifier.target_stats.mean.astype("<f8").tobytes())
        fh.write(classifier.target_stats.scale.astype("<f8").tobytes())
        fh.write(classifier.model.source_subspace.basis.astype("<f8").tobytes())
        fh.write(classifier.model.target_subspace.basis.astype("<f8").tobytes())
        fh.write(classifier.weights.astype("<f8").tobytes())
        fh.write(classifier.biases.astype("<f8").tobytes())
        fh.write(np.asarray(classifier.class_ids, dtype="<u4").tobytes())
        names = sorted(classifier.category_names.items())
        fh.write(struct.pack("<I", len(names)))
        for ident, name in names:
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<II", ident, len(encoded)))
            fh.write(encoded)


def load_classifier(path) -> AdaptedClassifier:
    """Read a SADM binary container back into a classifier."""

    def matrix(fh, rows, cols, what):
        data = _read_exact(fh, 8 * rows * cols, what)
        return np.frombuffer(data, dtype="<f8").reshape(rows, cols).copy()

    with Path(path).open("rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != _MAGIC:
            raise BadMagicError(f"expected {_MAGIC!r}, got {magic!r}")
        version, big_d, d, c = struct.unpack("<IQQQ", _read_exact(fh, 28, "header"))
        if version != _VERSION:
            raise UnsupportedVersionError(f"unsupported classifier version {version}")
        source_mean = matrix(fh, 1, big_d, "source mean").ravel()
        source_scale = matrix(fh, 1, big_d, "source scale").ravel()
        target_mean = matrix(fh, 1, big_d, "target mean").ravel()
        target_scale = matrix(fh, 1, big_d, "target scale").ravel()
        source_basis = matrix(fh, big_d, d, "source basis")
        target_basis = matrix(fh, big_d, d, "target basis")
        weights = matrix(fh, c, d, "weights")
        biases = matrix(fh, 1, c, "biases").ravel()
        ids = np.frombuffer(_read_exact(fh, 4 * c, "class ids"), dtype="<u4")
        (name_count,) = struct.unpack("<I", _read_exact(fh, 4, "name count"))
        names = {}
        for _ in range(name_count):
            ident, length = struct.unpack("<II", _read_exact(fh, 8, "name entry"))
            names[int(ident)] = _read_exact(fh, length, "name bytes").decode("utf-8")
    return AdaptedClassifier(
        model=align(Subspace(source_basis), Subspace(target_basis)),
        class_ids=tuple(int(i) for i in ids),
        weights=weights,
        biases=biases,
        source_stats=Standardization(source_mean, source_scale),
        target_stats=Standardization(target_mean, target_scale),
        category_names=names,
    )
