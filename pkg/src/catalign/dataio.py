"""Dataset ingestion, synthetic cluster data, and on-disk formats.

Two formats are supported:

* CSV with a header row. A ``label`` column is optional; all other columns
  are parsed as float64 features. Label strings are mapped to dense integer
  identifiers in first-appearance order and the mapping is kept on the
  dataset as ``category_names``.
* A binary container (extension-agnostic, magic ``SADS``)::

      magic        4 bytes  b"SADS"
      version      u32 LE   (currently 1)
      n_samples    u64 LE
      n_features   u64 LE
      features     n_samples * n_features float64 LE, row-major
      labels       n_samples u32 LE (all 0xFFFFFFFF when unlabeled)
      name_count   u32 LE
      names        name_count * (u32 id, u32 byte_len, utf-8 bytes)

  Features are stored as 64-bit floats so save/load round-trips are
  bit-exact; 32-bit inputs are widened on save.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Callable, Iterable, Sequence

import numpy as np

from .exceptions import (
    BadMagicError,
    DimensionError,
    InfeasibleGeometryError,
    NonFiniteDataError,
    NonNumericFeatureError,
    ParseError,
    RaggedRowsError,
    TruncatedFileError,
    UnknownCategoryError,
    UnsupportedVersionError,
)
from .linalg import _readonly

_MAGIC = b"SADS"
_VERSION = 1
_UNLABELED = 0xFFFFFFFF


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with optional integer category labels.

    ``labels`` is None for unlabeled data (targets whose categories are
    unknown). ``category_names`` maps every label identifier to a display
    name; it defaults to the decimal string of the identifier.
    """

    features: np.ndarray
    labels: np.ndarray | None = None
    category_names: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise DimensionError(f"features must be 2-dimensional, got shape {feats.shape}")
        if feats.shape[1] < 1:
            raise DimensionError("features must have at least one column")
        if not np.all(np.isfinite(feats)):
            raise NonFiniteDataError("features contain NaN or infinite entries")
        object.__setattr__(self, "features", _readonly(feats))

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.dtype.kind not in "iu":
                raise ValueError("labels must be integers")
            if labels.shape != (feats.shape[0],):
                raise DimensionError(
                    f"expected {feats.shape[0]} labels, got shape {labels.shape}"
                )
            labels = labels.astype(np.int64)
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
            names = dict(self.category_names) if self.category_names else {}
            for ident in np.unique(labels):
                names.setdefault(int(ident), str(int(ident)))
            object.__setattr__(self, "category_names", names)
        elif self.category_names:
            raise ValueError("category_names given for an unlabeled dataset")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def label_set(self) -> tuple[int, ...]:
        if self.labels is None:
            return ()
        return tuple(int(v) for v in np.unique(self.labels))

    def restrict(self, labels: Iterable[int]) -> "Dataset":
        """Rows whose label is in ``labels``; raises on unknown identifiers."""
        wanted = [int(v) for v in labels]
        known = set(self.label_set())
        missing = [v for v in wanted if v not in known]
        if missing:
            raise UnknownCategoryError(f"categories not in dataset: {sorted(missing)}")
        mask = np.isin(self.labels, wanted)
        kept = self.labels[mask]
        return Dataset(
            features=self.features[mask],
            labels=kept,
            category_names={int(v): self.category_names[int(v)] for v in np.unique(kept)},
        )


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def load_csv(path) -> Dataset:
    """Parse a CSV file into a Dataset.

    The header must name the columns; a column called ``label`` (any
    position) carries categories, all remaining columns are numeric
    features. Errors report 1-based file row and column locations.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty") from None
        label_col = header.index("label") if "label" in header else None
        feature_cols = [i for i in range(len(header)) if i != label_col]
        if not feature_cols:
            raise ParseError(f"{path}: no feature columns in header")

        rows: list[list[float]] = []
        raw_labels: list[str] = []
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != len(header):
                raise RaggedRowsError(
                    f"{path}: expected {len(header)} cells, got {len(cells)}", row=lineno
                )
            parsed = []
            for col in feature_cols:
                text = cells[col].strip()
                try:
                    value = float(text)
                except ValueError:
                    raise NonNumericFeatureError(
                        f"{path}: feature cell {text!r} is not numeric",
                        row=lineno,
                        column=col + 1,
                    ) from None
                if not math.isfinite(value):
                    raise NonFiniteDataError(
                        f"{path}: non-finite feature at row {lineno}, column {col + 1}"
                    )
                parsed.append(value)
            rows.append(parsed)
            if label_col is not None:
                raw_labels.append(cells[label_col].strip())

    if not rows:
        raise ParseError(f"{path}: no data rows")
    features = np.array(rows, dtype=np.float64)
    if label_col is None:
        return Dataset(features=features)
    ident_of: dict[str, int] = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, name in enumerate(raw_labels):
        labels[i] = ident_of.setdefault(name, len(ident_of))
    names = {ident: name for name, ident in ident_of.items()}
    return Dataset(features=features, labels=labels, category_names=names)


def save_csv(dataset: Dataset, path) -> None:
    """Write a Dataset as CSV; the inverse of :func:`load_csv`."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        feature_names = [f"f{i}" for i in range(dataset.dim)]
        if dataset.labels is not None:
            writer.writerow(["label", *feature_names])
            for label, row in zip(dataset.labels, dataset.features):
                writer.writerow(
                    [dataset.category_names[int(label)], *(repr(float(v)) for v in row)]
                )
        else:
            writer.writerow(feature_names)
            for row in dataset.features:
                writer.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# Binary container
# ---------------------------------------------------------------------------


def _read_exact(fh: BinaryIO, count: int, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise TruncatedFileError(f"file ends inside {what} ({len(data)}/{count} bytes)")
    return data


def save_matrix_bin(dataset: Dataset, path) -> None:
    """Write the binary container format (bit-exact round-trip)."""
    path = Path(path)
    n, dim = dataset.features.shape
    if dataset.labels is None:
        labels = np.full(n, _UNLABELED, dtype=np.uint32)
        names: dict[int, str] = {}
    else:
        if np.any(dataset.labels < 0) or np.any(dataset.labels >= _UNLABELED):
            raise ValueError("binary container stores labels as u32; ids out of range")
        labels = dataset.labels.astype(np.uint32)
        names = dataset.category_names
    with path.open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQ", _VERSION, n, dim))
        fh.write(np.ascontiguousarray(dataset.features, dtype="<f8").tobytes())
        fh.write(labels.astype("<u4").tobytes())
        fh.write(struct.pack("<I", len(names)))
        for ident in sorted(names):
            encoded = names[ident].encode("utf-8")
            fh.write(struct.pack("<II", ident, len(encoded)))
            fh.write(encoded)


def load_matrix_bin(path) -> Dataset:
    """Read the binary container format written by :func:`save_matrix_bin`."""
    path = Path(path)
    with path.open("rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != _MAGIC:
            raise BadMagicError(f"{path}: expected magic {_MAGIC!r}, found {magic!r}")
        version, n, dim = struct.unpack("<IQQ", _read_exact(fh, 20, "header"))
        if version != _VERSION:
            raise UnsupportedVersionError(f"{path}: unsupported format version {version}")
        features = np.frombuffer(
            _read_exact(fh, 8 * n * dim, "feature matrix"), dtype="<f8"
        ).reshape(n, dim)
        labels = np.frombuffer(_read_exact(fh, 4 * n, "labels"), dtype="<u4")
        (name_count,) = struct.unpack("<I", _read_exact(fh, 4, "name table size"))
        names: dict[int, str] = {}
        for _ in range(name_count):
            ident, length = struct.unpack("<II", _read_exact(fh, 8, "name entry"))
            names[ident] = _read_exact(fh, length, "name bytes").decode("utf-8")
    if n > 0 and np.all(labels == _UNLABELED):
        return Dataset(features=features)
    return Dataset(features=features, labels=labels.astype(np.int64), category_names=names)


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Geometry of a synthetic Gaussian-cluster dataset."""

    num_categories: int
    samples_per_category: int
    feature_dim: int
    cluster_spread: float = 1.0
    center_separation: float = 10.0
    seed: int = 42

    def __post_init__(self):
        if self.num_categories < 1 or self.samples_per_category < 1 or self.feature_dim < 1:
            raise ValueError("counts must be >= 1")
        if self.cluster_spread <= 0 or self.center_separation <= 0:
            raise ValueError("cluster_spread and center_separation must be positive")


def _draw_centers(rng: np.random.Generator, spec: SyntheticSpec) -> np.ndarray:
    centers: list[np.ndarray] = []
    scale = 1.5 * spec.center_separation
    for _ in range(spec.num_categories):
        for _attempt in range(2000):
            candidate = scale * rng.standard_normal(spec.feature_dim)
            if all(
                np.linalg.norm(candidate - c) >= spec.center_separation for c in centers
            ):
                centers.append(candidate)
                break
        else:
            raise InfeasibleGeometryError(
                f"could not place {spec.num_categories} centers at separation "
                f"{spec.center_separation} in dimension {spec.feature_dim}"
            )
    return np.vstack(centers)


def generate_synthetic(
    spec: SyntheticSpec,
) -> tuple[Dataset, Callable[..., Dataset]]:
    """Build a clustered source dataset and a factory for matching targets.

    Returns the source dataset plus ``make_target(labels, samples_per_category
    =None, *, shift=0.0, seed=None)``, which resamples fresh points around the
    same cluster centers for a chosen label subset. ``shift`` displaces every
    target point by a random vector of that norm, simulating domain shift.
    Everything is deterministic given the seeds.
    """
    rng = np.random.default_rng(spec.seed)
    centers = _draw_centers(rng, spec)
    blocks = [
        centers[j] + spec.cluster_spread * rng.standard_normal(
            (spec.samples_per_category, spec.feature_dim)
        )
        for j in range(spec.num_categories)
    ]
    labels = np.repeat(np.arange(spec.num_categories), spec.samples_per_category)
    source = Dataset(features=np.vstack(blocks), labels=labels)

    def make_target(
        labels: Sequence[int],
        samples_per_category: int | None = None,
        *,
        shift: float = 0.0,
        seed: int | None = None,
    ) -> Dataset:
        chosen = sorted(int(v) for v in labels)
        if not chosen:
            raise ValueError("target needs at least one label")
        unknown = [v for v in chosen if not 0 <= v < spec.num_categories]
        if unknown:
            raise UnknownCategoryError(f"labels not generated by this spec: {unknown}")
        per_cat = spec.samples_per_category if samples_per_category is None else samples_per_category
        rng2 = np.random.default_rng(spec.seed + 1 if seed is None else seed)
        offset = np.zeros(spec.feature_dim)
        if shift:
            direction = rng2.standard_normal(spec.feature_dim)
            offset = shift * direction / np.linalg.norm(direction)
        rows = [
            centers[j] + offset + spec.cluster_spread * rng2.standard_normal(
                (per_cat, spec.feature_dim)
            )
            for j in chosen
        ]
        return Dataset(
            features=np.vstack(rows),
            labels=np.repeat(np.asarray(chosen, dtype=np.int64), per_cat),
        )

    return source, make_target


def read_synthetic_config(path) -> SyntheticSpec:
    """Parse a flat ``key = value`` config file ('#' starts a comment).

    Required keys: num_categories, samples_per_category, feature_dim.
    Optional: cluster_spread, center_separation, seed.
    """
    path = Path(path)
    int_keys = {"num_categories", "samples_per_category", "feature_dim", "seed"}
    float_keys = {"cluster_spread", "center_separation"}
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}: expected 'key = value'", row=lineno)
        key, _, text = (part.strip() for part in line.partition("="))
        if key not in int_keys | float_keys:
            raise ParseError(f"{path}: unknown key {key!r}", row=lineno)
        try:
            values[key] = int(text) if key in int_keys else float(text)
        except ValueError:
            raise ParseError(f"{path}: bad value {text!r} for {key}", row=lineno) from None
    missing = {"num_categories", "samples_per_category", "feature_dim"} - values.keys()
    if missing:
        raise ParseError(f"{path}: missing required keys {sorted(missing)}")
    return SyntheticSpec(**values)  # type: ignore[arg-type]


def relabel_to_reference(dataset: Dataset, reference: Dataset) -> np.ndarray:
    """Map ``dataset`` labels into ``reference`` identifier space by name.

    Independently loaded files number their categories independently, so
    accuracy against predictions made in the reference (source) space needs
    this remapping. Names absent from the reference map to -1, which never
    matches a prediction.
    """
    if dataset.labels is None:
        raise ValueError("dataset has no labels to remap")
    by_name = {name: ident for ident, name in reference.category_names.items()}
    lookup = {
        ident: by_name.get(name, -1) for ident, name in dataset.category_names.items()
    }
    return np.array([lookup[int(v)] for v in dataset.labels], dtype=np.int64)
