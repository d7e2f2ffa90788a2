"""Dense subspace primitives: PCA bases, Frobenius norm, z-scoring.

Everything here operates on plain float64 numpy arrays and is pure, so all
functions are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateDataError, DimensionError, NonFiniteDataError

ORTHONORMALITY_TOL = 1e-8


def _as_float_matrix(data, name: str = "data") -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteDataError(f"{name} contains NaN or infinite entries")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis of a linear subspace, stored as a D x d matrix.

    Columns are orthonormal within ``ORTHONORMALITY_TOL`` and the instance is
    immutable (the basis array is marked read-only).
    """

    basis: np.ndarray

    def __post_init__(self):
        basis = _as_float_matrix(self.basis, "basis")
        if basis.shape[1] > basis.shape[0]:
            raise DimensionError(
                f"subspace dimension {basis.shape[1]} exceeds ambient dimension {basis.shape[0]}"
            )
        gram = basis.T @ basis
        defect = float(np.linalg.norm(gram - np.eye(basis.shape[1])))
        if defect > ORTHONORMALITY_TOL:
            raise ValueError(f"basis columns are not orthonormal (defect {defect:.3e})")
        object.__setattr__(self, "basis", _readonly(basis))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def sub_dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class Standardization:
    """Per-column centering and scaling parameters.

    ``scale`` already has zero-variance columns replaced by 1, so applying the
    transform never divides by zero.
    """

    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _readonly(np.atleast_2d(self.mean)).ravel())
        object.__setattr__(self, "scale", _readonly(np.atleast_2d(self.scale)).ravel())
        if self.mean.shape != self.scale.shape:
            raise DimensionError("mean and scale must have the same length")


def standardize(
    data, stats: Standardization | None = None
) -> tuple[np.ndarray, Standardization]:
    """Center columns and divide by their standard deviation.

    Parameters
    ----------
    data : array-like, shape (N, D)
        Input samples, one row per sample.
    stats : Standardization, optional
        Previously computed parameters to reuse. When omitted, column means
        and population standard deviations are computed from ``data`` itself;
        zero-variance columns are centered but not scaled.

    Returns
    -------
    standardized : ndarray, shape (N, D)
    stats : Standardization
        The parameters that were applied, for reuse on related data.
    """
    arr = _as_float_matrix(data)
    if stats is None:
        mean = arr.mean(axis=0)
        std = arr.std(axis=0)
        scale = np.where(std == 0.0, 1.0, std)
        stats = Standardization(mean=mean, scale=scale)
    elif stats.mean.shape[0] != arr.shape[1]:
        raise DimensionError(
            f"stats are for {stats.mean.shape[0]} columns, data has {arr.shape[1]}"
        )
    return (arr - stats.mean) / stats.scale, stats


def pca(data, d: int) -> Subspace:
    """Extract the top ``d`` principal directions of column-centered data.

    Parameters
    ----------
    data : array-like, shape (N, D)
        Input samples, one row per sample. Centered internally; callers that
        want scale invariance should pass standardized data.
    d : int
        Number of principal directions, ``1 <= d <= min(N, D)``.

    Returns
    -------
    Subspace
        D x d orthonormal basis ordered by descending variance. Each column's
        sign is canonicalized so its largest-magnitude entry is positive,
        which makes results reproducible run to run. When eigenvalues tie,
        the decomposition order is kept; tied blocks are only unique up to
        rotation.

    Raises
    ------
    DimensionError
        If ``d`` is out of range.
    DegenerateDataError
        If the centered data matrix is exactly zero.
    """
    arr = _as_float_matrix(data)
    n, dim = arr.shape
    if not 1 <= d <= min(n, dim):
        raise DimensionError(f"d={d} out of range for {n} samples of dimension {dim}")
    centered = arr - arr.mean(axis=0)
    if not np.any(centered):
        raise DegenerateDataError("centered data matrix is exactly zero")
    # SVD of the centered data is numerically stabler than eigendecomposition
    # of the covariance when D >> N.
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    basis = vt[:d].T.copy()
    for j in range(d):
        pivot = np.argmax(np.abs(basis[:, j]))
        if basis[pivot, j] < 0:
            basis[:, j] = -basis[:, j]
    return Subspace(basis=basis)


def frobenius_norm(m) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(m, dtype=np.float64).ravel()))
