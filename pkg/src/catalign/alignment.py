"""Closed-form alignment of a source subspace onto a target subspace.

The transform that minimizes ||Xs @ M - Xt||_F over all d x d matrices M has
the closed form M* = Xs' @ Xt because the bases are orthonormal. ``u_s``
(= Xs @ M*) is the source basis expressed in target-aligned coordinates and
is what source data gets projected through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError
from .linalg import Subspace, _readonly


@dataclass(frozen=True)
class AlignedModel:
    """Result of aligning a source subspace to a target subspace.

    ``a_kernel`` (the D x D cross-domain similarity matrix Xs @ M* @ Xt') is
    not stored; it can be large for deep features and is materialized on
    demand. ``similarity`` never forms it.
    """

    source_subspace: Subspace
    target_subspace: Subspace
    m_star: np.ndarray  # (d, d) alignment transform
    u_s: np.ndarray  # (D, d) target-aligned source basis

    def __post_init__(self):
        object.__setattr__(self, "m_star", _readonly(self.m_star))
        object.__setattr__(self, "u_s", _readonly(self.u_s))

    @property
    def ambient_dim(self) -> int:
        return self.source_subspace.ambient_dim

    @property
    def sub_dim(self) -> int:
        return self.source_subspace.sub_dim

    @property
    def a_kernel(self) -> np.ndarray:
        """The full D x D similarity matrix, built on demand."""
        return self.u_s @ self.target_subspace.basis.T


def align(xs: Subspace, xt: Subspace) -> AlignedModel:
    """Compute the optimal alignment of ``xs`` onto ``xt``.

    Both subspaces must share ambient and subspace dimensions. The returned
    transform is the global minimizer of the Frobenius alignment objective.
    """
    if xs.ambient_dim != xt.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {xs.ambient_dim} vs {xt.ambient_dim}"
        )
    if xs.sub_dim != xt.sub_dim:
        raise DimensionError(
            f"subspace dimensions differ: {xs.sub_dim} vs {xt.sub_dim}"
        )
    m_star = xs.basis.T @ xt.basis
    u_s = xs.basis @ m_star
    return AlignedModel(source_subspace=xs, target_subspace=xt, m_star=m_star, u_s=u_s)


def similarity(ys, yt, model: AlignedModel) -> float:
    """Cross-domain similarity ys' @ A @ yt between a source and a target vector.

    Computed as (ys' @ Xs) @ M* @ (Xt' @ yt), which costs O(D d + d^2) and
    avoids forming the D x D matrix A.
    """
    ys = np.asarray(ys, dtype=np.float64).ravel()
    yt = np.asarray(yt, dtype=np.float64).ravel()
    d_ambient = model.ambient_dim
    if ys.shape[0] != d_ambient or yt.shape[0] != d_ambient:
        raise DimensionError(
            f"vectors must have length {d_ambient}, got {ys.shape[0]} and {yt.shape[0]}"
        )
    left = ys @ model.source_subspace.basis
    right = model.target_subspace.basis.T @ yt
    return float(left @ model.m_star @ right)


def project_source(data, model: AlignedModel) -> np.ndarray:
    """Project source rows into the target-aligned subspace (data @ u_s)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != model.ambient_dim:
        raise DimensionError(
            f"expected shape (N, {model.ambient_dim}), got {arr.shape}"
        )
    return arr @ model.u_s


def project_target(data, xt: Subspace) -> np.ndarray:
    """Project target rows onto their own subspace coordinates (data @ Xt)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != xt.ambient_dim:
        raise DimensionError(f"expected shape (N, {xt.ambient_dim}), got {arr.shape}")
    return arr @ xt.basis
