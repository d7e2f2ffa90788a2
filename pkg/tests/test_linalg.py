"""Core linear algebra: standardization, PCA subspaces, Frobenius norm."""

import numpy as np
import pytest

from catalign import Standardization, Subspace, frobenius_norm, pca, standardize
from catalign.exceptions import (
    DegenerateDataError,
    DimensionError,
    NonFiniteDataError,
)


class TestStandardize:
    def test_zero_mean_unit_variance(self):
        rng = np.random.default_rng(42)
        data = rng.normal(3.0, 2.5, size=(200, 7))
        out, stats = standardize(data)
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(stats.mean, data.mean(axis=0))
        np.testing.assert_allclose(stats.scale, data.std(axis=0))

    def test_population_std_not_sample(self):
        """The denominator is the population deviation (ddof=0)."""
        data = np.array([[1.0], [2.0], [3.0], [4.0]])
        _, stats = standardize(data)
        assert stats.scale[0] == pytest.approx(np.std([1, 2, 3, 4], ddof=0))
        assert stats.scale[0] != pytest.approx(np.std([1, 2, 3, 4], ddof=1))

    def test_constant_column_centered_not_scaled(self):
        data = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        out, stats = standardize(data)
        np.testing.assert_array_equal(out[:, 0], 0.0)
        assert stats.scale[0] == 1.0

    def test_reuse_stats_on_other_data(self):
        """Applying precomputed stats is exactly (x - mean) / scale."""
        rng = np.random.default_rng(1)
        train = rng.normal(size=(50, 4))
        other = rng.normal(size=(8, 4))
        _, stats = standardize(train)
        out, returned = standardize(other, stats)
        np.testing.assert_array_equal(out, (other - stats.mean) / stats.scale)
        assert returned is stats

    def test_stats_dimension_mismatch(self):
        _, stats = standardize(np.eye(3))
        with pytest.raises(DimensionError):
            standardize(np.ones((2, 5)), stats)

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteDataError):
            standardize(np.array([[1.0, np.nan], [2.0, 3.0]]))

    def test_rejects_1d(self):
        with pytest.raises(DimensionError):
            standardize(np.arange(5.0))


class TestPca:
    def test_columns_orthonormal(self):
        rng = np.random.default_rng(7)
        basis = pca(rng.normal(size=(60, 12)), 5).basis
        np.testing.assert_allclose(basis.T @ basis, np.eye(5), atol=1e-12)

    def test_matches_covariance_eigenvectors(self):
        """The d-dim projector agrees with the top-d eigenvectors of the
        sample covariance, an independent route to the same subspace."""
        rng = np.random.default_rng(11)
        data = rng.normal(size=(80, 10)) @ np.diag(np.linspace(3.0, 0.3, 10))
        d = 4
        basis = pca(data, d).basis
        centered = data - data.mean(axis=0)
        evals, evecs = np.linalg.eigh(centered.T @ centered)
        top = evecs[:, np.argsort(evals)[::-1][:d]]
        np.testing.assert_allclose(basis @ basis.T, top @ top.T, atol=1e-8)

    def test_reconstruction_beats_random_bases(self, random_orthonormal):
        """PCA minimizes reconstruction error over orthonormal bases."""
        rng = np.random.default_rng(3)
        data = rng.normal(size=(100, 15)) * np.linspace(4.0, 0.5, 15)
        centered = data - data.mean(axis=0)
        basis = pca(data, 3).basis
        best = frobenius_norm(centered - centered @ basis @ basis.T)
        for _ in range(50):
            other = random_orthonormal(rng, 15, 3)
            err = frobenius_norm(centered - centered @ other @ other.T)
            assert best <= err + 1e-10

    def test_captures_dominant_direction(self):
        rng = np.random.default_rng(5)
        direction = np.array([3.0, 4.0, 0.0]) / 5.0
        data = np.outer(rng.normal(size=300), direction)
        data += 0.01 * rng.normal(size=(300, 3))
        basis = pca(data, 1).basis.ravel()
        assert abs(basis @ direction) > 0.999

    def test_sign_canonical(self):
        """The largest-magnitude entry of every column is positive."""
        rng = np.random.default_rng(13)
        for seed in range(5):
            data = np.random.default_rng(seed).normal(size=(40, 8))
            basis = pca(data, 4).basis
            for col in basis.T:
                assert col[np.argmax(np.abs(col))] > 0

    def test_deterministic(self):
        rng = np.random.default_rng(21)
        data = rng.normal(size=(30, 6))
        assert pca(data, 3).basis.tobytes() == pca(data.copy(), 3).basis.tobytes()

    def test_d_out_of_range(self):
        data = np.random.default_rng(0).normal(size=(10, 4))
        with pytest.raises(DimensionError):
            pca(data, 0)
        with pytest.raises(DimensionError):
            pca(data, 5)

    def test_degenerate_data(self):
        with pytest.raises(DegenerateDataError):
            pca(np.ones((6, 3)), 2)


class TestSubspace:
    def test_requires_orthonormal_columns(self):
        with pytest.raises(ValueError):
            Subspace(np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]]))

    def test_properties_and_immutability(self):
        sub = Subspace(np.eye(4)[:, :2])
        assert sub.ambient_dim == 4
        assert sub.sub_dim == 2
        with pytest.raises(ValueError):
            sub.basis[0, 0] = 5.0

    def test_more_columns_than_rows_rejected(self):
        with pytest.raises(DimensionError):
            Subspace(np.eye(2, 3))


class TestFrobeniusNorm:
    def test_matches_numpy(self):
        rng = np.random.default_rng(17)
        m = rng.normal(size=(9, 5))
        assert frobenius_norm(m) == pytest.approx(np.linalg.norm(m, "fro"), abs=1e-12)

    def test_sqrt_sum_of_squares(self):
        m = np.array([[3.0, 0.0], [0.0, 4.0]])
        assert frobenius_norm(m) == pytest.approx(5.0)

    def test_absolute_homogeneity(self):
        rng = np.random.default_rng(19)
        m = rng.normal(size=(4, 6))
        assert frobenius_norm(-2.5 * m) == pytest.approx(2.5 * frobenius_norm(m))


class TestStandardizationType:
    def test_arrays_read_only(self):
        stats = Standardization(np.zeros(3), np.ones(3))
        with pytest.raises(ValueError):
            stats.mean[0] = 1.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            Standardization(np.zeros(3), np.ones(4))
