"""Closed-form subspace alignment and the cross-domain similarity form."""

import numpy as np
import pytest

from catalign import Subspace, align, frobenius_norm, project_source, project_target, similarity
from catalign.exceptions import DimensionError


def objective(xs, m, xt):
    return frobenius_norm(xs.basis @ m - xt.basis)


class TestAlign:
    def test_transform_is_global_minimizer(self, random_orthonormal):
        """No random competitor transform beats the closed form."""
        rng = np.random.default_rng(42)
        for _ in range(20):
            xs = Subspace(random_orthonormal(rng, 10, 3))
            xt = Subspace(random_orthonormal(rng, 10, 3))
            model = align(xs, xt)
            best = objective(xs, model.m_star, xt)
            for _ in range(20):
                competitor = rng.normal(size=(3, 3))
                assert best <= objective(xs, competitor, xt) + 1e-10

    def test_matches_least_squares_solution(self, random_orthonormal):
        """Solving min ||Xs M - Xt|| column-by-column with a generic
        least-squares solver recovers the same transform."""
        rng = np.random.default_rng(7)
        xs = Subspace(random_orthonormal(rng, 12, 4))
        xt = Subspace(random_orthonormal(rng, 12, 4))
        model = align(xs, xt)
        lstsq_m, *_ = np.linalg.lstsq(xs.basis, xt.basis, rcond=None)
        np.testing.assert_allclose(model.m_star, lstsq_m, atol=1e-12)

    def test_identical_subspaces_give_identity(self, random_orthonormal):
        rng = np.random.default_rng(3)
        xs = Subspace(random_orthonormal(rng, 8, 3))
        model = align(xs, xs)
        np.testing.assert_allclose(model.m_star, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(model.u_s, xs.basis, atol=1e-12)

    def test_rotation_of_ambient_space_preserves_transform(self, random_orthonormal):
        """M* depends only on the relative geometry of the two subspaces."""
        rng = np.random.default_rng(11)
        xs = Subspace(random_orthonormal(rng, 9, 3))
        xt = Subspace(random_orthonormal(rng, 9, 3))
        q = random_orthonormal(rng, 9, 9)
        rotated = align(Subspace(q @ xs.basis), Subspace(q @ xt.basis))
        np.testing.assert_allclose(rotated.m_star, align(xs, xt).m_star, atol=1e-12)

    def test_dimension_mismatches(self, random_orthonormal):
        rng = np.random.default_rng(1)
        with pytest.raises(DimensionError):
            align(
                Subspace(random_orthonormal(rng, 8, 3)),
                Subspace(random_orthonormal(rng, 9, 3)),
            )
        with pytest.raises(DimensionError):
            align(
                Subspace(random_orthonormal(rng, 8, 3)),
                Subspace(random_orthonormal(rng, 8, 2)),
            )

    def test_model_arrays_immutable(self, random_orthonormal):
        rng = np.random.default_rng(2)
        model = align(
            Subspace(random_orthonormal(rng, 6, 2)),
            Subspace(random_orthonormal(rng, 6, 2)),
        )
        with pytest.raises(ValueError):
            model.m_star[0, 0] = 9.9


class TestSimilarity:
    def test_equals_explicit_matrix_form(self, random_orthonormal):
        """The factored evaluation matches ys' @ (Xs M Xt') @ yt computed
        naively through the full D x D matrix."""
        rng = np.random.default_rng(5)
        xs = Subspace(random_orthonormal(rng, 14, 4))
        xt = Subspace(random_orthonormal(rng, 14, 4))
        model = align(xs, xt)
        a = xs.basis @ model.m_star @ xt.basis.T
        for _ in range(25):
            ys = rng.normal(size=14)
            yt = rng.normal(size=14)
            assert similarity(ys, yt, model) == pytest.approx(ys @ a @ yt, abs=1e-10)

    def test_a_kernel_matches_naive_product(self, random_orthonormal):
        rng = np.random.default_rng(6)
        xs = Subspace(random_orthonormal(rng, 10, 3))
        xt = Subspace(random_orthonormal(rng, 10, 3))
        model = align(xs, xt)
        np.testing.assert_allclose(
            model.a_kernel, xs.basis @ model.m_star @ xt.basis.T, atol=1e-12
        )

    def test_bilinear(self, random_orthonormal):
        rng = np.random.default_rng(8)
        xs = Subspace(random_orthonormal(rng, 7, 2))
        xt = Subspace(random_orthonormal(rng, 7, 2))
        model = align(xs, xt)
        y1, y2, yt = (rng.normal(size=7) for _ in range(3))
        combined = similarity(2.0 * y1 + y2, yt, model)
        parts = 2.0 * similarity(y1, yt, model) + similarity(y2, yt, model)
        assert combined == pytest.approx(parts, abs=1e-10)

    def test_length_check(self, random_orthonormal):
        rng = np.random.default_rng(9)
        model = align(
            Subspace(random_orthonormal(rng, 5, 2)),
            Subspace(random_orthonormal(rng, 5, 2)),
        )
        with pytest.raises(DimensionError):
            similarity(np.ones(4), np.ones(5), model)


class TestProjections:
    def test_source_rows_through_u_s(self, random_orthonormal):
        rng = np.random.default_rng(10)
        xs = Subspace(random_orthonormal(rng, 6, 2))
        xt = Subspace(random_orthonormal(rng, 6, 2))
        model = align(xs, xt)
        data = rng.normal(size=(9, 6))
        np.testing.assert_array_equal(project_source(data, model), data @ model.u_s)

    def test_target_rows_through_basis(self, random_orthonormal):
        rng = np.random.default_rng(12)
        xt = Subspace(random_orthonormal(rng, 6, 2))
        data = rng.normal(size=(4, 6))
        np.testing.assert_array_equal(project_target(data, xt), data @ xt.basis)

    def test_shape_validation(self, random_orthonormal):
        rng = np.random.default_rng(13)
        xs = Subspace(random_orthonormal(rng, 6, 2))
        model = align(xs, xs)
        with pytest.raises(DimensionError):
            project_source(np.ones((3, 5)), model)
        with pytest.raises(DimensionError):
            project_target(np.ones(6), xs)
