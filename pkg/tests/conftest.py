"""Shared synthetic constructions for the test suite."""

import numpy as np
import pytest

from catalign import Dataset, SyntheticSpec, generate_synthetic


def _orthonormal(rng, rows, cols):
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def random_orthonormal():
    """Factory for random orthonormal matrices with deterministic sign."""
    return _orthonormal


@pytest.fixture
def shifted_pair():
    """Factory for a clustered source plus a shifted target over a label subset.

    Defaults match the geometry used by the statistical checks: 10 source
    categories, 4 of them present in the target, 40 samples per category,
    20 features.
    """

    def make(seed, *, categories=10, true_labels=(0, 1, 2, 3), samples=40,
             target_samples=40, feature_dim=20, shift=2.0):
        spec = SyntheticSpec(
            num_categories=categories,
            samples_per_category=samples,
            feature_dim=feature_dim,
            seed=seed,
        )
        source, make_target = generate_synthetic(spec)
        target = make_target(list(true_labels), target_samples, shift=shift)
        return source, target

    return make


@pytest.fixture
def structured_pair():
    """Factory for anisotropic Gaussian categories with distinct axes.

    Each category gets its own three dominant directions, so even a single
    category's subspace carries an identifiable signature. The target draws
    fresh samples from the chosen true categories.
    """

    def make(seed, *, categories=5, true_labels=(0, 1), samples=40,
             target_samples=40, feature_dim=20):
        rng = np.random.default_rng(seed)
        centers = 10.0 * rng.standard_normal((categories, feature_dim))
        axes = [_orthonormal(rng, feature_dim, 3) for _ in range(categories)]
        scales = np.array([6.0, 4.0, 2.0])

        def draw(cat, n, gen):
            z = gen.standard_normal((n, 3)) * scales
            return centers[cat] + z @ axes[cat].T + 0.5 * gen.standard_normal(
                (n, feature_dim)
            )

        source = Dataset(
            features=np.vstack([draw(c, samples, rng) for c in range(categories)]),
            labels=np.repeat(np.arange(categories), samples),
        )
        gen_t = np.random.default_rng(seed + 10_000)
        target = Dataset(
            features=np.vstack([draw(c, target_samples, gen_t) for c in true_labels]),
            labels=np.repeat(np.asarray(true_labels, dtype=np.int64), target_samples),
        )
        return source, target

    return make
