"""Cosine and uniformity arithmetic against hand oracles and properties."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyscope import DegenerateSumError, cosine, uniformity


def _random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


class TestCosine:
    def test_identity(self):
        v = np.array([2.0, -1.0, 0.5])
        assert cosine(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_hand_value(self):
        # dot = 24, |u||v| = 25
        assert cosine(np.array([3.0, 4.0]), np.array([4.0, 3.0])) == pytest.approx(24 / 25, abs=1e-15)

    def test_opposite_clamps_to_minus_one(self):
        v = np.array([0.1, 0.2, 0.3])
        assert cosine(v, -v) == -1.0

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(2), np.array([1.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.array([1.0]), np.array([1.0, 0.0]))

    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0), st.floats(0.01, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_scale_invariant(self, seed, a, b):
        rng = np.random.default_rng(seed)
        u = rng.normal(size=5)
        v = rng.normal(size=5)
        if np.linalg.norm(u) < 1e-6 or np.linalg.norm(v) < 1e-6:
            return
        assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
        assert cosine(a * u, b * v) == pytest.approx(cosine(u, v), abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_range(self, seed):
        rng = np.random.default_rng(seed)
        u = rng.normal(size=3) * 10
        v = rng.normal(size=3) * 10
        if np.linalg.norm(u) < 1e-6 or np.linalg.norm(v) < 1e-6:
            return
        assert -1.0 <= cosine(u, v) <= 1.0


class TestUniformity:
    def test_identical_vectors(self):
        v = np.array([1.0, 2.0])
        assert uniformity([v, v, v]) == 1.0

    def test_hand_value_right_angle(self):
        # |(1,1)| / (1 + 1) = sqrt(2)/2
        value = uniformity([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert value == pytest.approx(np.sqrt(2) / 2, abs=1e-15)

    def test_exact_cancellation_is_degenerate(self):
        with pytest.raises(DegenerateSumError):
            uniformity([np.array([1.0, 0.0]), np.array([-1.0, 0.0])])

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            uniformity([])

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            uniformity([np.array([1.0, 0.0]), np.zeros(2)])

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            uniformity([np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0])])

    @given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(2, 16))
    @settings(max_examples=150, deadline=None)
    def test_triangle_inequality_bound(self, seed, size, dim):
        """0 < |sum| <= sum of norms, hence uniformity in (0, 1]."""
        rng = np.random.default_rng(seed)
        vectors = rng.normal(size=(size, dim))
        if (np.linalg.norm(vectors, axis=1) < 1e-9).any():
            return
        summed = np.linalg.norm(vectors.sum(axis=0))
        scalar = float(np.linalg.norm(vectors, axis=1).sum())
        assert summed <= scalar * (1 + 1e-12)
        try:
            value = uniformity(vectors)
        except DegenerateSumError:
            assert summed == 0.0
            return
        assert 0.0 < value <= 1.0
        assert value == pytest.approx(summed / scalar, rel=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=80, deadline=None)
    def test_rotation_and_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        vectors = rng.normal(size=(5, 6))
        if (np.linalg.norm(vectors, axis=1) < 1e-9).any():
            return
        base = uniformity(vectors)
        rotation = _random_rotation(rng, 6)
        assert uniformity(vectors @ rotation.T) == pytest.approx(base, abs=1e-9)
        perm = rng.permutation(5)
        assert uniformity(vectors[perm]) == pytest.approx(base, abs=1e-12)

    @given(st.integers(0, 2**32 - 1), st.integers(2, 7))
    @settings(max_examples=80, deadline=None)
    def test_one_iff_positive_scalings_of_one_direction(self, seed, size):
        rng = np.random.default_rng(seed)
        direction = rng.normal(size=4)
        if np.linalg.norm(direction) < 1e-6:
            return
        scales = rng.uniform(0.1, 10.0, size=size)
        aligned = np.outer(scales, direction)
        assert uniformity(aligned) == pytest.approx(1.0, abs=1e-12)
        # perturb one vector off the shared direction: uniformity must drop
        off = aligned.copy()
        ortho = np.zeros(4)
        ortho[np.argmin(np.abs(direction))] = 1.0
        ortho = ortho - (ortho @ direction) / (direction @ direction) * direction
        if np.linalg.norm(ortho) < 1e-9:
            return
        off[0] = off[0] + ortho / np.linalg.norm(ortho) * np.linalg.norm(off[0])
        assert uniformity(off) < 1.0 - 1e-12
