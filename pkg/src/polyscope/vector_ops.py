"""Pure vector arithmetic: cosine similarity and direction uniformity.

All accumulation happens in float64 regardless of the storage precision of
the inputs; the statistics downstream distinguish values ~1e-3 apart and
must not be drowned by float32 accumulation error.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DegenerateSumError

__all__ = ["cosine", "uniformity"]


def _as_matrix(vectors: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim == 1:
        if matrix.size == 0:
            raise ValueError("empty vector set")
        raise ValueError("expected a set of vectors, got a single 1-D vector")
    if matrix.ndim != 2:
        raise ValueError(f"vectors have inconsistent dimensions (shape {matrix.shape})")
    if matrix.shape[0] == 0:
        raise ValueError("empty vector set")
    return matrix


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between ``u`` and ``v``, clamped into [-1, 1].

    The clamp guards acos-style consumers against values like 1 + 1e-16
    produced by rounding.
    """
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("cosine expects 1-D vectors")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return min(1.0, max(-1.0, value))


def uniformity(vectors: Sequence[np.ndarray] | np.ndarray) -> float:
    """Norm of the vector sum divided by the scalar sum of the norms.

    Lies in (0, 1] for any set of nonzero vectors and equals 1.0 exactly
    when all directions coincide. A resultant of exactly zero has no
    meaningful direction statistic and raises :class:`DegenerateSumError`
    rather than returning 0.0.
    """
    matrix = _as_matrix(vectors)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("uniformity is undefined for a zero vector")
    resultant = float(np.linalg.norm(matrix.sum(axis=0)))
    if resultant == 0.0:
        raise DegenerateSumError("vector sum is exactly zero")
    return min(1.0, resultant / float(norms.sum()))
