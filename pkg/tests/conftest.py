"""Shared fixtures: synthetic model builders and file helpers."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from polyscope import EmbeddingModel, save_binary_model, save_text_model

DATA_DIR = Path(__file__).parent / "data"


def build_model(tokens: list[str], rows: list[np.ndarray] | np.ndarray) -> EmbeddingModel:
    return EmbeddingModel(tuple(tokens), np.asarray(rows, dtype=np.float64))


def random_model(rng: np.random.Generator, vocab: int, dim: int) -> EmbeddingModel:
    """Random model with unique whitespace-free tokens and nonzero rows."""
    tokens = [f"w{i}" for i in range(vocab)]
    rows = rng.normal(size=(vocab, dim))
    # re-draw any row that landed too close to zero
    while True:
        norms = np.linalg.norm(rows, axis=1)
        bad = norms < 1e-9
        if not bad.any():
            break
        rows[bad] = rng.normal(size=(int(bad.sum()), dim))
    return EmbeddingModel(tuple(tokens), rows)


def two_cluster_model(noise: float = 0.01, seed: int = 7) -> EmbeddingModel:
    """Two tight direction clusters plus one word midway between them.

    Vocabulary: a0..a5 huddle around e0, b0..b5 around e1, and "mix" sits on
    the line between the cluster directions, the construction under which an
    interpolated vector's SU drops below its neighborhood's mean.
    """
    rng = np.random.default_rng(seed)
    a_dir = np.array([1.0, 0.0, 0.0, 0.0])
    b_dir = np.array([0.0, 1.0, 0.0, 0.0])
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    for i in range(6):
        tokens.append(f"a{i}")
        rows.append(a_dir + rng.normal(0.0, noise, 4))
    for i in range(6):
        tokens.append(f"b{i}")
        rows.append(b_dir + rng.normal(0.0, noise, 4))
    tokens.append("mix")
    rows.append(0.5 * a_dir + 0.5 * b_dir + rng.normal(0.0, noise, 4))
    return build_model(tokens, rows)


@pytest.fixture
def tiny_model() -> EmbeddingModel:
    # the minimal well-formed "2 3" model
    return build_model(["a", "b"], np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))


@pytest.fixture
def cluster_model() -> EmbeddingModel:
    return two_cluster_model()


@pytest.fixture
def cluster_model_text(cluster_model, tmp_path) -> Path:
    path = tmp_path / "cluster.txt"
    save_text_model(cluster_model, path)
    return path


@pytest.fixture
def cluster_model_bin(cluster_model, tmp_path) -> Path:
    path = tmp_path / "cluster.bin"
    save_binary_model(cluster_model, path)
    return path


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call":
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {name}: {outcome}")
    elif report.when == "setup" and report.skipped:
        print(f"\n[ACCEPTANCE] {name}: SKIP")
