"""Exact nearest-neighbor search with stable-word filtering.

The search is a brute-force scan over the whole vocabulary: exactness
matters at the scale this tool targets (a stable set of ~1000 words) and
the statistics assume exact neighbors. The scan can fan out over worker
threads in contiguous vocabulary chunks; per-row results are independent,
so the merged result is identical to a serial scan.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model_io import EmbeddingModel

__all__ = [
    "SearchConfig",
    "Neighbor",
    "NeighborList",
    "Insufficient",
    "InsufficientReason",
    "all_neighbors",
    "stable_neighbors",
]

# below this vocabulary size a threaded scan costs more than it saves
PARALLEL_MIN_VOCAB = 8192


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of the neighborhood statistic.

    ``n_neighbors`` is the number of stable neighbors entering the
    uniformity, ``limit`` the size of the stable (most frequent) word set,
    ``scope`` how many overall nearest words are inspected when collecting
    stable neighbors, and ``sigma_k`` the dispersion multiple used by the
    outlier test.
    """

    n_neighbors: int = 4
    limit: int = 1000
    scope: int = 40
    sigma_k: float = 3.0

    def __post_init__(self) -> None:
        if self.n_neighbors < 2:
            raise ValueError(f"n_neighbors must be >= 2, got {self.n_neighbors}")
        if self.n_neighbors > self.scope:
            raise ValueError(
                f"n_neighbors ({self.n_neighbors}) must not exceed scope ({self.scope})"
            )
        if self.limit < self.n_neighbors + 1:
            raise ValueError(
                f"limit ({self.limit}) must be at least n_neighbors + 1 ({self.n_neighbors + 1})"
            )
        if self.sigma_k <= 0:
            raise ValueError(f"sigma_k must be positive, got {self.sigma_k}")


@dataclass(frozen=True)
class Neighbor:
    token: str
    cosine: float


@dataclass(frozen=True)
class NeighborList:
    """Top neighbors of ``query``, sorted by cosine descending.

    Ties break by ascending frequency rank, then token order; the query
    itself never appears.
    """

    query: str
    neighbors: tuple[Neighbor, ...]

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(n.token for n in self.neighbors)


class InsufficientReason(str, Enum):
    QUERY_NOT_STABLE = "query-not-stable"
    TOO_FEW_IN_SCOPE = "insufficient-neighbors"


@dataclass(frozen=True)
class Insufficient:
    """Search outcome when no valid neighbor list exists for ``query``."""

    query: str
    reason: InsufficientReason
    found: int = 0


def _similarities(model: EmbeddingModel, query_index: int, threads: int) -> np.ndarray:
    unit = model.unit_vectors
    q = unit[query_index]
    vocab = unit.shape[0]
    if threads <= 1 or vocab < PARALLEL_MIN_VOCAB:
        sims = unit @ q
    else:
        bounds = np.linspace(0, vocab, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda se: unit[se[0] : se[1]] @ q, zip(bounds[:-1], bounds[1:]))
            sims = np.concatenate(list(parts))
    np.clip(sims, -1.0, 1.0, out=sims)
    return sims


def all_neighbors(
    model: EmbeddingModel, query: str, k: int, *, threads: int = 1
) -> NeighborList:
    """Top-``k`` vocabulary tokens by cosine to ``query``, excluding the query.

    A ``k`` beyond ``vocab_size - 1`` returns all other words fully ordered.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query_index = model.rank(query)
    sims = _similarities(model, query_index, threads)
    # stable sort on descending cosine == tie-break by ascending rank;
    # ranks are unique so the token tie-break can never be reached
    order = np.argsort(-sims, kind="stable")
    out: list[Neighbor] = []
    for idx in order:
        if idx == query_index:
            continue
        out.append(Neighbor(model.tokens[idx], float(sims[idx])))
        if len(out) == k:
            break
    return NeighborList(query, tuple(out))


def stable_neighbors(
    model: EmbeddingModel, query: str, config: SearchConfig, *, threads: int = 1
) -> NeighborList | Insufficient:
    """Collect the top ``n_neighbors`` stable words within the search scope.

    Inspects the ``scope`` overall nearest words and keeps those inside the
    stable set. Returns :class:`Insufficient` when the query is not itself
    stable or when fewer than ``n_neighbors`` stable words fall in scope.
    """
    if not 1 <= config.limit <= model.vocab_size:
        raise ValueError(
            f"limit must be in [1, {model.vocab_size}] for this model, got {config.limit}"
        )
    rank = model.rank(query)
    if rank >= config.limit:
        return Insufficient(query, InsufficientReason.QUERY_NOT_STABLE)
    in_scope = all_neighbors(model, query, config.scope, threads=threads)
    stable = [n for n in in_scope.neighbors if model.rank(n.token) < config.limit]
    if len(stable) < config.n_neighbors:
        return Insufficient(query, InsufficientReason.TOO_FEW_IN_SCOPE, found=len(stable))
    return NeighborList(query, tuple(stable[: config.n_neighbors]))
