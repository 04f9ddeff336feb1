"""Surrounding uniformity of a word's neighborhood and the outlier test.

A word's surrounding uniformity (SU) is the uniformity of its own vector
together with its stable neighbors' vectors. A word whose SU falls more
than ``sigma_k`` dispersion units below the mean SU of its neighbors is
flagged as used polysemously: its vector sits at an interpolated position
between sense clusters and drags the resultant down.

Dispersion is the Bessel-corrected sample standard deviation. Words whose
own or neighbors' SU is undefined, or whose neighbor SUs have exactly zero
dispersion, cannot be tested and are reported as such, never skipped.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from math import fsum, sqrt
from typing import Sequence

from .errors import DegenerateSumError
from .model_io import EmbeddingModel, stable_set
from .neighborhood import Insufficient, NeighborList, SearchConfig, stable_neighbors
from .vector_ops import uniformity

__all__ = [
    "UndefinedReason",
    "UniformityRecord",
    "TestStatistics",
    "VerdictKind",
    "UntestableReason",
    "Verdict",
    "PolysemyResult",
    "BatchReport",
    "PolysemyAnalyzer",
    "surrounding_uniformity",
    "outlier_stats",
    "verdict_for",
    "polysemy_test",
    "batch_analyze",
]


class UndefinedReason(str, Enum):
    """Why a word has no SU value."""

    QUERY_NOT_STABLE = "query-not-stable"
    INSUFFICIENT_NEIGHBORS = "insufficient-neighbors"
    DEGENERATE = "degenerate"


class VerdictKind(str, Enum):
    POLYSEMIC = "polysemic"
    NOT_DETECTED = "not-detected"
    UNTESTABLE = "untestable"


class UntestableReason(str, Enum):
    UNDEFINED_SU_SELF = "undefined-su-self"
    UNDEFINED_SU_NEIGHBOR = "undefined-su-neighbor"
    ZERO_VARIANCE = "zero-variance"


@dataclass(frozen=True)
class UniformityRecord:
    """A word's SU value, or the reason it is undefined.

    ``neighbors`` is present whenever the stable-neighbor search succeeded,
    including the degenerate case where the resultant vanished.
    """

    word: str
    neighbors: NeighborList | None
    su: float | None
    reason: UndefinedReason | None = None

    def __post_init__(self) -> None:
        if (self.su is None) == (self.reason is None):
            raise ValueError("exactly one of su and reason must be set")
        if self.su is not None:
            if self.neighbors is None:
                raise ValueError("a defined su requires the neighbor list it came from")
            if not 0.0 < self.su <= 1.0:
                raise ValueError(f"su must lie in (0, 1], got {self.su}")

    @property
    def defined(self) -> bool:
        return self.su is not None


@dataclass(frozen=True)
class TestStatistics:
    """Mean, dispersion and decision threshold over the neighbor SUs."""

    neighbor_sus: tuple[float, ...]
    mean: float
    stddev: float
    sigma_k: float
    threshold: float


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    reason: UntestableReason | None = None

    def __post_init__(self) -> None:
        if (self.kind is VerdictKind.UNTESTABLE) == (self.reason is None):
            raise ValueError("reason must be set exactly for untestable verdicts")


@dataclass(frozen=True)
class PolysemyResult:
    """Everything the test produced for one word.

    ``neighbor_records`` holds the per-neighbor SU records (aligned with
    ``record.neighbors``) and is None when the word's own SU is undefined.
    ``stats`` is present whenever all neighbor SUs were defined.
    """

    record: UniformityRecord
    neighbor_records: tuple[UniformityRecord, ...] | None
    stats: TestStatistics | None
    verdict: Verdict

    @property
    def word(self) -> str:
        return self.record.word


@dataclass(frozen=True)
class BatchReport:
    """Per-word results over the whole stable set, in frequency-rank order."""

    rows: tuple[PolysemyResult, ...]

    @property
    def poly(self) -> int:
        return sum(r.verdict.kind is VerdictKind.POLYSEMIC for r in self.rows)

    @property
    def mono(self) -> int:
        return sum(r.verdict.kind is VerdictKind.NOT_DETECTED for r in self.rows)

    @property
    def untestable(self) -> int:
        return sum(r.verdict.kind is VerdictKind.UNTESTABLE for r in self.rows)


def outlier_stats(neighbor_sus: Sequence[float], sigma_k: float = 3.0) -> TestStatistics:
    """Mean, sample standard deviation (n-1) and ``mean - sigma_k * stddev``."""
    values = tuple(float(v) for v in neighbor_sus)
    if len(values) < 2:
        raise ValueError(f"need at least 2 values, got {len(values)}")
    mean = fsum(values) / len(values)
    stddev = sqrt(fsum((v - mean) ** 2 for v in values) / (len(values) - 1))
    return TestStatistics(values, mean, stddev, sigma_k, mean - sigma_k * stddev)


def verdict_for(su: float, stats: TestStatistics) -> Verdict:
    """Decide the outlier test given a word's SU and its neighbor statistics.

    Zero dispersion (neighbors sharing identical SU) makes the threshold an
    extreme value, so the test cannot be performed. Otherwise the word is
    polysemic exactly when its SU lies strictly below the threshold.
    """
    if stats.stddev == 0.0:
        return Verdict(VerdictKind.UNTESTABLE, UntestableReason.ZERO_VARIANCE)
    if su < stats.threshold:
        return Verdict(VerdictKind.POLYSEMIC)
    return Verdict(VerdictKind.NOT_DETECTED)


class PolysemyAnalyzer:
    """Memoizing front-end for SU computation, tests, and batch analysis.

    SU records are cached per word for the lifetime of the analyzer, which
    is keyed to one (model, config) pair; batch runs revisit heavily
    overlapping neighborhoods and would otherwise recompute them. The cache
    is value-deterministic, so concurrent writers are harmless.
    """

    def __init__(self, model: EmbeddingModel, config: SearchConfig | None = None, *, threads: int = 1):
        self.model = model
        self.config = config if config is not None else SearchConfig()
        self.threads = max(1, threads)
        self._records: dict[str, UniformityRecord] = {}

    def record(self, word: str, *, _scan_threads: int | None = None) -> UniformityRecord:
        """SU record for ``word``, memoized."""
        try:
            return self._records[word]
        except KeyError:
            pass
        threads = self.threads if _scan_threads is None else _scan_threads
        found = stable_neighbors(self.model, word, self.config, threads=threads)
        if isinstance(found, Insufficient):
            record = UniformityRecord(word, None, None, UndefinedReason(found.reason.value))
        else:
            vectors = [self.model.vector(word)]
            vectors.extend(self.model.vector(n.token) for n in found.neighbors)
            try:
                record = UniformityRecord(word, found, uniformity(vectors))
            except DegenerateSumError:
                record = UniformityRecord(word, found, None, UndefinedReason.DEGENERATE)
        return self._records.setdefault(word, record)

    def test(self, word: str, *, _scan_threads: int | None = None) -> PolysemyResult:
        """Run the full outlier test for one word."""
        record = self.record(word, _scan_threads=_scan_threads)
        if not record.defined:
            return PolysemyResult(
                record, None, None,
                Verdict(VerdictKind.UNTESTABLE, UntestableReason.UNDEFINED_SU_SELF),
            )
        assert record.neighbors is not None
        neighbor_records = tuple(
            self.record(n.token, _scan_threads=_scan_threads) for n in record.neighbors.neighbors
        )
        if any(not r.defined for r in neighbor_records):
            return PolysemyResult(
                record, neighbor_records, None,
                Verdict(VerdictKind.UNTESTABLE, UntestableReason.UNDEFINED_SU_NEIGHBOR),
            )
        stats = outlier_stats([r.su for r in neighbor_records], self.config.sigma_k)
        return PolysemyResult(record, neighbor_records, stats, verdict_for(record.su, stats))

    def batch(self) -> BatchReport:
        """Test every stable word; rows come back in frequency-rank order."""
        words = stable_set(self.model, self.config.limit)
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                rows = tuple(pool.map(lambda w: self.test(w, _scan_threads=1), words))
        else:
            rows = tuple(self.test(w) for w in words)
        return BatchReport(rows)


def surrounding_uniformity(
    model: EmbeddingModel, word: str, config: SearchConfig | None = None, *, threads: int = 1
) -> UniformityRecord:
    """SU of ``word`` together with its stable neighbors (one-shot)."""
    return PolysemyAnalyzer(model, config, threads=threads).record(word)


def polysemy_test(
    model: EmbeddingModel, word: str, config: SearchConfig | None = None, *, threads: int = 1
) -> PolysemyResult:
    """Outlier test for ``word`` (one-shot; use the analyzer for many words)."""
    return PolysemyAnalyzer(model, config, threads=threads).test(word)


def batch_analyze(
    model: EmbeddingModel, config: SearchConfig | None = None, *, threads: int = 1
) -> BatchReport:
    """Test the whole stable set and report the POLY/MONO/untestable split."""
    return PolysemyAnalyzer(model, config, threads=threads).batch()
