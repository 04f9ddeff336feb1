"""Polysemy detection over word embedding models.

Loads word2vec-format models, finds each word's most similar
frequency-stable words by exact cosine search, computes the surrounding
uniformity (SU) of the word with those neighbors, and flags words whose SU
falls far below their neighborhood's mean as polysemously used. Corpus
counting and agreement-evaluation helpers support the surrounding analysis.

The HTTP layer lives in :mod:`polyscope.service` and is imported on demand
so the core library stays free of web-framework imports.
"""
from .corpus_stats import (
    FrequencyTable,
    count_corpus,
    count_tokens,
    followed_by_ratio,
    write_bigram_tsv,
    write_unigram_tsv,
)
from .errors import (
    DegenerateSumError,
    ModelFormatError,
    PolyscopeError,
    UnknownTokenError,
)
from .evaluation import ConfusionMatrix2x2, chi_square_yates, confusion, read_labels
from .model_io import (
    EmbeddingModel,
    load_binary_model,
    load_model,
    load_text_model,
    read_count_file,
    rerank_by_counts,
    save_binary_model,
    save_text_model,
    sniff_format,
    stable_set,
)
from .neighborhood import (
    Insufficient,
    InsufficientReason,
    Neighbor,
    NeighborList,
    SearchConfig,
    all_neighbors,
    stable_neighbors,
)
from .polysemy import (
    BatchReport,
    PolysemyAnalyzer,
    PolysemyResult,
    TestStatistics,
    UndefinedReason,
    UniformityRecord,
    UntestableReason,
    Verdict,
    VerdictKind,
    batch_analyze,
    outlier_stats,
    polysemy_test,
    surrounding_uniformity,
    verdict_for,
)
from .vector_ops import cosine, uniformity

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PolyscopeError",
    "ModelFormatError",
    "UnknownTokenError",
    "DegenerateSumError",
    "EmbeddingModel",
    "load_model",
    "load_text_model",
    "load_binary_model",
    "save_text_model",
    "save_binary_model",
    "sniff_format",
    "stable_set",
    "read_count_file",
    "rerank_by_counts",
    "cosine",
    "uniformity",
    "SearchConfig",
    "Neighbor",
    "NeighborList",
    "Insufficient",
    "InsufficientReason",
    "all_neighbors",
    "stable_neighbors",
    "UniformityRecord",
    "TestStatistics",
    "Verdict",
    "VerdictKind",
    "UndefinedReason",
    "UntestableReason",
    "PolysemyResult",
    "BatchReport",
    "PolysemyAnalyzer",
    "surrounding_uniformity",
    "outlier_stats",
    "verdict_for",
    "polysemy_test",
    "batch_analyze",
    "FrequencyTable",
    "count_tokens",
    "count_corpus",
    "followed_by_ratio",
    "write_unigram_tsv",
    "write_bigram_tsv",
    "ConfusionMatrix2x2",
    "confusion",
    "chi_square_yates",
    "read_labels",
]
