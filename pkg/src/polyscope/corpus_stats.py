"""Unigram and adjacent-bigram frequency counting over whitespace-tokenized text.

Feeds two consumers: frequency-rank count files (the unigram TSV dump is
valid ``read_count_file`` input) and name/follower co-occurrence ratios for
error analysis of proper-noun verdicts.

Files are tokenized at the byte level on ASCII whitespace, which is safe for
UTF-8 (continuation bytes are never ASCII) and lets large corpora be counted
in parallel over byte ranges without decoding up front. A token belongs to
the chunk that contains its first byte; chunk results merge exactly, adding
the one bigram that straddles each boundary, so parallel counts are
identical to a serial pass.
"""
from __future__ import annotations

import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, TextIO

__all__ = [
    "FrequencyTable",
    "count_tokens",
    "count_corpus",
    "followed_by_ratio",
    "write_unigram_tsv",
    "write_bigram_tsv",
]

# bytes.split() whitespace; multi-byte UTF-8 never contains these
_ASCII_WS = b" \t\n\r\x0b\x0c"
_WS_RE = re.compile(b"[%s]" % _ASCII_WS)

# files smaller than this are counted serially regardless of jobs
PARALLEL_MIN_BYTES = 1 << 20

_BLOCK = 1 << 16


@dataclass(frozen=True)
class FrequencyTable:
    """Unigram and adjacent-bigram counts for one token stream.

    ``bigram`` holds ordered adjacent pairs only: ("a", "b") counts the
    occurrences of "b" immediately following "a".
    """

    unigram: Counter[str]
    bigram: Counter[tuple[str, str]]
    total_tokens: int

    def __post_init__(self) -> None:
        if self.total_tokens != sum(self.unigram.values()):
            raise ValueError("total_tokens must equal the sum of unigram counts")
        for (a, b), n in self.bigram.items():
            if n > min(self.unigram[a], self.unigram[b]):
                raise ValueError(f"bigram {(a, b)!r} exceeds its unigram counts")


def count_tokens(tokens: Iterable[str], *, lowercase: bool = False) -> FrequencyTable:
    """Count an already-tokenized stream in one pass."""
    unigram: Counter[str] = Counter()
    bigram: Counter[tuple[str, str]] = Counter()
    total = 0
    prev: str | None = None
    for token in tokens:
        if lowercase:
            token = token.lower()
        unigram[token] += 1
        total += 1
        if prev is not None:
            bigram[prev, token] += 1
        prev = token
    return FrequencyTable(unigram, bigram, total)


def _iter_text_tokens(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        yield from line.split()


def _iter_file_tokens(fh: IO[bytes], *, lowercase: bool) -> Iterator[str]:
    """Stream tokens from a binary file without loading it whole."""
    tail = b""
    while True:
        block = fh.read(_BLOCK)
        if not block:
            break
        parts = (tail + block).split()
        # a block ending mid-token leaves a prefix to carry into the next one
        tail = parts.pop() if parts and block[-1] not in _ASCII_WS else b""
        for raw in parts:
            token = raw.decode("utf-8")
            yield token.lower() if lowercase else token
    if tail:
        token = tail.decode("utf-8")
        yield token.lower() if lowercase else token


def _count_byte_range(
    path: str, start: int, end: int, size: int, lowercase: bool
) -> tuple[Counter[str], Counter[tuple[str, str]], int, str | None, str | None]:
    """Count the tokens whose first byte lies in [start, end).

    Returns (unigram, bigram, total, first_token, last_token); the boundary
    tokens let the parent splice the bigram that straddles each chunk edge.
    """
    with open(path, "rb") as fh:
        if start > 0:
            fh.seek(start - 1)
            entered_mid_token = fh.read(1)[0] not in _ASCII_WS
        else:
            entered_mid_token = False
        data = fh.read(end - start)
        if entered_mid_token:
            # leading bytes continue a token owned by the previous chunk
            m = _WS_RE.search(data)
            data = b"" if m is None else data[m.start():]
        if data and data[-1] not in _ASCII_WS and end < size:
            # chunk ends mid-token: the token starts here, so finish it
            while True:
                block = fh.read(_BLOCK)
                if not block:
                    break
                m = _WS_RE.search(block)
                if m is not None:
                    data += block[: m.start()]
                    break
                data += block
    tokens = [raw.decode("utf-8") for raw in data.split()]
    if lowercase:
        tokens = [t.lower() for t in tokens]
    unigram = Counter(tokens)
    bigram = Counter(zip(tokens, tokens[1:]))
    first = tokens[0] if tokens else None
    last = tokens[-1] if tokens else None
    return unigram, bigram, len(tokens), first, last


def _count_path_serial(path: Path, *, lowercase: bool) -> FrequencyTable:
    with open(path, "rb") as fh:
        return count_tokens(_iter_file_tokens(fh, lowercase=lowercase))


def _count_path_parallel(path: Path, *, lowercase: bool, jobs: int) -> FrequencyTable:
    size = os.path.getsize(path)
    bounds = [size * i // jobs for i in range(jobs + 1)]
    unigram: Counter[str] = Counter()
    bigram: Counter[tuple[str, str]] = Counter()
    total = 0
    carry_last: str | None = None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(
            _count_byte_range,
            [str(path)] * jobs,
            bounds[:-1],
            bounds[1:],
            [size] * jobs,
            [lowercase] * jobs,
        )
        for uni, bi, n, first, last in parts:
            unigram += uni
            bigram += bi
            total += n
            if first is not None:
                if carry_last is not None:
                    bigram[carry_last, first] += 1
                carry_last = last
    return FrequencyTable(unigram, bigram, total)


def count_corpus(
    source: str | Path | TextIO | Iterable[str],
    *,
    lowercase: bool = False,
    jobs: int = 1,
) -> FrequencyTable:
    """Count a corpus given as a file path, an open text stream, or lines.

    Bigram adjacency spans line boundaries: the stream is one token
    sequence, whatever shape it arrives in. ``jobs`` > 1 splits a file
    into byte ranges counted in separate processes (identical results);
    it is ignored for non-file sources and for files below
    ``PARALLEL_MIN_BYTES``.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if jobs > 1 and os.path.getsize(path) >= PARALLEL_MIN_BYTES:
            return _count_path_parallel(path, lowercase=lowercase, jobs=jobs)
        return _count_path_serial(path, lowercase=lowercase)
    return count_tokens(_iter_text_tokens(source), lowercase=lowercase)


def followed_by_ratio(
    table: FrequencyTable, name: str, follower: str
) -> tuple[int, int, float]:
    """How often ``follower`` immediately follows ``name``.

    Returns (name_count, pair_count, pair_count / name_count), with a 0.0
    ratio when the name never occurs.
    """
    name_count = table.unigram.get(name, 0)
    pair_count = table.bigram.get((name, follower), 0)
    ratio = pair_count / name_count if name_count else 0.0
    return name_count, pair_count, ratio


def _sorted_items(counter: Counter) -> list:
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))


def write_unigram_tsv(table: FrequencyTable, dest: TextIO) -> None:
    """Dump "token<TAB>count" rows, most frequent first; valid count-file input."""
    for token, n in _sorted_items(table.unigram):
        dest.write(f"{token}\t{n}\n")


def write_bigram_tsv(table: FrequencyTable, dest: TextIO) -> None:
    """Dump "first second<TAB>count" rows, most frequent first."""
    for (a, b), n in _sorted_items(table.bigram):
        dest.write(f"{a} {b}\t{n}\n")
