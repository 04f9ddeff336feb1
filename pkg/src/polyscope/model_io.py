"""Loading, saving and ranking of word2vec-format embedding models.

Both supported layouts begin with an ASCII header line ``"vocab_size dim"``:

* text: one ``token v1 ... v_dim`` line per vocabulary entry,
* binary: per entry, the token bytes terminated by a single space, then
  ``dim`` little-endian IEEE-754 float32 values, optionally followed by a
  newline. Newline bytes in front of a token are treated as terminators of
  the previous entry and never become part of the token.

Entry order is taken as frequency rank (most frequent first), which is how
word2vec emits its vocabulary. An explicit ``token<TAB>count`` file can
override that ranking, see :func:`rerank_by_counts`.

Loaders validate and reject; they never repair. Tokens are kept byte-exact
with no case folding or Unicode normalization.
"""
from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import IO, ContextManager, Iterator, Mapping, TextIO

import numpy as np

from .errors import ModelFormatError, UnknownTokenError

__all__ = [
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
]


def _check_token(token: str, where: str) -> None:
    if not token:
        raise ModelFormatError(f"{where}: empty token")
    if any(ch.isspace() for ch in token):
        raise ModelFormatError(f"{where}: token {token!r} contains whitespace")


@dataclass(frozen=True, eq=False)
class EmbeddingModel:
    """Immutable vocabulary plus dense vector matrix, ordered by frequency rank.

    ``tokens[i]`` has rank ``i`` (0 = most frequent) and vector ``vectors[i]``.
    Construction enforces the model invariants: unique whitespace-free tokens,
    finite components, no all-zero vector. Instances are safe for concurrent
    read access.
    """

    tokens: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors)
        if vectors.dtype not in (np.float32, np.float64):
            vectors = vectors.astype(np.float64)
        vectors = np.ascontiguousarray(vectors)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be 2-D, got shape {vectors.shape}")
        if len(self.tokens) != vectors.shape[0]:
            raise ValueError(f"{len(self.tokens)} tokens but {vectors.shape[0]} vectors")
        if vectors.shape[0] == 0 or vectors.shape[1] == 0:
            raise ValueError("model must contain at least one entry and one dimension")
        for token in self.tokens:
            if not token or any(ch.isspace() for ch in token):
                raise ValueError(f"invalid token {token!r}: empty or contains whitespace")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("tokens are not unique")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors contain non-finite components")
        if np.any(~vectors.any(axis=1)):
            raise ValueError("model contains an all-zero vector")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)

    @property
    def vocab_size(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @cached_property
    def _ranks(self) -> dict[str, int]:
        return {token: i for i, token in enumerate(self.tokens)}

    def __contains__(self, token: str) -> bool:
        return token in self._ranks

    def rank(self, token: str) -> int:
        """0-based frequency rank of ``token``; raises for unknown tokens."""
        try:
            return self._ranks[token]
        except KeyError:
            raise UnknownTokenError(f"token {token!r} is not in the vocabulary") from None

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.rank(token)]

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return zip(self.tokens, self.vectors)

    @cached_property
    def unit_vectors(self) -> np.ndarray:
        """Row-normalized copy of the matrix in float64, shared by searches."""
        vectors = self.vectors.astype(np.float64)
        norms = np.linalg.norm(vectors, axis=1)
        unit = vectors / norms[:, np.newaxis]
        unit.setflags(write=False)
        return unit

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingModel):
            return NotImplemented
        return self.tokens == other.tokens and np.array_equal(self.vectors, other.vectors)

    def __hash__(self) -> int:
        return hash(self.tokens)

    def __repr__(self) -> str:
        return f"EmbeddingModel(vocab_size={self.vocab_size}, dim={self.dim})"


def _parse_header(text: str, name: str, where: str) -> tuple[int, int]:
    parts = text.split()
    if len(parts) != 2:
        raise ModelFormatError(f"{name}: {where}: expected 'vocab_size dim', got {text!r}")
    try:
        vocab_size, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ModelFormatError(f"{name}: {where}: non-integer header field in {text!r}") from None
    if vocab_size < 1 or dim < 1:
        raise ModelFormatError(f"{name}: {where}: vocab_size and dim must be positive, got {text!r}")
    return vocab_size, dim


def _validate_row(row: np.ndarray, name: str, where: str) -> None:
    if not np.all(np.isfinite(row)):
        raise ModelFormatError(f"{name}: {where}: non-finite vector component")
    if not row.any():
        raise ModelFormatError(f"{name}: {where}: all-zero vector")


def _source_name(source: object) -> str:
    return str(getattr(source, "name", None) or "<stream>")


def _text_source(source: str | Path | TextIO) -> tuple[ContextManager[TextIO], str]:
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8"), str(source)
    return nullcontext(source), _source_name(source)


def load_text_model(source: str | Path | TextIO) -> EmbeddingModel:
    """Parse a word2vec text file (path or open text stream) into a model.

    Components are stored in float64 since text carries arbitrary decimal
    precision. Errors report the offending 1-based line number.
    """
    ctx, path = _text_source(source)
    try:
        return _parse_text_entries(ctx, path)
    except UnicodeDecodeError:
        raise ModelFormatError(f"{path}: not valid UTF-8 text") from None


def _parse_text_entries(ctx: ContextManager[TextIO], path: str) -> EmbeddingModel:
    with ctx as fh:
        vocab_size, dim = _parse_header(fh.readline(), path, "line 1")
        tokens: list[str] = []
        seen: set[str] = set()
        matrix = np.empty((vocab_size, dim), dtype=np.float64)
        count = 0
        blank_at: int | None = None
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                blank_at = lineno
                continue
            if blank_at is not None:
                raise ModelFormatError(f"{path}: line {blank_at}: blank line inside entries")
            if count >= vocab_size:
                raise ModelFormatError(
                    f"{path}: line {lineno}: more entries than the header's {vocab_size}"
                )
            where = f"line {lineno}"
            parts = line.split()
            if len(parts) != dim + 1:
                raise ModelFormatError(
                    f"{path}: {where}: expected token + {dim} components, got {len(parts)} fields"
                )
            token = parts[0]
            _check_token(token, f"{path}: {where}")
            if token in seen:
                raise ModelFormatError(f"{path}: {where}: duplicate token {token!r}")
            try:
                row = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise ModelFormatError(f"{path}: {where}: unparseable vector component") from None
            _validate_row(row, path, where)
            matrix[count] = row
            tokens.append(token)
            seen.add(token)
            count += 1
    if count != vocab_size:
        raise ModelFormatError(f"{path}: header promises {vocab_size} entries, found {count}")
    return EmbeddingModel(tuple(tokens), matrix)


def load_binary_model(source: str | Path | IO[bytes]) -> EmbeddingModel:
    """Parse a word2vec binary file (path or open byte stream) into a model.

    Per entry: token bytes up to a single space, then ``dim`` little-endian
    float32 values, optionally followed by a newline. Leading newline bytes
    before a token are consumed as the previous entry's terminator, so the
    parsed token never retains terminator bytes.
    """
    if isinstance(source, (str, Path)):
        path = str(source)
        data = Path(source).read_bytes()
    else:
        path = _source_name(source)
        data = source.read()
    nl = data.find(b"\n")
    if nl < 0:
        raise ModelFormatError(f"{path}: header: missing newline-terminated header line")
    vocab_size, dim = _parse_header(data[:nl].decode("ascii", errors="replace"), path, "header")
    row_bytes = 4 * dim
    tokens: list[str] = []
    seen: set[str] = set()
    matrix = np.empty((vocab_size, dim), dtype=np.float32)
    off = nl + 1
    for i in range(vocab_size):
        where = f"entry {i + 1}"
        while off < len(data) and data[off] == 0x0A:
            off += 1
        sep = data.find(b" ", off)
        if sep < 0:
            raise ModelFormatError(f"{path}: {where}: truncated before the token terminator")
        try:
            token = data[off:sep].decode("utf-8")
        except UnicodeDecodeError:
            raise ModelFormatError(f"{path}: {where}: token is not valid UTF-8") from None
        _check_token(token, f"{path}: {where}")
        if token in seen:
            raise ModelFormatError(f"{path}: {where}: duplicate token {token!r}")
        start = sep + 1
        if start + row_bytes > len(data):
            raise ModelFormatError(f"{path}: {where}: truncated vector (header promises dim={dim})")
        row = np.frombuffer(data, dtype="<f4", count=dim, offset=start)
        _validate_row(row, path, where)
        matrix[i] = row
        tokens.append(token)
        seen.add(token)
        off = start + row_bytes
    if data[off:].strip(b"\n"):
        raise ModelFormatError(f"{path}: trailing data after entry {vocab_size}")
    return EmbeddingModel(tuple(tokens), matrix)


def sniff_format(path: str | Path) -> str:
    """Guess ``"text"`` or ``"binary"`` from the header and the first entry.

    The first entry of a text file decodes as UTF-8 and splits into exactly
    ``dim`` parseable components after the token; anything else is binary.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline(1 << 16)
        sample = fh.read(1 << 20)
    vocab_size, dim = _parse_header(header.decode("ascii", errors="replace"), str(path), "header")
    del vocab_size
    line, _, rest = sample.partition(b"\n")
    if not rest and len(sample) == (1 << 20):
        return "binary"
    try:
        fields = line.decode("utf-8").split()
    except UnicodeDecodeError:
        return "binary"
    if len(fields) != dim + 1:
        return "binary"
    try:
        values = [float(f) for f in fields[1:]]
    except ValueError:
        return "binary"
    if not all(np.isfinite(values)):
        return "binary"
    return "text"


def load_model(path: str | Path, fmt: str = "auto") -> EmbeddingModel:
    """Load a model in the given format; ``"auto"`` sniffs the file first."""
    if fmt == "auto":
        fmt = sniff_format(path)
    if fmt == "text":
        return load_text_model(path)
    if fmt == "binary":
        return load_binary_model(path)
    raise ValueError(f"unknown model format {fmt!r} (expected text, binary or auto)")


def _format_component(value: np.floating | float) -> str:
    # shortest decimal that uniquely round-trips the stored precision
    return np.format_float_positional(value, unique=True, trim="0")


def save_text_model(model: EmbeddingModel, dest: str | Path | TextIO) -> None:
    """Write the model in word2vec text format (path or open text stream).

    Components are printed with the shortest decimal representation that
    round-trips their stored precision, so save-then-load is lossless.
    """
    ctx: ContextManager[TextIO]
    if isinstance(dest, (str, Path)):
        ctx = open(dest, "w", encoding="utf-8", newline="\n")
    else:
        ctx = nullcontext(dest)
    with ctx as fh:
        fh.write(f"{model.vocab_size} {model.dim}\n")
        for token, row in model.items():
            fh.write(token)
            for value in row:
                fh.write(" ")
                fh.write(_format_component(value))
            fh.write("\n")


def save_binary_model(model: EmbeddingModel, dest: str | Path | IO[bytes]) -> None:
    """Write the model in word2vec binary format (float32 container)."""
    rows = np.ascontiguousarray(model.vectors, dtype="<f4")
    ctx: ContextManager[IO[bytes]]
    ctx = open(dest, "wb") if isinstance(dest, (str, Path)) else nullcontext(dest)
    with ctx as fh:
        fh.write(f"{model.vocab_size} {model.dim}\n".encode("ascii"))
        for i, token in enumerate(model.tokens):
            fh.write(token.encode("utf-8"))
            fh.write(b" ")
            fh.write(rows[i].tobytes())
            fh.write(b"\n")


def stable_set(model: EmbeddingModel, limit: int) -> tuple[str, ...]:
    """The ``limit`` most frequent tokens, in rank order."""
    if not 1 <= limit <= model.vocab_size:
        raise ValueError(f"limit must be in [1, {model.vocab_size}], got {limit}")
    return model.tokens[:limit]


def read_count_file(path: str | Path) -> dict[str, int]:
    """Read a ``token<TAB>count`` file as produced by the corpus counter."""
    path = Path(path)
    counts: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ModelFormatError(
                    f"{path}: line {lineno}: expected 'token<TAB>count', got {line!r}"
                )
            token, raw = fields
            try:
                count = int(raw)
            except ValueError:
                raise ModelFormatError(f"{path}: line {lineno}: non-integer count {raw!r}") from None
            if count < 0:
                raise ModelFormatError(f"{path}: line {lineno}: negative count {count}")
            if token in counts:
                raise ModelFormatError(f"{path}: line {lineno}: duplicate token {token!r}")
            counts[token] = count
    return counts


def rerank_by_counts(model: EmbeddingModel, counts: Mapping[str, int]) -> EmbeddingModel:
    """Reorder entries by descending count, ties keeping the original order.

    Tokens absent from ``counts`` count as 0 and therefore sort last.
    """
    order = sorted(range(model.vocab_size), key=lambda i: (-counts.get(model.tokens[i], 0), i))
    tokens = tuple(model.tokens[i] for i in order)
    return EmbeddingModel(tokens, model.vectors[order])
