"""Model loading, saving, format sniffing, and rank overrides."""
from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyscope import (
    EmbeddingModel,
    ModelFormatError,
    UnknownTokenError,
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

from conftest import build_model, random_model


class TestTextLoader:
    def test_minimal_file(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 3\na 1 0 0\nb 0 1 0\n")
        model = load_text_model(path)
        assert model.vocab_size == 2
        assert model.dim == 3
        assert model.rank("a") == 0
        assert model.rank("b") == 1
        np.testing.assert_array_equal(model.vector("a"), [1.0, 0.0, 0.0])

    def test_non_finite_value_reports_line(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("1 2\na 1 nan\n")
        with pytest.raises(ModelFormatError, match="line 2"):
            load_text_model(path)

    def test_zero_vector_rejected(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("1 2\na 0 0\n")
        with pytest.raises(ModelFormatError, match="line 2"):
            load_text_model(path)

    def test_duplicate_token_rejected(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 2\na 1 0\na 0 1\n")
        with pytest.raises(ModelFormatError, match="duplicate"):
            load_text_model(path)

    def test_wrong_component_count(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("1 3\na 1 0\n")
        with pytest.raises(ModelFormatError, match="line 2"):
            load_text_model(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("two 3\na 1 0 0\n")
        with pytest.raises(ModelFormatError, match="header"):
            load_text_model(path)

    def test_entry_count_mismatch(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("3 2\na 1 0\nb 0 1\n")
        with pytest.raises(ModelFormatError):
            load_text_model(path)


class TestBinaryLoader:
    def test_round_trip_of_minimal_model(self, tiny_model, tmp_path):
        path = tmp_path / "m.bin"
        save_binary_model(tiny_model, path)
        loaded = load_binary_model(path)
        assert loaded.tokens == tiny_model.tokens
        np.testing.assert_array_equal(
            loaded.vectors, tiny_model.vectors.astype(np.float32)
        )

    def test_truncated_file(self, tiny_model, tmp_path):
        path = tmp_path / "m.bin"
        save_binary_model(tiny_model, path)
        data = path.read_bytes()
        path.write_bytes(data[:-5])
        with pytest.raises(ModelFormatError, match="truncat"):
            load_binary_model(path)

    def test_header_promises_more_entries(self, tmp_path):
        path = tmp_path / "m.bin"
        vec = np.array([1.0, 0.0], dtype="<f4").tobytes()
        path.write_bytes(b"2 2\n" + b"a " + vec + b"\n")
        with pytest.raises(ModelFormatError):
            load_binary_model(path)

    def test_trailing_garbage_rejected(self, tiny_model, tmp_path):
        path = tmp_path / "m.bin"
        save_binary_model(tiny_model, path)
        path.write_bytes(path.read_bytes() + b"extra")
        with pytest.raises(ModelFormatError):
            load_binary_model(path)


class TestRoundTrip:
    """Write-then-read oracles: the file formats must preserve the model."""

    def test_text_round_trip_exact_for_float32(self):
        rng = np.random.default_rng(42)
        model = random_model(rng, 17, 5)
        as32 = EmbeddingModel(model.tokens, model.vectors.astype(np.float32))
        buf = io.StringIO()
        save_text_model(as32, buf)
        buf.seek(0)
        loaded = load_text_model(buf)
        assert loaded.tokens == as32.tokens
        np.testing.assert_array_equal(
            loaded.vectors.astype(np.float32), as32.vectors
        )

    def test_binary_then_text_agree(self, tmp_path):
        rng = np.random.default_rng(3)
        model = random_model(rng, 9, 4)
        bpath = tmp_path / "m.bin"
        tpath = tmp_path / "m.txt"
        save_binary_model(model, bpath)
        from_bin = load_binary_model(bpath)
        save_text_model(from_bin, tpath)
        from_text = load_text_model(tpath)
        assert from_text.tokens == from_bin.tokens
        np.testing.assert_array_equal(
            from_text.vectors.astype(np.float32),
            from_bin.vectors.astype(np.float32),
        )

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_binary_round_trip_arbitrary_tokens(self, data):
        """Tokens drawn over printable non-whitespace text survive untouched."""
        alphabet = st.characters(
            codec="utf-8",
            exclude_characters=" \t\n\r\x0b\x0c",
            exclude_categories=("Zs", "Zl", "Zp", "Cc", "Cs"),
        )
        n = data.draw(st.integers(min_value=1, max_value=6))
        tokens = data.draw(
            st.lists(
                st.text(alphabet=alphabet, min_size=1, max_size=8),
                min_size=n, max_size=n, unique=True,
            )
        )
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        rows = rng.normal(size=(n, 3)).astype(np.float32)
        rows[np.linalg.norm(rows, axis=1) < 1e-6] = 1.0
        model = EmbeddingModel(tuple(tokens), rows)
        buf = io.BytesIO()
        save_binary_model(model, buf)
        buf.seek(0)
        loaded = load_binary_model(buf)
        assert loaded.tokens == model.tokens
        np.testing.assert_array_equal(loaded.vectors, model.vectors)


class TestSniffing:
    def test_sniffs_text(self, tiny_model, tmp_path):
        path = tmp_path / "m.txt"
        save_text_model(tiny_model, path)
        assert sniff_format(path) == "text"
        assert load_model(path).tokens == tiny_model.tokens

    def test_sniffs_binary(self, tiny_model, tmp_path):
        path = tmp_path / "m.bin"
        save_binary_model(tiny_model, path)
        assert sniff_format(path) == "binary"
        assert load_model(path).tokens == tiny_model.tokens

    def test_explicit_format_wins(self, tiny_model, tmp_path):
        path = tmp_path / "m.dat"
        save_binary_model(tiny_model, path)
        with pytest.raises(ModelFormatError):
            load_model(path, "text")


class TestModelInvariants:
    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            build_model(["a"], np.array([[np.inf, 1.0]]))

    def test_rejects_zero_row(self):
        with pytest.raises(ValueError):
            build_model(["a", "b"], np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_rejects_duplicate_tokens(self):
        with pytest.raises(ValueError):
            build_model(["a", "a"], np.eye(2))

    def test_rejects_whitespace_token(self):
        with pytest.raises(ValueError):
            build_model(["a b"], np.array([[1.0, 0.0]]))

    def test_vectors_read_only(self, tiny_model):
        with pytest.raises(ValueError):
            tiny_model.vectors[0, 0] = 5.0

    def test_unknown_token(self, tiny_model):
        with pytest.raises(UnknownTokenError):
            tiny_model.rank("zzz")
        assert "a" in tiny_model
        assert "zzz" not in tiny_model


class TestStableSet:
    def test_full_vocabulary(self, tiny_model):
        assert stable_set(tiny_model, 2) == ("a", "b")

    def test_single(self, tiny_model):
        assert stable_set(tiny_model, 1) == ("a",)

    def test_bounds(self, tiny_model):
        with pytest.raises(ValueError):
            stable_set(tiny_model, 0)
        with pytest.raises(ValueError):
            stable_set(tiny_model, 3)

    @given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=30))
    @settings(max_examples=40, deadline=None)
    def test_prefix_property(self, k1, k2):
        rng = np.random.default_rng(11)
        model = random_model(rng, 30, 3)
        lo, hi = sorted((k1, k2))
        assert stable_set(model, hi)[:lo] == stable_set(model, lo)


class TestCountOverride:
    def test_parse_and_rerank(self, tmp_path):
        model = build_model(
            ["low", "mid", "high"],
            np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        )
        counts = tmp_path / "counts.tsv"
        counts.write_text("low\t5\nmid\t50\nhigh\t500\n")
        reranked = rerank_by_counts(model, read_count_file(counts))
        assert reranked.tokens == ("high", "mid", "low")
        np.testing.assert_array_equal(reranked.vector("high"), model.vector("high"))

    def test_missing_tokens_sink_to_bottom(self, tmp_path):
        model = build_model(["a", "b", "c"], np.eye(3))
        counts = tmp_path / "counts.tsv"
        counts.write_text("c\t9\n")
        reranked = rerank_by_counts(model, read_count_file(counts))
        # unlisted tokens count 0 and keep their relative order
        assert reranked.tokens == ("c", "a", "b")

    def test_malformed_count_file(self, tmp_path):
        counts = tmp_path / "counts.tsv"
        counts.write_text("a\tnot-a-number\n")
        with pytest.raises(ModelFormatError, match="line 1"):
            read_count_file(counts)

    def test_negative_count_rejected(self, tmp_path):
        counts = tmp_path / "counts.tsv"
        counts.write_text("a\t-3\n")
        with pytest.raises(ModelFormatError):
            read_count_file(counts)
