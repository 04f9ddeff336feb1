"""Command-line frontend.

Subcommands cover neighbor inspection (``neighbors``), SU computation
(``su``), the single-word outlier test (``test``), whole-stable-set analysis
(``batch``), corpus counting (``count``, ``pair``), agreement evaluation
(``eval``), and an HTTP service (``serve``).

Exit codes: 0 success, 1 error (bad flags, unreadable files, unknown
tokens), 2 when a single-word command completes but the word is untestable
or has too few stable neighbors. Identical inputs and flags produce
byte-identical TSV output; real numbers print with 4 decimal places (the
``pair`` ratio with 6), JSON carries full precision.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

from .corpus_stats import count_corpus, followed_by_ratio, write_bigram_tsv, write_unigram_tsv
from .errors import PolyscopeError
from .evaluation import chi_square_yates, confusion, read_labels
from .model_io import EmbeddingModel, load_model, read_count_file, rerank_by_counts
from .neighborhood import Insufficient, SearchConfig, stable_neighbors
from .polysemy import (
    PolysemyAnalyzer,
    PolysemyResult,
    UniformityRecord,
    VerdictKind,
)

__all__ = ["RunConfig", "build_parser", "main"]

_NA = "NA"


@dataclass(frozen=True)
class RunConfig:
    """Validated flag bundle for the model-driven subcommands."""

    model: Path
    fmt: str
    search: SearchConfig
    output: str
    counts: Path | None
    threads: int

    def __post_init__(self) -> None:
        if self.fmt not in ("auto", "text", "binary"):
            raise ValueError(f"format must be auto, text or binary, got {self.fmt!r}")
        if self.output not in ("tsv", "json"):
            raise ValueError(f"output must be tsv or json, got {self.output!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1 after auto-resolution")


def _run_config(args: argparse.Namespace) -> RunConfig:
    model = getattr(args, "model_pos", None) or args.model
    if model is None:
        raise ValueError("a model path is required (--model PATH)")
    if getattr(args, "model_pos", None) and args.model:
        raise ValueError("give the model either as a positional or via --model, not both")
    search = SearchConfig(
        n_neighbors=args.neighbors, limit=args.limit, scope=args.scope, sigma_k=args.sigma_k
    )
    threads = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    return RunConfig(
        model=Path(model),
        fmt=args.format,
        search=search,
        output=args.output,
        counts=Path(args.counts) if args.counts else None,
        threads=threads,
    )


def _load(cfg: RunConfig) -> EmbeddingModel:
    model = load_model(cfg.model, cfg.fmt)
    if cfg.counts is not None:
        model = rerank_by_counts(model, read_count_file(cfg.counts))
    return model


def _fmt4(value: float | None) -> str:
    return _NA if value is None else f"{value:.4f}"


def _open_out(path: str | None) -> IO[str]:
    return open(path, "w", encoding="utf-8", newline="\n") if path else sys.stdout


def _open_in(path: str) -> IO[str]:
    return sys.stdin if path == "-" else open(path, "r", encoding="utf-8")


def _emit(out: IO[str], text: str) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


# ---------------------------------------------------------------- neighbors


def _cmd_neighbors(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    model = _load(cfg)
    found = stable_neighbors(model, args.word, cfg.search, threads=cfg.threads)
    with _closing_out(args) as out:
        if isinstance(found, Insufficient):
            if cfg.output == "json":
                _emit(out, json.dumps({
                    "word": args.word,
                    "status": "insufficient",
                    "reason": found.reason.value,
                    "found": found.found,
                }))
            else:
                _emit(out, f"{found.reason.value}\tfound={found.found}")
            return 2
        if cfg.output == "json":
            _emit(out, json.dumps({
                "word": args.word,
                "status": "ok",
                "neighbors": [{"token": n.token, "cosine": n.cosine} for n in found.neighbors],
            }))
        else:
            for n in found.neighbors:
                _emit(out, f"{n.token}\t{_fmt4(n.cosine)}")
    return 0


# ----------------------------------------------------------------------- su


def _su_payload(record: UniformityRecord) -> dict:
    payload: dict = {"word": record.word}
    if record.neighbors is not None:
        payload["neighbors"] = [n.token for n in record.neighbors.neighbors]
    if record.defined:
        payload["su"] = record.su
    else:
        assert record.reason is not None
        payload["reason"] = record.reason.value
    return payload


def _cmd_su(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    model = _load(cfg)
    analyzer = PolysemyAnalyzer(model, cfg.search, threads=cfg.threads)
    record = analyzer.record(args.word)
    with _closing_out(args) as out:
        if cfg.output == "json":
            _emit(out, json.dumps(_su_payload(record)))
        elif record.defined:
            _emit(out, f"{record.word}\t{_fmt4(record.su)}")
        else:
            assert record.reason is not None
            _emit(out, f"{record.word}\tundefined: {record.reason.value}")
    return 0 if record.defined else 2


# --------------------------------------------------------------------- test


def _verdict_text(result: PolysemyResult) -> str:
    kind = result.verdict.kind
    if kind is VerdictKind.UNTESTABLE:
        assert result.verdict.reason is not None
        return f"untestable: {result.verdict.reason.value}"
    return kind.value


def _cmd_test(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    model = _load(cfg)
    analyzer = PolysemyAnalyzer(model, cfg.search, threads=cfg.threads)
    result = analyzer.test(args.word)
    stats = result.stats
    with _closing_out(args) as out:
        if cfg.output == "json":
            payload: dict = {"word": result.word, "verdict": result.verdict.kind.value}
            if result.verdict.reason is not None:
                payload["reason"] = result.verdict.reason.value
            if result.record.defined:
                payload["su"] = result.record.su
            if result.neighbor_records is not None:
                payload["neighbors"] = [_su_payload(r) for r in result.neighbor_records]
            if stats is not None:
                payload.update(mean=stats.mean, stddev=stats.stddev, threshold=stats.threshold)
            _emit(out, json.dumps(payload))
        else:
            _emit(out, "word\tsu\tmean\tstddev\tthreshold\tverdict")
            su = result.record.su
            row = [result.word, _fmt4(su)]
            if stats is not None:
                row += [_fmt4(stats.mean), _fmt4(stats.stddev), _fmt4(stats.threshold)]
            else:
                row += [_NA, _NA, _NA]
            row.append(_verdict_text(result))
            _emit(out, "\t".join(row))
    return 0 if result.verdict.kind is not VerdictKind.UNTESTABLE else 2


# -------------------------------------------------------------------- batch


def _batch_row(result: PolysemyResult, n_neighbors: int) -> list[str]:
    cells = [result.word]
    neighbors = result.record.neighbors.neighbors if result.record.neighbors else ()
    records = result.neighbor_records or ()
    for i in range(n_neighbors):
        if i < len(neighbors):
            cells.append(neighbors[i].token)
            su = records[i].su if i < len(records) else None
            cells.append(_fmt4(su))
        else:
            cells += [_NA, _NA]
    cells.append(_fmt4(result.record.su))
    kind = result.verdict.kind
    if kind is VerdictKind.POLYSEMIC:
        cells.append("poly")
    elif kind is VerdictKind.NOT_DETECTED:
        cells.append("mono")
    else:
        assert result.verdict.reason is not None
        cells.append(f"untestable: {result.verdict.reason.value}")
    return cells


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    model = _load(cfg)
    analyzer = PolysemyAnalyzer(model, cfg.search, threads=cfg.threads)
    report = analyzer.batch()
    n = cfg.search.n_neighbors
    with _closing_out(args) as out:
        if cfg.output == "json":
            rows = []
            for result in report.rows:
                row: dict = {"word": result.word, "verdict": result.verdict.kind.value}
                if result.verdict.reason is not None:
                    row["reason"] = result.verdict.reason.value
                row["su"] = result.record.su
                if result.record.neighbors is not None and result.neighbor_records is not None:
                    row["neighbors"] = [
                        {"token": nb.token, "su": rec.su}
                        for nb, rec in zip(result.record.neighbors.neighbors, result.neighbor_records)
                    ]
                else:
                    row["neighbors"] = None
                rows.append(row)
            payload = {
                "config": {
                    "limit": cfg.search.limit,
                    "n_neighbors": n,
                    "scope": cfg.search.scope,
                    "sigma_k": cfg.search.sigma_k,
                },
                "rows": rows,
                "summary": {
                    "poly": report.poly, "mono": report.mono, "untestable": report.untestable
                },
            }
            _emit(out, json.dumps(payload))
        else:
            header = ["word"]
            for i in range(1, n + 1):
                header += [f"neighbor{i}", f"su{i}"]
            header += ["su", "verdict"]
            _emit(out, "\t".join(header))
            for result in report.rows:
                _emit(out, "\t".join(_batch_row(result, n)))
            _emit(out, f"# poly={report.poly} mono={report.mono} untestable={report.untestable}")
    return 0


# -------------------------------------------------------------- count / pair


def _cmd_count(args: argparse.Namespace) -> int:
    if args.corpus == "-":
        table = count_corpus(sys.stdin, lowercase=args.lowercase)
    else:
        table = count_corpus(Path(args.corpus), lowercase=args.lowercase, jobs=args.jobs)
    with _closing_out(args) as out:
        write_unigram_tsv(table, out)
    if args.bigrams:
        with open(args.bigrams, "w", encoding="utf-8", newline="\n") as bout:
            write_bigram_tsv(table, bout)
    return 0


def _cmd_pair(args: argparse.Namespace) -> int:
    if args.corpus == "-":
        table = count_corpus(sys.stdin, lowercase=args.lowercase)
    else:
        table = count_corpus(Path(args.corpus), lowercase=args.lowercase, jobs=args.jobs)
    name_count, pair_count, ratio = followed_by_ratio(table, args.name, args.follower)
    with _closing_out(args) as out:
        if args.output == "json":
            _emit(out, json.dumps({
                "name": args.name,
                "follower": args.follower,
                "name_count": name_count,
                "pair_count": pair_count,
                "ratio": ratio,
            }))
        else:
            _emit(out, "name\tfollower\tname_count\tpair_count\tratio")
            _emit(out, f"{args.name}\t{args.follower}\t{name_count}\t{pair_count}\t{ratio:.6f}")
    return 0


# --------------------------------------------------------------------- eval


def _cmd_eval(args: argparse.Namespace) -> int:
    stream = _open_in(args.labels)
    try:
        triples = read_labels(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()
    matrix = confusion(triples)
    statistic, significant = chi_square_yates(matrix, args.alpha)
    (mm, mp), (pm, pp) = matrix.as_rows()
    with _closing_out(args) as out:
        if args.output == "json":
            _emit(out, json.dumps({
                "matrix": {"rows": "human", "cols": "computer",
                           "counts": [[mm, mp], [pm, pp]]},
                "statistic": statistic,
                "alpha": args.alpha,
                "significant": significant,
            }))
        else:
            _emit(out, "human\\computer\tmono\tpoly")
            _emit(out, f"mono\t{mm}\t{mp}")
            _emit(out, f"poly\t{pm}\t{pp}")
            _emit(out, f"statistic\t{statistic:.4f}")
            _emit(out, f"alpha\t{args.alpha}")
            _emit(out, f"significant\t{'true' if significant else 'false'}")
    return 0


# -------------------------------------------------------------------- serve


def _cmd_serve(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    import uvicorn

    from .service.app import create_app

    app = create_app(
        cfg.model,
        fmt=cfg.fmt,
        config=cfg.search,
        counts_path=cfg.counts,
        threads=cfg.threads,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ------------------------------------------------------------------ parsing


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; 2 is reserved for untestable words."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class _closing_out:
    """Context manager around --out that leaves stdout open."""

    def __init__(self, args: argparse.Namespace):
        self.path = getattr(args, "out", None)
        self.handle: IO[str] | None = None

    def __enter__(self) -> IO[str]:
        self.handle = _open_out(self.path)
        return self.handle

    def __exit__(self, *exc) -> None:
        if self.handle is not None and self.handle is not sys.stdout:
            self.handle.close()


def _add_model_flags(sub: argparse.ArgumentParser, *, positional_model: bool = False) -> None:
    if positional_model:
        sub.add_argument("model_pos", nargs="?", metavar="MODEL", default=None,
                         help="model file (alternative to --model)")
    sub.add_argument("--model", default=None, help="embedding model file")
    sub.add_argument("--format", default="auto", choices=("auto", "text", "binary"),
                     help="model file format (default: sniff the header)")
    sub.add_argument("--limit", type=int, default=1000,
                     help="stable-set size: this many top-ranked words (default 1000)")
    sub.add_argument("--neighbors", type=int, default=4,
                     help="stable neighbors per word (default 4)")
    sub.add_argument("--scope", type=int, default=40,
                     help="overall nearest words inspected per query (default 40)")
    sub.add_argument("--sigma-k", type=float, default=3.0, dest="sigma_k",
                     help="dispersion multiplier in the outlier threshold (default 3)")
    sub.add_argument("--output", default="tsv", choices=("tsv", "json"),
                     help="report format (default tsv)")
    sub.add_argument("--counts", default=None,
                     help="token<TAB>count file overriding the model's word order")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads; 0 = one per CPU (default 1)")
    sub.add_argument("--out", default=None, help="write the report here instead of stdout")


def _add_corpus_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("corpus", help="corpus file of whitespace-separated tokens, or - for stdin")
    sub.add_argument("--lowercase", action="store_true", help="case-fold before counting")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker processes for large files (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyscope",
                     description="Detect polysemous word usage in embedding models.")
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = subs.add_parser("neighbors", help="stable neighbors of a word")
    p.add_argument("word")
    _add_model_flags(p)
    p.set_defaults(handler=_cmd_neighbors)

    p = subs.add_parser("su", help="surrounding uniformity of a word")
    p.add_argument("word")
    _add_model_flags(p)
    p.set_defaults(handler=_cmd_su)

    p = subs.add_parser("test", help="outlier test for one word")
    p.add_argument("word")
    _add_model_flags(p)
    p.set_defaults(handler=_cmd_test)

    p = subs.add_parser("batch", help="test every stable word")
    _add_model_flags(p, positional_model=True)
    p.set_defaults(handler=_cmd_batch)

    p = subs.add_parser("count", help="unigram/bigram corpus counts")
    _add_corpus_flags(p)
    p.add_argument("--bigrams", default=None, metavar="PATH",
                   help="also write the bigram table here")
    p.add_argument("--out", default=None, help="write the unigram table here instead of stdout")
    p.set_defaults(handler=_cmd_count)

    p = subs.add_parser("pair", help="how often FOLLOWER immediately follows NAME")
    _add_corpus_flags(p)
    p.add_argument("name")
    p.add_argument("follower")
    p.add_argument("--output", default="tsv", choices=("tsv", "json"))
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(handler=_cmd_pair)

    p = subs.add_parser("eval", help="confusion matrix and chi-squared agreement test")
    p.add_argument("labels", help="TSV word<TAB>human<TAB>computer, or - for stdin")
    p.add_argument("--alpha", type=float, default=0.05, choices=(0.05, 0.01))
    p.add_argument("--output", default="tsv", choices=("tsv", "json"))
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.set_defaults(handler=_cmd_eval)

    p = subs.add_parser("serve", help="run the HTTP service around one loaded model")
    _add_model_flags(p, positional_model=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (PolyscopeError, ValueError, OSError) as exc:
        print(f"polyscope: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
