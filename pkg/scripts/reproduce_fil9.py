#!/usr/bin/env python3
"""Large-scale reproduction against the FIL9 corpus. Optional; not run in CI.

What it does, in order:

1. downloads the zipped corpus (about 300 MB; one long line of lowercase
   ASCII text) into the work directory unless it is already there;
2. verifies two exact token counts that the corpus-counting code must
   reproduce: "james" occurs 27678 times, and "james river" 202 times as an
   adjacent pair, while "richard river" never occurs;
3. trains a 200-dimensional word2vec model with common demo settings
   (CBOW, window 5, negative 5, downsample 1e-3, min count 5, 5 epochs) via
   gensim, unless --model points at an existing word2vec file;
4. runs the batch polysemy report over the 1000 most frequent words and
   prints, for each auxiliary-verb and month reference row, how close the
   trained model comes to the reference neighbor sets and SU values.

Training is stochastic: neighbor sets should match closely and SUs should
land within about 0.01 of the reference numbers, with "may" flagged, but
exact reproduction is not expected. The search-scope width also shifts the
poly/mono/untestable split; 40 is used by default here.

Usage:

    python3 scripts/reproduce_fil9.py --workdir fil9_work
    python3 scripts/reproduce_fil9.py --model my_model.bin --skip-counts

Requires gensim only for the training step: pip install gensim
"""
from __future__ import annotations

import argparse
import os
import sys
import urllib.request
import zipfile
from pathlib import Path

from polyscope import PolysemyAnalyzer, SearchConfig, VerdictKind, count_corpus, load_model

CORPUS_URL = "http://mattmahoney.net/dc/fil9.zip"

# Reference values measured in a widely shared 200-dimensional embedding of
# this corpus: the 4 nearest stable neighbors and the SU of each word.
REFERENCE = {
    "could": (["would", "will", "might", "must"], 0.9290),
    "will": (["would", "must", "could", "should"], 0.9266),
    "would": (["could", "will", "might", "should"], 0.9266),
    "must": (["cannot", "will", "should", "could"], 0.9253),
    "can": (["cannot", "must", "could", "will"], 0.9252),
    "should": (["must", "could", "might", "will"], 0.9232),
    "cannot": (["must", "can", "could", "might"], 0.9221),
    "might": (["would", "could", "should", "cannot"], 0.9179),
    "december": (["november", "october", "march", "september"], 0.9817),
    "january": (["february", "december", "november", "march"], 0.9816),
    "october": (["november", "december", "february", "september"], 0.9815),
    "june": (["july", "march", "december", "april"], 0.9814),
    "april": (["march", "december", "september", "july"], 0.9810),
    "november": (["december", "october", "september", "january"], 0.9810),
    "february": (["january", "december", "march", "october"], 0.9809),
    "march": (["december", "april", "june", "february"], 0.9806),
    "september": (["december", "august", "april", "november"], 0.9804),
    "july": (["june", "december", "august", "september"], 0.9804),
    "august": (["september", "july", "june", "april"], 0.9802),
    "may": (["can", "should", "might", "will"], 0.8917),
}
REFERENCE_COUNTS = {
    ("james", None): 27678,
    ("james", "river"): 202,
    ("richard", None): 16838,
    ("richard", "river"): 0,
}
REFERENCE_SPLIT = (33, 840, 127)  # poly / mono / untestable at limit 1000


def ensure_corpus(workdir: Path) -> Path:
    corpus = workdir / "fil9"
    if corpus.exists():
        return corpus
    workdir.mkdir(parents=True, exist_ok=True)
    archive = workdir / "fil9.zip"
    if not archive.exists():
        print(f"downloading {CORPUS_URL} (about 300 MB) ...")
        urllib.request.urlretrieve(CORPUS_URL, archive)
    print("extracting ...")
    with zipfile.ZipFile(archive) as zf:
        zf.extract("fil9", workdir)
    return corpus


def check_counts(corpus: Path, jobs: int) -> None:
    print(f"counting tokens ({jobs} jobs) ...")
    table = count_corpus(corpus, jobs=jobs)
    for (name, follower), expected in REFERENCE_COUNTS.items():
        if follower is None:
            got = table.unigram.get(name, 0)
            label = name
        else:
            got = table.bigram.get((name, follower), 0)
            label = f"{name} {follower}"
        mark = "MATCH" if got == expected else "DIFF"
        print(f"  count[{label}] = {got} (reference {expected}) {mark}")


def train_model(corpus: Path, workdir: Path, epochs: int, jobs: int) -> Path:
    try:
        from gensim.models import Word2Vec
    except ImportError:
        print("gensim is required for the training step: pip install gensim", file=sys.stderr)
        raise SystemExit(1)
    print(f"training 200-dim word2vec on {corpus} ({epochs} epochs; this takes a while) ...")
    model = Word2Vec(
        corpus_file=str(corpus),
        vector_size=200,
        window=5,
        sample=1e-3,
        negative=5,
        hs=0,
        sg=0,
        min_count=5,
        epochs=epochs,
        workers=jobs,
    )
    dest = workdir / "fil9_200.bin"
    model.wv.save_word2vec_format(str(dest), binary=True)
    print(f"saved {dest}")
    return dest


def evaluate(model_path: Path, limit: int, scope: int) -> None:
    print(f"loading {model_path} ...")
    model = load_model(model_path)
    config = SearchConfig(n_neighbors=4, limit=limit, scope=scope)
    analyzer = PolysemyAnalyzer(model, config, threads=os.cpu_count() or 1)
    report = analyzer.batch()
    print(
        f"batch split at limit={limit}, scope={scope}: "
        f"poly={report.poly} mono={report.mono} untestable={report.untestable} "
        f"(reference {REFERENCE_SPLIT[0]}/{REFERENCE_SPLIT[1]}/{REFERENCE_SPLIT[2]}; "
        f"scope width moves this)"
    )

    flagged = {r.word for r in report.rows if r.verdict.kind is VerdictKind.POLYSEMIC}
    exact_sets = 0
    su_deltas = []
    print(f"{'word':<10} {'su':>7} {'ref':>7} {'delta':>7}  overlap  neighbors")
    for word, (ref_neighbors, ref_su) in REFERENCE.items():
        result = analyzer.test(word)
        if result.record.su is None:
            print(f"{word:<10} {'n/a':>7} {ref_su:>7.4f}      n/a  untestable: {result.verdict.reason.value}")
            continue
        got = [n.token for n in result.record.neighbors.neighbors]
        overlap = len(set(got) & set(ref_neighbors))
        exact_sets += got == ref_neighbors
        delta = result.record.su - ref_su
        su_deltas.append(abs(delta))
        print(
            f"{word:<10} {result.record.su:>7.4f} {ref_su:>7.4f} {delta:>+7.4f}     {overlap}/4  {' '.join(got)}"
        )
    if su_deltas:
        print(f"identical neighbor lists: {exact_sets}/{len(REFERENCE)}")
        print(f"mean |SU delta|: {sum(su_deltas) / len(su_deltas):.4f} (expect about 0.01)")
    verdict = "flagged polysemic" if "may" in flagged else "NOT flagged (unexpected)"
    print(f'"may": {verdict}')


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", type=Path, default=Path("fil9_work"))
    parser.add_argument("--model", type=Path, help="evaluate this word2vec file instead of training")
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--limit", type=int, default=1000)
    parser.add_argument("--scope", type=int, default=40)
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--skip-counts", action="store_true", help="skip the corpus token counts")
    args = parser.parse_args(argv)

    if args.model is None or not args.skip_counts:
        corpus = ensure_corpus(args.workdir)
        if not args.skip_counts:
            check_counts(corpus, args.jobs)
        model_path = args.model or train_model(corpus, args.workdir, args.epochs, args.jobs)
    else:
        model_path = args.model
    evaluate(model_path, args.limit, args.scope)
    return 0


if __name__ == "__main__":
    sys.exit(main())
