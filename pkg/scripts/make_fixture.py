#!/usr/bin/env python3
"""Regenerate the pinned fixture model and its golden CLI outputs.

The fixture is a small synthetic word2vec-format model engineered so every
interesting code path shows up in one 71-token vocabulary:

* eight auxiliary-verb lookalikes form a loose direction cluster, and "may"
  sits far enough off the cluster axis that its surrounding uniformity falls
  below the mean-minus-3-sigma threshold of its own neighborhood: the batch
  report flags exactly that word;
* eleven month lookalikes form a tighter cluster; "december" is tilted a
  fixed angle off the cluster axis, with nearest months november, october,
  march, september;
* the vector lengths of "may" and "december" are tuned by bisection until
  their SUs render as 0.8917 and 0.9817 at four decimals;
* "twin1".."twin4" share one bit-identical vector, so the four neighbor SUs
  of "twin0" coincide exactly and its test reports zero variance;
* "ruby" is stable but all of its near neighbors ("gem00".."gem10") live in
  the unstable tail past the rank cutoff, so its neighborhood search comes
  back insufficient;
* number, name and filler tokens pad the vocabulary so ranks, scope windows
  and the stable-set cutoff all bite.

Run from the repository root after installing the package:

    python3 scripts/make_fixture.py

Outputs land in tests/data/ and are committed. The regression tests compare
CLI output against the goldens byte for byte; regenerating requires the same
numpy random stream, so the committed files are the reference, not whatever
a rerun on a different numpy happens to produce.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from polyscope import (
    EmbeddingModel,
    Insufficient,
    InsufficientReason,
    PolysemyAnalyzer,
    SearchConfig,
    UntestableReason,
    VerdictKind,
    load_binary_model,
    save_binary_model,
    stable_neighbors,
    uniformity,
)
from polyscope.cli import main as cli_main

DEFAULT_SEED = 212
DIM = 16
LIMIT = 60
SCOPE = 8
GOLDEN_FLAGS = ["--limit", str(LIMIT), "--scope", str(SCOPE)]

AUX = ["would", "will", "could", "can", "should", "must", "might", "cannot"]
AUX_TOP4 = ["can", "should", "might", "will"]
MONTHS = [
    "january", "february", "march", "april", "june", "july", "august",
    "september", "october", "november", "december",
]
MONTH_TOP4 = ["november", "october", "march", "september"]
NUMBERS = ["one", "two", "three", "four", "five", "six"]
NAMES = ["james", "john", "robert", "michael", "william", "david", "richard", "charles"]
TWINS = ["twin0", "twin1", "twin2", "twin3", "twin4"]
FILLERS = [f"filler{i:02d}" for i in range(20)]
GEMS = [f"gem{i:02d}" for i in range(11)]

SU_MAY = 0.8917
SU_DECEMBER = 0.9817


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def cluster(center: np.ndarray, n: int, spread: float, rng: np.random.Generator) -> list[np.ndarray]:
    """n unit directions scattered around ``center`` with the given noise scale."""
    return [unit(center + spread * rng.standard_normal(DIM)) for _ in range(n)]


def orthogonal_part(v: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return unit(v - np.dot(v, axis) * axis)


def assign_by_affinity(
    target: np.ndarray, directions: list[np.ndarray], nearest: list[str], rest: list[str]
) -> dict[str, np.ndarray]:
    """Name the directions so ``nearest`` are the top cosines to ``target`` in order."""
    order = sorted(range(len(directions)), key=lambda i: -float(np.dot(target, directions[i])))
    names = nearest + rest
    assigned = {names[pos]: directions[i] for pos, i in enumerate(order)}
    gaps = [float(np.dot(target, directions[order[k]]) - np.dot(target, directions[order[k + 1]]))
            for k in range(len(nearest))]
    if min(gaps) < 0.002:
        raise RuntimeError(f"affinity ranking too close to a tie: gaps {gaps}")
    return assigned


def pin_su(
    word_dir: np.ndarray, neighbor_rows: list[np.ndarray], target: float
) -> np.ndarray:
    """Scale ``word_dir`` so the SU over its fixed neighbors hits ``target`` at 4dp.

    SU as a function of the word's length t has a single interior minimum and
    rises to 1 as t grows, so on the increasing branch bisection pins any value
    between the minimum and 1. The evaluation casts to float32 first: the tuned
    row must behave identically after a save/load round trip.
    """
    s = np.sum([r.astype(np.float64) for r in neighbor_rows], axis=0)
    total = float(np.sum([np.linalg.norm(r.astype(np.float64)) for r in neighbor_rows]))
    c = float(np.dot(word_dir, s))
    t_min = (float(np.dot(s, s)) - c * total) / (total - c)

    def su_at(t: float) -> float:
        row = np.float32(t * word_dir)
        return uniformity(np.vstack([row.astype(np.float64)] + [r.astype(np.float64) for r in neighbor_rows]))

    floor = su_at(max(t_min, 1e-6))
    if floor > target - 1e-3:
        raise RuntimeError(f"SU floor {floor:.5f} leaves no room below target {target}")
    lo = max(t_min, 1e-6)
    hi = max(4.0 * lo, 1.0)
    while su_at(hi) < target:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("SU target unreachable from above")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if su_at(mid) < target:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    if abs(su_at(t) - target) > 1.5e-6:
        raise RuntimeError(f"bisection landed at {su_at(t):.8f}, wanted {target}")
    return np.float32(t * word_dir)


def build_model(seed: int) -> EmbeddingModel:
    rng = np.random.default_rng(seed)
    axes = np.eye(DIM)
    aux_axis, month_axis, num_axis, name_axis, gem_axis, twin_axis = axes[:6]

    aux_dirs = cluster(aux_axis, len(AUX), 0.105, rng)
    month_dirs = cluster(month_axis, len(MONTHS) - 1, 0.072, rng)

    # "may": 52 degrees off the auxiliary centroid, leaning toward the months
    # and a spare axis so the off-component lands near no cluster.
    aux_centroid = unit(np.sum(aux_dirs, axis=0))
    off = unit(0.55 * orthogonal_part(month_axis, aux_centroid)
               + 0.835 * orthogonal_part(axes[7], aux_centroid))
    theta = math.radians(52.0)
    may_dir = unit(math.cos(theta) * aux_centroid + math.sin(theta) * off)

    # "december": 22 degrees off the month centroid toward a spare axis.
    dec_tilt = math.radians(22.0)
    dec_off = orthogonal_part(axes[8], month_axis)
    dec_dir = unit(math.cos(dec_tilt) * month_axis + math.sin(dec_tilt) * dec_off)

    aux_vecs = assign_by_affinity(may_dir, aux_dirs, AUX_TOP4,
                                  [t for t in AUX if t not in AUX_TOP4])
    month_vecs = assign_by_affinity(dec_dir, month_dirs, MONTH_TOP4,
                                    [t for t in MONTHS if t not in MONTH_TOP4 and t != "december"])

    def jitter() -> float:
        return float(rng.uniform(0.85, 1.15))

    vectors: dict[str, np.ndarray] = {}
    for token in AUX:
        vectors[token] = np.float32(jitter() * aux_vecs[token])
    for token in MONTHS:
        if token != "december":
            vectors[token] = np.float32(jitter() * month_vecs[token])
    for token, direction in zip(NUMBERS, cluster(num_axis, len(NUMBERS), 0.083, rng)):
        vectors[token] = np.float32(jitter() * direction)
    for token, direction in zip(NAMES, cluster(name_axis, len(NAMES), 0.083, rng)):
        vectors[token] = np.float32(jitter() * direction)

    twin_row = np.float32(0.93 * twin_axis)
    twin0 = np.float32(0.97 * unit(twin_axis + 0.03 * axes[6]))
    vectors["twin0"] = twin0
    for token in TWINS[1:]:
        vectors[token] = twin_row.copy()

    # fillers live in the spare dimensions so they neighbor only each other
    for token in FILLERS:
        tail = np.zeros(DIM)
        tail[9:] = rng.standard_normal(DIM - 9)
        vectors[token] = np.float32(jitter() * unit(tail))
    vectors["ruby"] = np.float32(gem_axis)
    for token, direction in zip(GEMS, cluster(gem_axis, len(GEMS), 0.044, rng)):
        vectors[token] = np.float32(jitter() * direction)

    # Pin the two showcase SUs; neighbor order is cosine-based, so scaling the
    # word itself cannot reorder anyone's neighborhood.
    vectors["may"] = pin_su(may_dir, [vectors[t] for t in AUX_TOP4], SU_MAY)
    vectors["december"] = pin_su(dec_dir, [vectors[t] for t in MONTH_TOP4], SU_DECEMBER)

    tokens = AUX + MONTHS[:-1] + ["december", "may"] + NUMBERS + NAMES + TWINS + FILLERS + ["ruby"] + GEMS
    assert len(tokens) == 71
    return EmbeddingModel(tuple(tokens), np.vstack([vectors[t] for t in tokens]))


def check_model(model: EmbeddingModel) -> None:
    """Fail loudly if any showcase property drifted; reroll the seed if so."""
    config = SearchConfig(limit=LIMIT, scope=SCOPE)
    analyzer = PolysemyAnalyzer(model, config)

    found = stable_neighbors(model, "may", config)
    assert [n.token for n in found.neighbors] == AUX_TOP4, found
    found = stable_neighbors(model, "december", config)
    assert [n.token for n in found.neighbors] == MONTH_TOP4, found

    may = analyzer.test("may")
    assert f"{may.record.su:.4f}" == f"{SU_MAY:.4f}", may.record.su
    assert may.verdict.kind is VerdictKind.POLYSEMIC
    assert may.stats.threshold - may.record.su > 0.002, may.stats

    december = analyzer.test("december")
    assert f"{december.record.su:.4f}" == f"{SU_DECEMBER:.4f}", december.record.su
    assert december.verdict.kind is VerdictKind.NOT_DETECTED
    assert december.record.su - december.stats.threshold > 0.002, december.stats

    twin = analyzer.test("twin0")
    assert twin.verdict.kind is VerdictKind.UNTESTABLE
    assert twin.verdict.reason is UntestableReason.ZERO_VARIANCE

    ruby = stable_neighbors(model, "ruby", config)
    assert isinstance(ruby, Insufficient)
    assert ruby.reason is InsufficientReason.TOO_FEW_IN_SCOPE and ruby.found == 0, ruby

    report = analyzer.batch()
    assert report.untestable == 2, report.untestable
    flagged = [r.word for r in report.rows if r.verdict.kind is VerdictKind.POLYSEMIC]
    assert flagged == ["may"], flagged


def write_outputs(model: EmbeddingModel, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / "fixture_model.bin"
    save_binary_model(model, model_path)
    assert load_binary_model(model_path) == model

    written = [model_path]
    for name, argv in [
        ("golden_batch.tsv", ["batch", str(model_path), *GOLDEN_FLAGS]),
        ("golden_test_may.tsv", ["test", "may", "--model", str(model_path), *GOLDEN_FLAGS]),
        ("golden_neighbors_may.tsv", ["neighbors", "may", "--model", str(model_path), *GOLDEN_FLAGS]),
    ]:
        dest = out_dir / name
        rc = cli_main([*argv, "--out", str(dest)])
        if rc != 0:
            raise RuntimeError(f"golden command {argv} exited {rc}")
        written.append(dest)
    return written


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument(
        "--out-dir", type=Path,
        default=Path(__file__).resolve().parent.parent / "tests" / "data",
    )
    args = parser.parse_args(argv)

    model = build_model(args.seed)
    check_model(model)
    for path in write_outputs(model, args.out_dir):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
