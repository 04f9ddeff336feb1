"""Agreement between automatic verdicts and human mono/poly labels.

A 2x2 confusion matrix (rows: human label, columns: tool verdict) and a
chi-squared independence test with Yates' continuity correction, which the
small cell counts typical of hand-judged word lists require.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, TextIO

Label = Literal["mono", "poly"]

# upper-tail critical values, chi-squared with 1 degree of freedom
_CRITICAL_1DF = {0.05: 3.841, 0.01: 6.635}

__all__ = ["ConfusionMatrix2x2", "confusion", "chi_square_yates", "read_labels"]


@dataclass(frozen=True)
class ConfusionMatrix2x2:
    """Counts indexed [human][computer] over the labels mono and poly."""

    mono_mono: int
    mono_poly: int
    poly_mono: int
    poly_poly: int

    def __post_init__(self) -> None:
        if min(self.mono_mono, self.mono_poly, self.poly_mono, self.poly_poly) < 0:
            raise ValueError("counts must be non-negative")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> ConfusionMatrix2x2:
        (a, b), (c, d) = (tuple(r) for r in rows)
        return cls(a, b, c, d)

    def as_rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.mono_mono, self.mono_poly), (self.poly_mono, self.poly_poly)

    @property
    def total(self) -> int:
        return self.mono_mono + self.mono_poly + self.poly_mono + self.poly_poly

    @property
    def human_marginals(self) -> tuple[int, int]:
        return self.mono_mono + self.mono_poly, self.poly_mono + self.poly_poly

    @property
    def computer_marginals(self) -> tuple[int, int]:
        return self.mono_mono + self.poly_mono, self.mono_poly + self.poly_poly


def confusion(
    labels: Iterable[tuple[str, Label, Label]]
) -> ConfusionMatrix2x2:
    """Tally (word, human, computer) triples into a confusion matrix."""
    cells = {("mono", "mono"): 0, ("mono", "poly"): 0, ("poly", "mono"): 0, ("poly", "poly"): 0}
    for word, human, computer in labels:
        if (human, computer) not in cells:
            raise ValueError(f"labels for {word!r} must be 'mono' or 'poly', got {(human, computer)}")
        cells[human, computer] += 1
    return ConfusionMatrix2x2(
        cells["mono", "mono"], cells["mono", "poly"], cells["poly", "mono"], cells["poly", "poly"]
    )


def chi_square_yates(
    m: ConfusionMatrix2x2 | Iterable[Iterable[int]], alpha: float = 0.05
) -> tuple[float, bool]:
    """Continuity-corrected chi-squared statistic and its significance.

    Accepts a :class:`ConfusionMatrix2x2` or plain 2x2 rows. Expected counts
    come from the marginal products; each cell contributes
    (max(|O - E| - 0.5, 0))^2 / E. Significant when the statistic exceeds
    the 1-df critical value for ``alpha`` (supported: 0.05, 0.01).
    """
    if alpha not in _CRITICAL_1DF:
        raise ValueError(f"alpha must be one of {sorted(_CRITICAL_1DF)}, got {alpha}")
    if not isinstance(m, ConfusionMatrix2x2):
        m = ConfusionMatrix2x2.from_rows(m)
    row = m.human_marginals
    col = m.computer_marginals
    if min(row) == 0 or min(col) == 0:
        raise ValueError("every marginal must be positive for the test to be defined")
    total = m.total
    observed = m.as_rows()
    statistic = 0.0
    for i in range(2):
        for j in range(2):
            expected = row[i] * col[j] / total
            adjusted = max(abs(observed[i][j] - expected) - 0.5, 0.0)
            statistic += adjusted * adjusted / expected
    return statistic, statistic > _CRITICAL_1DF[alpha]


def read_labels(stream: TextIO) -> list[tuple[str, Label, Label]]:
    """Parse "word<TAB>human<TAB>computer" lines; blank lines are skipped."""
    triples: list[tuple[str, Label, Label]] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        word, human, computer = fields
        if human not in ("mono", "poly") or computer not in ("mono", "poly"):
            raise ValueError(f"line {lineno}: labels must be 'mono' or 'poly'")
        triples.append((word, human, computer))  # type: ignore[arg-type]
    return triples
