"""Request and response bodies for the HTTP service."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"


class ModelInfo(BaseModel):
    vocab_size: int
    dim: int


class NeighborOut(BaseModel):
    token: str
    cosine: float


class NeighborsResponse(BaseModel):
    """Stable-neighbor search outcome; ``insufficient`` is a result, not an error."""

    word: str
    status: Literal["ok", "insufficient"]
    neighbors: list[NeighborOut] | None = None
    reason: str | None = None
    found: int | None = None


class UniformityResponse(BaseModel):
    word: str
    su: float | None = None
    neighbors: list[str] | None = None
    reason: str | None = None


class NeighborSUOut(BaseModel):
    token: str
    su: float | None = None


class WordTestResult(BaseModel):
    word: str
    verdict: Literal["polysemic", "not-detected", "untestable"]
    reason: str | None = None
    su: float | None = None
    neighbors: list[NeighborSUOut] | None = None
    mean: float | None = None
    stddev: float | None = None
    threshold: float | None = None


class SearchConfigOut(BaseModel):
    limit: int
    n_neighbors: int
    scope: int
    sigma_k: float


class BatchRequest(BaseModel):
    """Per-request overrides of the server's default search settings."""

    limit: int | None = Field(default=None, ge=2)
    n_neighbors: int | None = Field(default=None, ge=2)
    scope: int | None = Field(default=None, ge=2)
    sigma_k: float | None = Field(default=None, gt=0)


class BatchSummaryOut(BaseModel):
    poly: int
    mono: int
    untestable: int


class BatchResponse(BaseModel):
    config: SearchConfigOut
    rows: list[WordTestResult]
    summary: BatchSummaryOut


class LabelIn(BaseModel):
    word: str
    human: Literal["mono", "poly"]
    computer: Literal["mono", "poly"]


class EvalRequest(BaseModel):
    labels: list[LabelIn]
    alpha: float = 0.05


class EvalResponse(BaseModel):
    counts: list[list[int]]
    statistic: float
    alpha: float
    significant: bool
