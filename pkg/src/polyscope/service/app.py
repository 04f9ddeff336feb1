"""HTTP service around one loaded embedding model.

Loading a model is the expensive step, so the service loads it once at
startup and answers neighbor, SU, test, batch and evaluation queries from
memory. Analyzers (and their SU caches) are kept per search configuration,
so repeated queries under the same settings reuse earlier work.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from ..errors import UnknownTokenError
from ..evaluation import chi_square_yates, confusion
from ..model_io import load_model, read_count_file, rerank_by_counts
from ..neighborhood import Insufficient, SearchConfig, stable_neighbors
from ..polysemy import PolysemyAnalyzer, PolysemyResult, UniformityRecord, VerdictKind
from .schemas import (
    BatchRequest,
    BatchResponse,
    BatchSummaryOut,
    EvalRequest,
    EvalResponse,
    HealthResponse,
    ModelInfo,
    NeighborOut,
    NeighborsResponse,
    NeighborSUOut,
    SearchConfigOut,
    UniformityResponse,
    WordTestResult,
)

__all__ = ["create_app"]


def _config_out(config: SearchConfig) -> SearchConfigOut:
    return SearchConfigOut(
        limit=config.limit,
        n_neighbors=config.n_neighbors,
        scope=config.scope,
        sigma_k=config.sigma_k,
    )


def _uniformity_out(record: UniformityRecord) -> UniformityResponse:
    tokens = [n.token for n in record.neighbors.neighbors] if record.neighbors else None
    reason = record.reason.value if record.reason is not None else None
    return UniformityResponse(word=record.word, su=record.su, neighbors=tokens, reason=reason)


def _test_out(result: PolysemyResult) -> WordTestResult:
    neighbors = None
    if result.record.neighbors is not None and result.neighbor_records is not None:
        neighbors = [
            NeighborSUOut(token=nb.token, su=rec.su)
            for nb, rec in zip(result.record.neighbors.neighbors, result.neighbor_records)
        ]
    stats = result.stats
    return WordTestResult(
        word=result.word,
        verdict=result.verdict.kind.value,
        reason=result.verdict.reason.value if result.verdict.reason is not None else None,
        su=result.record.su,
        neighbors=neighbors,
        mean=stats.mean if stats else None,
        stddev=stats.stddev if stats else None,
        threshold=stats.threshold if stats else None,
    )


def create_app(
    model_path: str | Path,
    *,
    fmt: str = "auto",
    config: SearchConfig | None = None,
    counts_path: str | Path | None = None,
    threads: int = 1,
) -> FastAPI:
    """Load the model eagerly and build the application around it."""
    model = load_model(model_path, fmt)
    if counts_path is not None:
        model = rerank_by_counts(model, read_count_file(counts_path))
    default_config = config if config is not None else SearchConfig()
    analyzers: dict[SearchConfig, PolysemyAnalyzer] = {}

    def analyzer_for(cfg: SearchConfig) -> PolysemyAnalyzer:
        return analyzers.setdefault(cfg, PolysemyAnalyzer(model, cfg, threads=threads))

    def derive_config(
        limit: int | None, n_neighbors: int | None, scope: int | None, sigma_k: float | None
    ) -> SearchConfig:
        overrides = {
            key: value
            for key, value in (
                ("limit", limit), ("n_neighbors", n_neighbors),
                ("scope", scope), ("sigma_k", sigma_k),
            )
            if value is not None
        }
        try:
            return replace(default_config, **overrides) if overrides else default_config
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    app = FastAPI(title="polyscope", version="0.1.0")

    @app.exception_handler(UnknownTokenError)
    async def _unknown_token(_request, exc: UnknownTokenError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse()

    @app.get("/model", response_model=ModelInfo)
    def model_info() -> ModelInfo:
        return ModelInfo(vocab_size=model.vocab_size, dim=model.dim)

    @app.get("/neighbors/{word}", response_model=NeighborsResponse, response_model_exclude_none=True)
    def neighbors(
        word: str,
        limit: int | None = None,
        n_neighbors: int | None = None,
        scope: int | None = None,
    ) -> NeighborsResponse:
        cfg = derive_config(limit, n_neighbors, scope, None)
        try:
            found = stable_neighbors(model, word, cfg, threads=threads)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        if isinstance(found, Insufficient):
            return NeighborsResponse(
                word=word, status="insufficient", reason=found.reason.value, found=found.found
            )
        return NeighborsResponse(
            word=word,
            status="ok",
            neighbors=[NeighborOut(token=n.token, cosine=n.cosine) for n in found.neighbors],
        )

    @app.get("/uniformity/{word}", response_model=UniformityResponse, response_model_exclude_none=True)
    def uniformity_of(
        word: str,
        limit: int | None = None,
        n_neighbors: int | None = None,
        scope: int | None = None,
    ) -> UniformityResponse:
        cfg = derive_config(limit, n_neighbors, scope, None)
        try:
            return _uniformity_out(analyzer_for(cfg).record(word))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    @app.get("/test/{word}", response_model=WordTestResult, response_model_exclude_none=True)
    def test_word(
        word: str,
        limit: int | None = None,
        n_neighbors: int | None = None,
        scope: int | None = None,
        sigma_k: float | None = None,
    ) -> WordTestResult:
        cfg = derive_config(limit, n_neighbors, scope, sigma_k)
        try:
            return _test_out(analyzer_for(cfg).test(word))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    @app.post("/batch", response_model=BatchResponse, response_model_exclude_none=True)
    def batch(request: BatchRequest) -> BatchResponse:
        cfg = derive_config(request.limit, request.n_neighbors, request.scope, request.sigma_k)
        try:
            report = analyzer_for(cfg).batch()
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return BatchResponse(
            config=_config_out(cfg),
            rows=[_test_out(r) for r in report.rows],
            summary=BatchSummaryOut(
                poly=report.poly, mono=report.mono, untestable=report.untestable
            ),
        )

    @app.post("/eval", response_model=EvalResponse)
    def evaluate(request: EvalRequest) -> EvalResponse:
        matrix = confusion((l.word, l.human, l.computer) for l in request.labels)
        try:
            statistic, significant = chi_square_yates(matrix, request.alpha)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        rows = matrix.as_rows()
        return EvalResponse(
            counts=[list(rows[0]), list(rows[1])],
            statistic=statistic,
            alpha=request.alpha,
            significant=significant,
        )

    return app
