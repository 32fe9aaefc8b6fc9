"""HTTP API over a loaded index and model, plus the static web UI.

POST /api/search runs the embed -> rank loop; GET /api/documents lists
the corpus; GET /api/health reports liveness. The index, model, and
cache live in an immutable snapshot shared read-only across requests.
"""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .embedder import EmbeddingCache, ProviderConfig, embed_batch
from .errors import FormatError, TransportError, ValidationError
from .index import SearchIndex, build_index, load_corpus, rank
from .simnet import SimilarityModel, load_model

MAX_K = 100
MAX_QUERY_BYTES = 8192

_PACKAGED_STATIC = os.path.join(os.path.dirname(__file__), "static")


class SearchRequest(BaseModel):
    query: str
    k: int = 5
    scorer: str = "learned"


@dataclass
class ServerState:
    index: SearchIndex
    provider: ProviderConfig
    cache: EmbeddingCache | None = None
    model: SimilarityModel | None = None
    static_dir: str | None = None


def create_app(state: ServerState) -> FastAPI:
    app = FastAPI(title="tinysearch", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc):  # noqa: ANN001 - fastapi signature
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/api/search")
    def search(req: SearchRequest):
        started = time.perf_counter()
        if not req.query:
            return _error(400, "query must be non-empty")
        if len(req.query.encode("utf-8")) > MAX_QUERY_BYTES:
            return _error(400, f"query exceeds {MAX_QUERY_BYTES} bytes")
        if not 1 <= req.k <= MAX_K:
            return _error(400, f"k must be in [1, {MAX_K}]")
        if req.scorer not in ("learned", "cosine"):
            return _error(400, f"unknown scorer {req.scorer!r}")
        if req.scorer == "learned" and state.model is None:
            return _error(409, "no similarity model is loaded")
        try:
            query_vec = embed_batch([req.query], state.provider, state.cache)[0]
        except TransportError as exc:
            return _error(502, str(exc))
        results = rank(
            state.index, query_vec, scorer=req.scorer, model=state.model, k=req.k
        )
        docs = {doc.id: doc for doc in state.index.documents}
        return {
            "results": [
                {
                    "doc_id": r.doc_id,
                    "title": docs[r.doc_id].title,
                    "url": docs[r.doc_id].url,
                    "score": r.score,
                    "rank": r.rank,
                }
                for r in results
            ],
            "scorer": req.scorer,
            "elapsed_ms": (time.perf_counter() - started) * 1000.0,
        }

    @app.get("/api/documents")
    def documents():
        return [
            {"doc_id": doc.id, "title": doc.title, "url": doc.url}
            for doc in state.index.documents
        ]

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "corpus_size": len(state.index),
            "model_loaded": state.model is not None,
            "encoder": state.provider.kind,
        }

    static_dir = state.static_dir or _PACKAGED_STATIC
    if os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


def load_config(path: str) -> dict:
    """Service config: listen, corpus, model, encoder, cache, static."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise FormatError(f"{path}: config must be a JSON object")
    if "corpus" not in cfg:
        raise ValidationError(f"{path}: config needs a 'corpus' path")
    return cfg


def build_state(cfg: dict) -> ServerState:
    """Assemble the immutable server snapshot from a parsed config."""
    encoder = cfg.get("encoder", {})
    provider = ProviderConfig(
        kind=encoder.get("kind", "mock"),
        endpoint=encoder.get("endpoint", ""),
        dim=encoder.get("dim", 768),
    )
    cache_path = cfg.get("cache")
    if cache_path and os.path.exists(cache_path):
        cache = EmbeddingCache.load(cache_path, expected_dim=provider.dim)
    else:
        cache = EmbeddingCache(provider.dim)
    docs = load_corpus(cfg["corpus"])
    index = build_index(docs, provider, cache)
    model = load_model(cfg["model"]) if cfg.get("model") else None
    return ServerState(
        index=index,
        provider=provider,
        cache=cache,
        model=model,
        static_dir=cfg.get("static"),
    )


def parse_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise ValidationError(f"listen must be host:port, got {listen!r}")
    return host, int(port)
