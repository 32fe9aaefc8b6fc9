"""Document corpus, embeddings, and top-k ranking.

A built index pairs every document with one embedding of its
``title + " " + body`` text. Ranking scores the query against every
document under either the learned similarity network or the cosine
baseline and returns the best k, ties broken by ascending document id.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .embedder import EmbeddingCache, ProviderConfig, embed_batch
from .errors import DimensionMismatchError, FormatError, ValidationError, ZeroNormError
from .simnet import _SCORE_MAX, _SCORE_MIN, SimilarityModel, _forward_batch

DEFAULT_K = 5


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    body: str
    url: str | None = None


@dataclass(frozen=True)
class RankedResult:
    doc_id: str
    score: float
    rank: int  # 1-based


@dataclass
class SearchIndex:
    documents: list[Document]
    embeddings: np.ndarray  # (n_docs, dim)
    dim: int

    def __len__(self) -> int:
        return len(self.documents)

    def document_by_id(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise ValidationError(f"unknown document id {doc_id!r}")


def _validate_docs(docs: list[Document]) -> None:
    seen: set[str] = set()
    for doc in docs:
        if not doc.id:
            raise ValidationError("document id must be non-empty")
        if doc.id in seen:
            raise ValidationError(f"duplicate document id {doc.id!r}")
        if not doc.body:
            raise ValidationError(f"document {doc.id!r} has an empty body")
        seen.add(doc.id)


def load_corpus(path: str) -> list[Document]:
    """Read a JSONL corpus: one {id, title, body, url?} object per line."""
    docs: list[Document] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                doc = Document(
                    id=raw["id"],
                    title=raw.get("title", ""),
                    body=raw["body"],
                    url=raw.get("url"),
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
            docs.append(doc)
    _validate_docs(docs)
    return docs


def build_index(
    docs: list[Document],
    provider: ProviderConfig,
    cache: EmbeddingCache | None = None,
) -> SearchIndex:
    """Embed every document's ``title + " " + body`` and align the results."""
    _validate_docs(docs)
    texts = [f"{doc.title} {doc.body}" for doc in docs]
    vectors = embed_batch(texts, provider, cache)
    if vectors:
        embeddings = np.stack(vectors)
    else:
        embeddings = np.zeros((0, provider.dim), dtype=np.float64)
    return SearchIndex(documents=list(docs), embeddings=embeddings, dim=provider.dim)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Dot product over the product of norms, in [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"cosine of shapes {u.shape} and {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroNormError("cosine undefined for a zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def rank(
    index: SearchIndex,
    query_vec: np.ndarray,
    scorer: str = "cosine",
    model: SimilarityModel | None = None,
    k: int = DEFAULT_K,
) -> list[RankedResult]:
    """Top-k documents for a query embedding, scores descending.

    Under the cosine scorer any zero-norm participant scores 0, so
    degenerate documents sink instead of erroring the whole search.
    Ties are broken by ascending document id.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if query_vec.shape != (index.dim,):
        raise DimensionMismatchError(
            f"query has shape {query_vec.shape}, index dim is {index.dim}"
        )
    n = len(index.documents)
    if n == 0:
        return []

    if scorer == "cosine":
        scores = []
        q_norm = float(np.linalg.norm(query_vec))
        for emb in index.embeddings:
            d_norm = float(np.linalg.norm(emb))
            if q_norm == 0.0 or d_norm == 0.0:
                scores.append(0.0)
            else:
                scores.append(float(np.dot(query_vec, emb) / (q_norm * d_norm)))
    elif scorer == "learned":
        if model is None:
            raise ValidationError("learned scorer requires a model")
        if model.input_dim != index.dim:
            raise DimensionMismatchError(
                f"model expects {model.input_dim}-vectors, index dim is {index.dim}"
            )
        x = np.concatenate(
            [np.tile(query_vec, (n, 1)), index.embeddings], axis=1
        )
        out, _ = _forward_batch(model, x, train=False)
        scores = [min(max(float(p), _SCORE_MIN), _SCORE_MAX) for p in out]
    else:
        raise ValidationError(f"unknown scorer {scorer!r}")

    order = sorted(range(n), key=lambda i: (-scores[i], index.documents[i].id))
    top = order[: min(k, n)]
    return [
        RankedResult(doc_id=index.documents[i].id, score=scores[i], rank=pos + 1)
        for pos, i in enumerate(top)
    ]
