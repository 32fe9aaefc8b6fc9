"""Retrieval evaluation against gold relevance judgments.

The top-k retrieved documents count as positive predictions; everything
else is negative. True negatives are the non-relevant documents left
outside the top-k, so the four counts always partition the corpus.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .embedder import EmbeddingCache, ProviderConfig, embed_batch
from .errors import FormatError, ValidationError
from .index import DEFAULT_K, SearchIndex, rank
from .simnet import SimilarityModel


@dataclass(frozen=True)
class GoldJudgment:
    query: str
    relevant_ids: frozenset[str]


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class QueryEval:
    query: str
    confusion: Confusion
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    queries: list[QueryEval]
    macro: MacroMetrics


def confusion_at_k(
    ranked_ids: list[str],
    relevant: set[str] | frozenset[str],
    n_corpus: int,
    k: int,
) -> Confusion:
    """Confusion counts with the top min(k, len(ranked)) treated as positive."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if len(ranked_ids) > n_corpus:
        raise ValidationError(
            f"{len(ranked_ids)} ranked ids for a corpus of {n_corpus}"
        )
    if len(set(ranked_ids)) != len(ranked_ids):
        raise ValidationError("ranked ids must be distinct")
    if len(relevant) > n_corpus:
        raise ValidationError(
            f"{len(relevant)} relevant ids for a corpus of {n_corpus}"
        )
    k_eff = min(k, len(ranked_ids))
    top = set(ranked_ids[:k_eff])
    tp = len(top & set(relevant))
    fp = k_eff - tp
    fn = len(relevant) - tp
    tn = n_corpus - k_eff - fn
    if tn < 0:
        raise ValidationError(
            "relevance judgments are inconsistent with the corpus size"
        )
    return Confusion(tp=tp, fp=fp, tn=tn, fn=fn)


def prf(c: Confusion) -> tuple[float, float, float]:
    """(precision, recall, f1); zero denominators yield 0 by convention."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return precision, recall, f1


def load_gold(path: str) -> list[GoldJudgment]:
    """Read gold judgments: one {query, relevant_ids} object per line."""
    judgments: list[GoldJudgment] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                judgment = GoldJudgment(
                    query=raw["query"],
                    relevant_ids=frozenset(raw["relevant_ids"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
            if not judgment.query:
                raise ValidationError(f"{path}: line {lineno}: empty query")
            judgments.append(judgment)
    return judgments


def evaluate_run(
    index: SearchIndex,
    judgments: list[GoldJudgment],
    provider: ProviderConfig,
    cache: EmbeddingCache | None = None,
    scorer: str = "cosine",
    model: SimilarityModel | None = None,
    k: int = DEFAULT_K,
) -> EvalReport:
    """Embed each query, rank, and score precision/recall/F1 at cutoff k.

    Macro metrics are unweighted arithmetic means over the queries.
    """
    if not judgments:
        raise ValidationError("evaluate_run needs at least one judgment")
    corpus_ids = {doc.id for doc in index.documents}
    for judgment in judgments:
        unknown = judgment.relevant_ids - corpus_ids
        if unknown:
            raise ValidationError(
                f"gold for {judgment.query!r} references unknown ids: "
                f"{', '.join(sorted(unknown))}"
            )
    query_vecs = embed_batch([j.query for j in judgments], provider, cache)

    per_query: list[QueryEval] = []
    for judgment, qvec in zip(judgments, query_vecs):
        results = rank(index, qvec, scorer=scorer, model=model, k=k)
        ranked_ids = [r.doc_id for r in results]
        confusion = confusion_at_k(ranked_ids, judgment.relevant_ids, len(index), k)
        precision, recall, f1 = prf(confusion)
        per_query.append(
            QueryEval(judgment.query, confusion, precision, recall, f1)
        )
    n = len(per_query)
    macro = MacroMetrics(
        precision=sum(q.precision for q in per_query) / n,
        recall=sum(q.recall for q in per_query) / n,
        f1=sum(q.f1 for q in per_query) / n,
    )
    return EvalReport(queries=per_query, macro=macro)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "queries": [
            {
                "query": q.query,
                "confusion": {
                    "tp": q.confusion.tp,
                    "fp": q.confusion.fp,
                    "tn": q.confusion.tn,
                    "fn": q.confusion.fn,
                },
                "precision": q.precision,
                "recall": q.recall,
                "f1": q.f1,
            }
            for q in report.queries
        ],
        "macro": {
            "precision": report.macro.precision,
            "recall": report.macro.recall,
            "f1": report.macro.f1,
        },
    }


def format_report(report: EvalReport) -> str:
    """Fixed-width table with one row per query plus the macro row."""
    width = max([len("query"), len("macro")] + [len(q.query) for q in report.queries])
    width = min(width, 60)
    lines = [
        f"{'query':<{width}}  {'P':>6}  {'R':>6}  {'F1':>6}  {'tp':>3} {'fp':>3} {'tn':>3} {'fn':>3}"
    ]
    for q in report.queries:
        name = q.query if len(q.query) <= width else q.query[: width - 3] + "..."
        c = q.confusion
        lines.append(
            f"{name:<{width}}  {q.precision:>6.4f}  {q.recall:>6.4f}  {q.f1:>6.4f}"
            f"  {c.tp:>3} {c.fp:>3} {c.tn:>3} {c.fn:>3}"
        )
    lines.append(
        f"{'macro':<{width}}  {report.macro.precision:>6.4f}  "
        f"{report.macro.recall:>6.4f}  {report.macro.f1:>6.4f}"
    )
    return "\n".join(lines)
