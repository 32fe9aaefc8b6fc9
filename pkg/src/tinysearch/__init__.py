"""tinysearch: a small semantic search engine.

Fixed-length sentence embeddings (remote encoder or deterministic local
mock) are ranked against a query either by a trained feed-forward
similarity network or by cosine similarity, with an IR evaluation kit,
an HTTP service, and a browser UI on top.
"""

from .embedder import EmbeddingCache, ProviderConfig, embed_batch, hash_embed
from .evalkit import Confusion, EvalReport, GoldJudgment, confusion_at_k, evaluate_run, prf
from .index import Document, RankedResult, SearchIndex, build_index, cosine, load_corpus, rank
from .simnet import (
    SimilarityModel,
    TrainConfig,
    backward,
    bce_loss,
    build_model,
    eval_accuracy,
    forward,
    init_model,
    load_model,
    rmsprop_step,
    save_model,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Confusion",
    "Document",
    "EmbeddingCache",
    "EvalReport",
    "GoldJudgment",
    "ProviderConfig",
    "RankedResult",
    "SearchIndex",
    "SimilarityModel",
    "TrainConfig",
    "backward",
    "bce_loss",
    "build_index",
    "build_model",
    "confusion_at_k",
    "cosine",
    "embed_batch",
    "eval_accuracy",
    "evaluate_run",
    "forward",
    "hash_embed",
    "init_model",
    "load_corpus",
    "load_model",
    "prf",
    "rank",
    "rmsprop_step",
    "save_model",
    "train",
]
