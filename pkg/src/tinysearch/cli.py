"""Command-line entry point: ingest, train, search, eval, serve.

Exit codes: 0 success, 1 validation error, 2 I/O or transport error.
The encoder defaults to the local mock; setting TINYSEARCH_ENCODER_URL
switches every subcommand to the remote encoder at that URL.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .embedder import DEFAULT_DIM, ENCODER_URL_ENV, EmbeddingCache, ProviderConfig, embed_batch
from .errors import (
    DimensionMismatchError,
    FormatError,
    TransportError,
    ValidationError,
)
from .evalkit import evaluate_run, format_report, load_gold, report_to_dict
from .index import build_index, load_corpus, rank
from .simnet import TrainConfig, eval_accuracy, init_model, load_model, save_model, train


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="tinysearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="embed a corpus into a cache file")
    ingest.add_argument("--corpus", required=True)
    ingest.add_argument("--cache", required=True)

    train_p = sub.add_parser("train", help="train the similarity model on text pairs")
    train_p.add_argument("--pairs", required=True)
    train_p.add_argument("--model", required=True)
    train_p.add_argument("--cache")
    train_p.add_argument("--epochs", type=int, default=30)
    train_p.add_argument("--batch-size", type=int, default=200)
    train_p.add_argument("--val-split", type=float, default=0.3)
    train_p.add_argument("--seed", type=int, default=0)

    search = sub.add_parser("search", help="rank the corpus for one query")
    search.add_argument("--corpus", required=True)
    search.add_argument("--query", required=True)
    search.add_argument("--scorer", choices=["learned", "cosine"], default="learned")
    search.add_argument("--model")
    search.add_argument("--cache")
    search.add_argument("--k", type=int, default=5)
    search.add_argument("--json", action="store_true")

    eval_p = sub.add_parser("eval", help="precision/recall/F1 against gold judgments")
    eval_p.add_argument("--corpus", required=True)
    eval_p.add_argument("--gold", required=True)
    eval_p.add_argument("--scorer", choices=["learned", "cosine"], default="learned")
    eval_p.add_argument("--model")
    eval_p.add_argument("--cache")
    eval_p.add_argument("--k", type=int, default=5)
    eval_p.add_argument("--json", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", required=True)
    return parser


def _provider() -> ProviderConfig:
    endpoint = os.environ.get(ENCODER_URL_ENV)
    if endpoint:
        return ProviderConfig(kind="remote", endpoint=endpoint, dim=DEFAULT_DIM)
    return ProviderConfig(kind="mock", dim=DEFAULT_DIM)


def _open_cache(path: str | None, dim: int) -> EmbeddingCache | None:
    if path is None:
        return None
    if os.path.exists(path):
        return EmbeddingCache.load(path, expected_dim=dim)
    return EmbeddingCache(dim)


def load_pairs(path: str) -> list[tuple[str, str, int]]:
    """Read training pairs: one {text_a, text_b, label} object per line."""
    pairs: list[tuple[str, str, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                text_a, text_b, label = raw["text_a"], raw["text_b"], raw["label"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
            if label not in (0, 1):
                raise ValidationError(f"{path}: line {lineno}: label must be 0 or 1")
            pairs.append((text_a, text_b, label))
    if not pairs:
        raise ValidationError(f"{path}: no training pairs")
    return pairs


def _cmd_ingest(args) -> int:
    provider = _provider()
    docs = load_corpus(args.corpus)
    cache = _open_cache(args.cache, provider.dim)
    build_index(docs, provider, cache)
    cache.save(args.cache)
    print(f"ingested {len(docs)} documents ({len(cache)} embeddings cached) -> {args.cache}")
    return 0


def _cmd_train(args) -> int:
    provider = _provider()
    pairs = load_pairs(args.pairs)
    cache = _open_cache(args.cache, provider.dim)
    # embed every pair side up front; the cache makes reruns cheap
    texts_a = [a for a, _, _ in pairs]
    texts_b = [b for _, b, _ in pairs]
    vecs_a = embed_batch(texts_a, provider, cache)
    vecs_b = embed_batch(texts_b, provider, cache)
    if args.cache:
        cache.save(args.cache)
    dataset = [(va, vb, label) for va, vb, (_, _, label) in zip(vecs_a, vecs_b, pairs)]

    config = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        validation_split=args.val_split,
        shuffle_seed=args.seed,
    )
    model = init_model(seed=args.seed)
    model, history = train(model, dataset, config)
    for i, rec in enumerate(history, start=1):
        print(
            f"epoch {i}: train_loss={rec.train_loss:.4f} train_acc={rec.train_accuracy:.4f} "
            f"val_loss={rec.val_loss:.4f} val_acc={rec.val_accuracy:.4f}"
        )
    save_model(model, args.model)
    accuracy = eval_accuracy(model, dataset)
    print(f"saved model ({model.param_count()} parameters) -> {args.model}")
    print(f"accuracy over all {len(dataset)} pairs: {accuracy:.4f}")
    return 0


def _load_scorer_model(args):
    if args.scorer == "learned":
        if not args.model:
            raise ValidationError("--scorer learned requires --model")
        return load_model(args.model)
    return None


def _cmd_search(args) -> int:
    provider = _provider()
    model = _load_scorer_model(args)
    docs = load_corpus(args.corpus)
    cache = _open_cache(args.cache, provider.dim)
    index = build_index(docs, provider, cache)
    query_vec = embed_batch([args.query], provider, cache)[0]
    if args.cache:
        cache.save(args.cache)
    results = rank(index, query_vec, scorer=args.scorer, model=model, k=args.k)
    titles = {doc.id: doc.title for doc in docs}
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "rank": r.rank,
                        "score": r.score,
                        "doc_id": r.doc_id,
                        "title": titles[r.doc_id],
                    }
                    for r in results
                ]
            )
        )
        return 0
    print(f"{'rank':>4}  {'score':>6}  {'id':<8}  title")
    for r in results:
        print(f"{r.rank:>4}  {r.score:6.4f}  {r.doc_id:<8}  {titles[r.doc_id]}")
    return 0


def _cmd_eval(args) -> int:
    provider = _provider()
    model = _load_scorer_model(args)
    docs = load_corpus(args.corpus)
    judgments = load_gold(args.gold)
    cache = _open_cache(args.cache, provider.dim)
    index = build_index(docs, provider, cache)
    report = evaluate_run(
        index, judgments, provider, cache, scorer=args.scorer, model=model, k=args.k
    )
    if args.cache:
        cache.save(args.cache)
    if args.json:
        print(json.dumps(report_to_dict(report)))
    else:
        print(format_report(report))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_state, create_app, load_config, parse_listen

    cfg = load_config(args.config)
    state = build_state(cfg)
    host, port = parse_listen(cfg.get("listen", "127.0.0.1:8080"))
    app = create_app(state)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "train": _cmd_train,
    "search": _cmd_search,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"tinysearch: {exc}", file=sys.stderr)
        return 1
    except (TransportError, FormatError, DimensionMismatchError, OSError) as exc:
        print(f"tinysearch: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
