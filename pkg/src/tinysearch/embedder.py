"""Embedding providers and the persistent embedding cache.

Texts are mapped to fixed-length vectors either by a remote encoder
service (POST {endpoint}/encode) or by a deterministic local mock built
on the hashing trick, so the rest of the pipeline never needs network
access. Vectors are memoized in an :class:`EmbeddingCache` keyed by a
64-bit FNV-1a hash of the exact text bytes and persisted as JSONL.
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass

import numpy as np
import requests

from .errors import (
    CacheFormatError,
    DimensionMismatchError,
    TransportError,
    ValidationError,
)

DEFAULT_DIM = 768
ENCODER_URL_ENV = "TINYSEARCH_ENCODER_URL"

CACHE_FORMAT = "tinysearch-embcache"
CACHE_VERSION = 1

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1
_SIGN_BIT = 1 << 63


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def text_key(text: str) -> str:
    """Cache key for a text: FNV-1a of its UTF-8 bytes as 16 hex chars."""
    return format(fnv1a64(text.encode("utf-8")), "016x")


def hash_embed(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Deterministic bag-of-words embedding via the hashing trick.

    Tokens are the lowercased whitespace-split words. Each token adds
    +1 or -1 (sign taken from the top bit of its 64-bit FNV-1a hash) to
    component ``hash mod dim``. The accumulated vector is L2-normalized;
    text with no tokens maps to the all-zero vector.
    """
    if dim < 1:
        raise ValidationError(f"embedding dim must be >= 1, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for token in text.lower().split():
        h = fnv1a64(token.encode("utf-8"))
        vec[h % dim] += 1.0 if h < _SIGN_BIT else -1.0
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


@dataclass
class ProviderConfig:
    """Where embeddings come from: the remote encoder or the local mock."""

    kind: str = "mock"  # "mock" | "remote"
    endpoint: str = ""
    timeout_ms: int = 10_000
    dim: int = DEFAULT_DIM

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "remote"):
            raise ValidationError(f"unknown provider kind {self.kind!r}")
        if self.dim < 1:
            raise ValidationError(f"embedding dim must be >= 1, got {self.dim}")
        if self.timeout_ms <= 0:
            raise ValidationError("timeout_ms must be positive")

    def resolved_endpoint(self) -> str:
        """Endpoint after applying the TINYSEARCH_ENCODER_URL override."""
        return os.environ.get(ENCODER_URL_ENV) or self.endpoint


class EmbeddingCache:
    """Text -> vector memo with a JSONL on-disk form.

    Reads are lock-free; writes are serialized through a single lock.
    save() goes through a temp file + rename so a crash never leaves a
    partially written cache behind.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValidationError(f"embedding dim must be >= 1, got {dim}")
        self.dim = dim
        self._entries: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, text: str) -> bool:
        return text_key(text) in self._entries

    def get(self, text: str) -> np.ndarray | None:
        return self._entries.get(text_key(text))

    def put(self, text: str, vector: np.ndarray) -> None:
        self._put_key(text_key(text), np.asarray(vector, dtype=np.float64))

    def _put_key(self, key: str, vector: np.ndarray) -> None:
        if vector.shape != (self.dim,):
            raise DimensionMismatchError(
                f"cache holds {self.dim}-vectors, got shape {vector.shape}"
            )
        with self._lock:
            self._entries[key] = vector

    def save(self, path: str) -> None:
        header = {"format": CACHE_FORMAT, "version": CACHE_VERSION, "dim": self.dim}
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(header) + "\n")
                for key in sorted(self._entries):
                    entry = {"key": key, "values": self._entries[key].tolist()}
                    fh.write(json.dumps(entry) + "\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str, expected_dim: int | None = None) -> "EmbeddingCache":
        with open(path, "r", encoding="utf-8") as fh:
            header_line = fh.readline()
            if not header_line.strip():
                raise CacheFormatError(f"{path}: line 1: missing header line")
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError as exc:
                raise CacheFormatError(f"{path}: line 1: bad header: {exc}") from exc
            if not isinstance(header, dict) or header.get("format") != CACHE_FORMAT:
                raise CacheFormatError(f"{path}: line 1: not a {CACHE_FORMAT} file")
            if header.get("version") != CACHE_VERSION:
                raise CacheFormatError(
                    f"{path}: line 1: unsupported version {header.get('version')!r}"
                )
            dim = header.get("dim")
            if not isinstance(dim, int) or dim < 1:
                raise CacheFormatError(f"{path}: line 1: bad dim {dim!r}")
            if expected_dim is not None and dim != expected_dim:
                raise DimensionMismatchError(
                    f"{path}: cache dim {dim} != configured dim {expected_dim}"
                )
            cache = cls(dim)
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    key, values = entry["key"], entry["values"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise CacheFormatError(f"{path}: line {lineno}: {exc}") from exc
                vector = np.asarray(values, dtype=np.float64)
                if vector.shape != (dim,):
                    raise CacheFormatError(
                        f"{path}: line {lineno}: vector length {vector.size} != dim {dim}"
                    )
                cache._put_key(key, vector)
        return cache


def _fetch_remote(texts: list[str], config: ProviderConfig, endpoint: str) -> list[np.ndarray]:
    url = endpoint.rstrip("/") + "/encode"
    try:
        resp = requests.post(
            url, json={"texts": texts}, timeout=config.timeout_ms / 1000.0
        )
    except requests.RequestException as exc:
        raise TransportError(f"encoder at {endpoint} unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise TransportError(f"encoder at {endpoint} returned HTTP {resp.status_code}")
    try:
        payload = resp.json()
        dim = payload["dim"]
        rows = payload["embeddings"]
    except (ValueError, KeyError, TypeError) as exc:
        raise TransportError(f"encoder at {endpoint} sent a malformed response: {exc}") from exc
    if dim != config.dim:
        raise DimensionMismatchError(
            f"encoder at {endpoint} returned dim {dim}, expected {config.dim}"
        )
    if not isinstance(rows, list) or len(rows) != len(texts):
        raise TransportError(
            f"encoder at {endpoint} returned {len(rows) if isinstance(rows, list) else '?'} "
            f"embeddings for {len(texts)} texts"
        )
    vectors = []
    for row in rows:
        vector = np.asarray(row, dtype=np.float64)
        if vector.shape != (config.dim,):
            raise DimensionMismatchError(
                f"encoder at {endpoint} returned a vector of length {vector.size}, "
                f"expected {config.dim}"
            )
        if not np.all(np.isfinite(vector)):
            raise TransportError(f"encoder at {endpoint} returned non-finite values")
        vectors.append(vector)
    return vectors


def embed_batch(
    texts: list[str],
    config: ProviderConfig,
    cache: EmbeddingCache | None = None,
) -> list[np.ndarray]:
    """Embed texts in order, serving repeats and cached texts for free.

    Cache misses are fetched in one provider round trip (or mock-computed)
    and validated before anything is stored, so a failed batch never
    leaves partial cache writes behind.
    """
    if cache is not None and cache.dim != config.dim:
        raise DimensionMismatchError(
            f"cache dim {cache.dim} != provider dim {config.dim}"
        )
    if not texts:
        return []

    misses: list[str] = []
    seen: set[str] = set()
    for text in texts:
        key = text_key(text)
        if key in seen:
            continue
        if cache is not None and cache.get(text) is not None:
            continue
        seen.add(key)
        misses.append(text)

    fetched: dict[str, np.ndarray] = {}
    if misses:
        if config.kind == "mock":
            vectors = [hash_embed(text, config.dim) for text in misses]
        else:
            endpoint = config.resolved_endpoint()
            if not endpoint:
                raise ValidationError("remote provider requires a non-empty endpoint")
            vectors = _fetch_remote(misses, config, endpoint)
        fetched = {text_key(t): v for t, v in zip(misses, vectors)}
        if cache is not None:
            for key, vector in fetched.items():
                cache._put_key(key, vector)

    out: list[np.ndarray] = []
    for text in texts:
        vector = cache.get(text) if cache is not None else None
        if vector is None:
            vector = fetched[text_key(text)]
        out.append(vector)
    return out
