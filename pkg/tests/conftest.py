"""Shared fixtures: deterministic corpora and a throwaway encoder server."""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

import tinysearch
from tinysearch.embedder import hash_embed
from tinysearch.index import Document

_DATA = Path(tinysearch.__file__).parent / "data"
DEMO_CORPUS = str(_DATA / "demo_corpus.jsonl")
DEMO_GOLD = str(_DATA / "demo_gold.jsonl")


def alpha_corpus() -> list[Document]:
    """14 documents with hand-designed cosine scores against query "alpha".

    Token counts make the cosine of doc i against "alpha" equal to
    1/sqrt(i tokens) for d01..d05 and 0 for the rest, so the top-5 under
    the mock embedder is exactly d01..d05 in id order.
    """
    bodies = {
        "d01": "alpha",
        "d02": "alpha foxtrot",
        "d03": "alpha golf hotel",
        "d04": "alpha india juliet kilo",
        "d05": "alpha lima mike november oscar",
        "d06": "papa quebec",
        "d07": "romeo sierra",
        "d08": "tango uniform",
        "d09": "victor whiskey",
        "d10": "xray yankee",
        "d11": "zulu bingo",
        "d12": "casino dancer",
        "d13": "eagle falcon",
        "d14": "gander heron",
    }
    return [Document(id=doc_id, title="", body=body) for doc_id, body in bodies.items()]


def write_jsonl(path, rows) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return str(path)


def corpus_rows(docs: list[Document]) -> list[dict]:
    rows = []
    for doc in docs:
        row = {"id": doc.id, "title": doc.title, "body": doc.body}
        if doc.url is not None:
            row["url"] = doc.url
        rows.append(row)
    return rows


class _EncoderHandler(BaseHTTPRequestHandler):
    """Minimal encoder endpoint backed by hash_embed; counts requests."""

    def do_POST(self):
        server = self.server
        server.calls += 1
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        if self.path != "/encode":
            self.send_error(404)
            return
        if server.fail_with is not None:
            self.send_response(server.fail_with)
            self.end_headers()
            return
        dim = server.dim
        rows = [hash_embed(text, dim).tolist() for text in body["texts"]]
        payload = json.dumps({"dim": server.reported_dim or dim, "embeddings": rows})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload.encode("utf-8"))

    def log_message(self, *args):  # keep pytest output clean
        pass


class EncoderServer:
    def __init__(self, dim: int = 8):
        self.httpd = HTTPServer(("127.0.0.1", 0), _EncoderHandler)
        self.httpd.dim = dim
        self.httpd.calls = 0
        self.httpd.fail_with = None
        self.httpd.reported_dim = None
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    @property
    def calls(self) -> int:
        return self.httpd.calls

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def encoder_server():
    server = EncoderServer(dim=8)
    yield server
    server.close()
