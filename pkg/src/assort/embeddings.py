"""Sentence embedding providers: deterministic stub, precomputed file, remote.

All providers expose the same surface: ``embed(texts)`` returning one
float64 vector per input text (order-preserving), a ``dimension``, and a
``fingerprint`` identifying the backing so trained bundles can refuse
mismatched embeddings at load time.

The stub is a pure function of (seed, token multiset, dimension): token
directions are derived from SHA-256 in counter mode, summed in sorted token
order, and unit-normalized. The inference sidecar reproduces the same
construction bit-for-bit in its stub mode.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class EmbeddingError(RuntimeError):
    pass


_STUB_TOKEN_RE = re.compile(r"[a-z0-9_]+")


def _token_direction(token: str, dim: int, seed: int) -> np.ndarray:
    material = f"{seed}|{token}".encode("utf-8")
    values = np.empty(dim)
    i = 0
    block = 0
    while i < dim:
        digest = hashlib.sha256(material + b"|" + str(block).encode("ascii")).digest()
        for offset in range(0, 32, 8):
            if i >= dim:
                break
            word = int.from_bytes(digest[offset : offset + 8], "big")
            values[i] = word / 2.0**64 * 2.0 - 1.0
            i += 1
        block += 1
    return values


def stub_embedding(text: str, dim: int, seed: int) -> np.ndarray:
    """Seeded hash of the token multiset expanded to ``dim`` dims, unit-normalized."""
    tokens = _STUB_TOKEN_RE.findall(text.lower()) or [""]
    vec = np.zeros(dim)
    for token, count in sorted(Counter(tokens).items()):
        vec += count * _token_direction(token, dim, seed)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class EmbeddingProviderConfig:
    backing: str = "stub"  # stub | file | remote
    dimension: int = 768
    seed: int = 0
    file_path: str = ""
    cache_path: str = ""


class StubEmbeddingProvider:
    def __init__(self, dimension: int = 768, seed: int = 0):
        self.dimension = dimension
        self.seed = seed
        self._memo: dict[str, np.ndarray] = {}

    @property
    def fingerprint(self) -> str:
        return f"stub:dim={self.dimension}:seed={self.seed}"

    def embed(self, texts) -> list[np.ndarray]:
        if not texts:
            raise EmbeddingError("embed() requires at least one text")
        out = []
        for text in texts:
            vec = self._memo.get(text)
            if vec is None:
                vec = stub_embedding(text, self.dimension, self.seed)
                self._memo[text] = vec
            out.append(vec)
        return out

    def warm(self, texts) -> int:
        return 0


# ---------------------------------------------------------------------------
# Disk cache shared by the file and remote backings
# ---------------------------------------------------------------------------

class VectorCache:
    """Append-only JSONL store of (text digest -> vector), header pins dim/backing."""

    def __init__(self, path, dimension: int, backing: str):
        self.path = Path(path)
        self.dimension = dimension
        self.backing = backing
        self.vectors: dict[str, np.ndarray] = {}
        if self.path.exists():
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", encoding="utf-8") as handle:
                handle.write(
                    json.dumps({"kind": "header", "dim": dimension, "backing": backing})
                    + "\n"
                )

    def _load(self):
        with open(self.path, encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            if header.get("kind") != "header":
                raise EmbeddingError(f"{self.path}: missing cache header")
            if header.get("dim") != self.dimension:
                raise EmbeddingError(
                    f"{self.path}: cache dimension {header.get('dim')} != configured {self.dimension}"
                )
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                self.vectors[record["digest"]] = np.asarray(record["values"], dtype=np.float64)

    def put(self, digest: str, vector: np.ndarray):
        self.vectors[digest] = np.asarray(vector, dtype=np.float64)
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(
                json.dumps({"kind": "vec", "digest": digest, "values": [float(v) for v in vector]})
                + "\n"
            )


class FileEmbeddingProvider:
    """Exact lookup of precomputed vectors by text digest; misses are errors."""

    def __init__(self, path, dimension: int = 768):
        self.dimension = dimension
        self._cache = VectorCache(path, dimension, backing="file")
        self._backing_id = self._read_backing(path)

    @staticmethod
    def _read_backing(path) -> str:
        with open(path, encoding="utf-8") as handle:
            return json.loads(handle.readline()).get("backing", "file")

    @property
    def fingerprint(self) -> str:
        return f"file:{self._backing_id}:dim={self.dimension}"

    def embed(self, texts) -> list[np.ndarray]:
        if not texts:
            raise EmbeddingError("embed() requires at least one text")
        out = []
        for text in texts:
            digest = text_digest(text)
            vec = self._cache.vectors.get(digest)
            if vec is None:
                raise EmbeddingError(f"no precomputed embedding for digest {digest}")
            out.append(vec)
        return out

    def warm(self, texts) -> int:
        missing = [text_digest(t) for t in texts if text_digest(t) not in self._cache.vectors]
        if missing:
            raise EmbeddingError(f"no precomputed embedding for digest {missing[0]}")
        return 0


class RemoteEmbeddingProvider:
    """Gateway-backed embeddings with an on-disk cache."""

    def __init__(self, gateway, dimension: int = 768, cache_path=None):
        self.gateway = gateway
        self.dimension = dimension
        self._model_id: str | None = None
        self._cache = (
            VectorCache(cache_path, dimension, backing="remote") if cache_path else None
        )
        self._memo: dict[str, np.ndarray] = {}

    @property
    def fingerprint(self) -> str:
        model = self._model_id or "unresolved"
        return f"remote:{model}:dim={self.dimension}"

    def _lookup(self, digest):
        if digest in self._memo:
            return self._memo[digest]
        if self._cache is not None:
            return self._cache.vectors.get(digest)
        return None

    def embed(self, texts) -> list[np.ndarray]:
        if not texts:
            raise EmbeddingError("embed() requires at least one text")
        digests = [text_digest(t) for t in texts]
        missing = [i for i, d in enumerate(digests) if self._lookup(d) is None]
        if missing:
            vectors, model = self.gateway.embed([texts[i] for i in missing])
            if model:
                self._model_id = model
            for i, vec in zip(missing, vectors):
                if len(vec) != self.dimension:
                    raise EmbeddingError(
                        f"remote returned dim {len(vec)}, configured {self.dimension}"
                    )
                self._memo[digests[i]] = vec
                if self._cache is not None:
                    self._cache.put(digests[i], vec)
        return [self._lookup(d) for d in digests]

    def warm(self, texts) -> int:
        new = [t for t in texts if self._lookup(text_digest(t)) is None]
        # dedupe preserving order
        seen, todo = set(), []
        for t in new:
            d = text_digest(t)
            if d not in seen:
                seen.add(d)
                todo.append(t)
        if todo:
            self.embed(todo)
        return len(todo)


def make_provider(config: EmbeddingProviderConfig, gateway=None):
    if config.backing == "stub":
        return StubEmbeddingProvider(dimension=config.dimension, seed=config.seed)
    if config.backing == "file":
        if not config.file_path:
            raise EmbeddingError("file backing requires a file path")
        return FileEmbeddingProvider(config.file_path, dimension=config.dimension)
    if config.backing == "remote":
        if gateway is None:
            raise EmbeddingError("remote backing requires a gateway client")
        return RemoteEmbeddingProvider(
            gateway, dimension=config.dimension, cache_path=config.cache_path or None
        )
    raise EmbeddingError(f"unknown embedding backing {config.backing!r}")


def warm_cache(provider, corpus) -> int:
    """Ensure every corpus sentence is embeddable without further remote calls."""
    texts = [s.text for post in corpus.posts for s in post.sentences]
    return provider.warm(texts)
