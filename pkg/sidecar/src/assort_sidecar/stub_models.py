"""Deterministic stub models: no downloads, bit-stable across restarts.

The embedding stub is the wire-contract twin of the client-side stub
provider: token directions from SHA-256 in counter mode, summed in sorted
token order over the token multiset, unit-normalized. Keep the constants
and relation tables in sync with the core package; the conformance tests
assert bit-identity.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter

import numpy as np

_TOKEN_RE = re.compile(r"[a-z0-9_]+")
_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.?!])\s+")

STOPWORDS = frozenset(
    "a an the of to in on at for and or is are was were be been it its this that".split()
)

ENTAILMENT_PAIRS = frozenset(
    [
        ("boy", "kid"),
        ("girl", "kid"),
        ("boy", "child"),
        ("girl", "child"),
        ("man", "person"),
        ("woman", "person"),
        ("apple", "fruit"),
        ("banana", "fruit"),
        ("orange", "fruit"),
        ("dog", "animal"),
        ("cat", "animal"),
        ("car", "vehicle"),
        ("ate", "eat"),
        ("eats", "eat"),
    ]
)

CONFLICT_PAIRS = frozenset(
    [
        ("apple", "banana"),
        ("apple", "orange"),
        ("banana", "orange"),
        ("dog", "cat"),
        ("boy", "girl"),
        ("man", "woman"),
        ("fast", "slow"),
        ("faster", "slower"),
    ]
)


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
    tokens = _TOKEN_RE.findall(text.lower()) or [""]
    vec = np.zeros(dim)
    for token, count in sorted(Counter(tokens).items()):
        vec += count * _token_direction(token, dim, seed)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


def stub_summary(text: str, max_sentences: int = 3) -> str:
    sentences = [s for s in _SENTENCE_BOUNDARY_RE.split(text.strip()) if s]
    return " ".join(sentences[:max_sentences])


def _content_tokens(text: str) -> set:
    return {t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS}


def stub_nli(premise: str, hypothesis: str) -> tuple[float, float, float]:
    """(entail, contradict, neutral) from lexical coverage with a small
    hypernym/sibling table; sums exactly to 1."""
    premise_tokens = _content_tokens(premise)
    hypothesis_tokens = _content_tokens(hypothesis)
    if not hypothesis_tokens:
        return (0.2, 0.2, 0.6)

    covered = 0
    conflict = False
    for token in sorted(hypothesis_tokens):
        if token in premise_tokens or any(
            (p, token) in ENTAILMENT_PAIRS for p in premise_tokens
        ):
            covered += 1
            continue
        if any(
            (p, token) in CONFLICT_PAIRS or (token, p) in CONFLICT_PAIRS
            for p in premise_tokens
        ):
            conflict = True
    fraction = covered / len(hypothesis_tokens)

    if conflict:
        return (0.1, 0.6, 0.3)
    if fraction == 1.0:
        return (0.7, 0.1, 0.2)
    entail = 0.1 + 0.3 * fraction
    contradict = 0.1
    return (entail, contradict, 1.0 - entail - contradict)


class StubModels:
    """Provider trio used when the service runs with --stub."""

    def __init__(self, dimension: int = 768, seed: int = 0):
        self.dimension = dimension
        self.seed = seed
        self.identities = {
            "embedder": "stub-embedder",
            "summarizer": "stub-summarizer",
            "nli": "stub-nli",
        }

    def embed(self, texts):
        return [stub_embedding(t, self.dimension, self.seed).tolist() for t in texts]

    def summarize(self, text, max_tokens):
        return stub_summary(text)

    def nli(self, premise, hypotheses):
        return [list(stub_nli(premise, h)) for h in hypotheses]
