"""Deterministic stand-ins for the three pretrained-model capabilities.

These definitions are the offline test contract: the inference sidecar's
stub mode reproduces the same algorithms so integration tests can run
without model downloads. Keep the embedding stub bit-compatible with
``assort.embeddings.stub_embedding`` (it is re-exported from there).

The NLI stub grades lexical coverage of the hypothesis by the premise,
with a small word-relation table so hypernym rewordings count as covered
and sibling terms count as conflicts.
"""

from __future__ import annotations

import re

from assort.embeddings import stub_embedding  # noqa: F401  (re-export, shared contract)

_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.?!])\s+")
_TOKEN_RE = re.compile(r"[a-z0-9_]+")

STOPWORDS = frozenset(
    "a an the of to in on at for and or is are was were be been it its this that".split()
)

# hyponym -> hypernym: a premise mentioning the left term covers a
# hypothesis mentioning the right term.
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

# sibling or antonym terms: a hypothesis term conflicting with a premise term.
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


def split_plain_sentences(text: str) -> list[str]:
    """Terminal-punctuation splitter used by the summarizer stub."""
    return [s for s in _SENTENCE_BOUNDARY_RE.split(text.strip()) if s]


def stub_summary_text(text: str, max_sentences: int = 3) -> str:
    """First ``max_sentences`` sentences of the input, joined by single spaces."""
    sentences = split_plain_sentences(text)
    return " ".join(sentences[:max_sentences])


def _content_tokens(text: str) -> set[str]:
    return {t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS}


def stub_nli_probs(premise: str, hypothesis: str) -> tuple[float, float, float]:
    """(entail, contradict, neutral), summing exactly to 1.

    Full coverage of the hypothesis content tokens -> entail dominates;
    an uncovered token in conflict with a premise token -> contradiction
    dominates; otherwise neutral dominates, with entailment mass growing
    in the covered fraction.
    """
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
