"""Indirect-supervision pipeline: abstractive summary, then NLI trace-back.

No labeled data and no trained bundle anywhere in this path. A provider
generates an abstractive summary of the post; an NLI provider then scores
each original sentence against that summary (premise = summary, hypothesis
= sentence), and a sentence is kept iff its entailment probability strictly
dominates both contradiction and neutral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from assort import stubs
from assort.ensemble import Summary


@dataclass(frozen=True)
class NliDistribution:
    entail: float
    contradict: float
    neutral: float

    def __post_init__(self):
        values = (self.entail, self.contradict, self.neutral)
        if any(v < 0 or v > 1 for v in values):
            raise ValueError(f"probabilities out of [0,1]: {values}")
        if not math.isclose(sum(values), 1.0, abs_tol=1e-6):
            raise ValueError(f"probabilities sum to {sum(values)!r}, not 1")

    def entail_dominates(self) -> bool:
        return self.entail > self.contradict and self.entail > self.neutral


@dataclass(frozen=True)
class AbstractiveSummary:
    text: str
    source_post_id: str
    provider: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("abstractive summary must be non-empty")


class StubSummarizer:
    """First three sentences of the input; deterministic, for offline tests."""

    identity = "stub-summarizer"
    max_input_tokens = 1_000_000

    def summarize(self, text: str, max_tokens: int):
        return stubs.stub_summary_text(text, max_sentences=3), self.identity


class StubNli:
    """Lexical-coverage NLI; see assort.stubs for the grading rules."""

    identity = "stub-nli"

    def classify(self, premise: str, hypotheses):
        return [stubs.stub_nli_probs(premise, h) for h in hypotheses]


class RemoteSummarizer:
    def __init__(self, gateway):
        self.gateway = gateway
        self.identity = "remote-summarizer"
        self.max_input_tokens = gateway.config.max_input_tokens

    def summarize(self, text: str, max_tokens: int):
        summary, model = self.gateway.summarize(text, max_tokens)
        return summary, model or self.identity


class RemoteNli:
    def __init__(self, gateway):
        self.gateway = gateway
        self.identity = "remote-nli"

    def classify(self, premise: str, hypotheses):
        return self.gateway.nli(premise, hypotheses)


def generate_summary(provider, post_text: str, max_length: int = 120, post_id: str = "") -> AbstractiveSummary:
    """Provider-generated abstractive summary of the post prose.

    Inputs longer than the provider's declared token budget are truncated
    from the front (leading sentences are kept).
    """
    if not post_text or not post_text.strip():
        raise ValueError("cannot summarize empty prose")
    budget = getattr(provider, "max_input_tokens", None)
    if budget:
        tokens = post_text.split()
        if len(tokens) > budget:
            post_text = " ".join(tokens[:budget])
    text, identity = provider.summarize(post_text, max_length)
    return AbstractiveSummary(text=text, source_post_id=post_id, provider=identity)


def select_entailed(nli_provider, summary: AbstractiveSummary, sentences) -> Summary:
    """Keep sentences whose entailment strictly dominates; ties are rejected."""
    if not sentences:
        raise ValueError("select_entailed requires at least one sentence")
    rows = nli_provider.classify(summary.text, [s.text for s in sentences])
    dists = [NliDistribution(*row) if not isinstance(row, NliDistribution) else row for row in rows]
    selected = tuple(i for i, d in enumerate(dists) if d.entail_dominates())
    scores = tuple(d.entail for d in dists)
    return Summary(post_id=summary.source_post_id, selected=selected, scores=scores)


def summarize_indirect(post, summarizer, nli, max_length: int = 120) -> Summary:
    """Full pipeline: abstractive summary, then entailment trace-back."""
    if not post.sentences:
        return Summary(post_id=post.id, selected=(), scores=())
    prose = " ".join(s.text for s in post.sentences)
    summary = generate_summary(summarizer, prose, max_length=max_length, post_id=post.id)
    return select_entailed(nli, summary, post.sentences)
