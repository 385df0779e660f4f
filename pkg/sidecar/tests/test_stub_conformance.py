"""Cross-component conformance: the sidecar's stub mode must reproduce the
core package's stub providers bit-for-bit (the two implementations share a
wire contract, not code)."""

import numpy as np
import pytest

assort_embeddings = pytest.importorskip(
    "assort.embeddings", reason="core package required for the cross-component check"
)

from assort import stubs as core_stubs  # noqa: E402
from assort_sidecar import stub_models  # noqa: E402


def make_sentences(n=100):
    subjects = ["the cache", "a worker", "my compiler", "the scheduler", "this parser"]
    verbs = ["drops", "retries", "rewrites", "batches", "inspects"]
    objects = ["every request", "the config file", "stale entries", "those tokens", "each frame"]
    sentences = []
    i = 0
    while len(sentences) < n:
        sentences.append(
            f"{subjects[i % 5]} {verbs[(i // 5) % 5]} {objects[(i // 25) % 5]} number {i}."
        )
        i += 1
    return sentences


class TestEmbeddingBitIdentity:
    def test_100_sentences_bit_identical(self, client):
        sentences = make_sentences(100)
        provider = assort_embeddings.StubEmbeddingProvider(dimension=768, seed=0)
        core_vectors = provider.embed(sentences)

        body = client.post("/v1/embed", json={"texts": sentences}).json()
        assert body["dim"] == 768
        for core_vec, wire_vec in zip(core_vectors, body["vectors"]):
            assert np.array_equal(core_vec, np.asarray(wire_vec)), "stub embeddings diverged"

    def test_function_level_identity(self):
        for text in ("", "plain", "Repeated repeated REPEATED tokens", "punct!!! only???"):
            a = core_stubs.stub_embedding(text, 64, 3)
            b = stub_models.stub_embedding(text, 64, 3)
            assert np.array_equal(a, b)


class TestNliConformance:
    def test_relation_tables_in_sync(self):
        assert core_stubs.ENTAILMENT_PAIRS == stub_models.ENTAILMENT_PAIRS
        assert core_stubs.CONFLICT_PAIRS == stub_models.CONFLICT_PAIRS
        assert core_stubs.STOPWORDS == stub_models.STOPWORDS

    def test_nli_probs_match_core(self):
        cases = [
            ("a boy ate an apple", "a kid ate a fruit"),
            ("a boy ate an apple", "a kid ate a banana"),
            ("install the tool", "install the tool"),
            ("alpha beta gamma", "delta epsilon"),
        ]
        for premise, hypothesis in cases:
            assert core_stubs.stub_nli_probs(premise, hypothesis) == stub_models.stub_nli(
                premise, hypothesis
            )

    def test_sanity_pair_entailment(self, client):
        # hypernym rewording is entailed...
        body = client.post(
            "/v1/nli",
            json={"premise": "a boy ate an apple", "hypotheses": ["a kid ate a fruit"]},
        ).json()
        entail, contradict, neutral = body["probs"][0]
        assert entail > contradict and entail > neutral

        # ...a sibling term is not
        body = client.post(
            "/v1/nli",
            json={"premise": "a boy ate an apple", "hypotheses": ["a kid ate a banana"]},
        ).json()
        entail, contradict, neutral = body["probs"][0]
        assert not (entail > contradict and entail > neutral)


class TestSummarizerConformance:
    def test_summary_matches_core_stub(self, client):
        text = "One here. Two there. Three everywhere. Four nowhere. Five somewhere."
        body = client.post("/v1/summarize", json={"text": text}).json()
        assert body["summary"] == core_stubs.stub_summary_text(text)
