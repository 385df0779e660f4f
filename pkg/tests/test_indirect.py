import random

import pytest

from assort.corpus import AnswerPost, Sentence, parse_post_html
from assort.indirect import (
    AbstractiveSummary,
    NliDistribution,
    StubNli,
    StubSummarizer,
    generate_summary,
    select_entailed,
    summarize_indirect,
)


def make_post(texts, post_id="p1"):
    sentences = [
        Sentence(index=i, text=t, total_in_post=len(texts)) for i, t in enumerate(texts)
    ]
    return AnswerPost(id=post_id, question_id="q1", sentences=sentences)


class TableNli:
    """Mock NLI provider answering from a fixed per-hypothesis table."""

    def __init__(self, table):
        self.table = table
        self.premises = []

    def classify(self, premise, hypotheses):
        self.premises.append(premise)
        return [self.table[h] for h in hypotheses]


class TestNliDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            NliDistribution(0.5, 0.4, 0.2)
        with pytest.raises(ValueError):
            NliDistribution(1.2, -0.1, -0.1)

    def test_dominance(self):
        assert NliDistribution(0.6, 0.2, 0.2).entail_dominates()
        assert not NliDistribution(0.3, 0.4, 0.3).entail_dominates()
        assert not NliDistribution(0.4, 0.4, 0.2).entail_dominates()  # tie rejected


class TestGenerateSummary:
    def test_stub_takes_first_three_sentences(self):
        post = make_post(["One a.", "Two b.", "Three c.", "Four d.", "Five e."])
        prose = " ".join(s.text for s in post.sentences)
        summary = generate_summary(StubSummarizer(), prose, post_id=post.id)
        assert summary.text == "One a. Two b. Three c."
        assert summary.source_post_id == "p1"
        assert summary.provider == "stub-summarizer"

    def test_empty_prose_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            generate_summary(StubSummarizer(), "   ")

    def test_front_truncation_to_provider_budget(self):
        class TinyBudget:
            identity = "tiny"
            max_input_tokens = 4

            def __init__(self):
                self.received = None

            def summarize(self, text, max_tokens):
                self.received = text
                return text, self.identity

        provider = TinyBudget()
        generate_summary(provider, "one two three four five six")
        assert provider.received == "one two three four"


class TestSelectEntailed:
    def test_strict_dominance_selection(self):
        table = {
            "A.": (0.6, 0.2, 0.2),   # selected
            "B.": (0.3, 0.4, 0.3),   # not selected
            "C.": (0.4, 0.4, 0.2),   # tie -> not selected
        }
        post = make_post(list(table))
        summary = AbstractiveSummary(text="s", source_post_id="p1", provider="mock")
        result = select_entailed(TableNli(table), summary, post.sentences)
        assert result.selected == (0,)
        assert result.scores == (0.6, 0.3, 0.4)

    def test_mocked_entail_dominant_indices(self):
        texts = ["S0.", "S1.", "S2."]
        table = {
            "S0.": (0.8, 0.1, 0.1),
            "S1.": (0.2, 0.3, 0.5),
            "S2.": (0.5, 0.2, 0.3),
        }
        post = make_post(texts)
        summary = AbstractiveSummary(text="s", source_post_id="p1", provider="mock")
        result = select_entailed(TableNli(table), summary, post.sentences)
        assert result.selected == (0, 2)

    def test_premise_is_summary_text(self):
        table = {"A.": (0.6, 0.2, 0.2)}
        nli = TableNli(table)
        summary = AbstractiveSummary(text="the premise", source_post_id="p", provider="m")
        select_entailed(nli, summary, make_post(["A."]).sentences)
        assert nli.premises == ["the premise"]

    def test_brute_force_oracle_including_ties(self):
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(1, 12)
            texts = [f"sentence {i}." for i in range(n)]
            table = {}
            for t in texts:
                if rng.random() < 0.3:  # force exact ties often
                    e = round(rng.uniform(0.2, 0.4), 2)
                    table[t] = (e, e, round(1.0 - 2 * e, 10))
                else:
                    raw = [rng.random() + 1e-6 for _ in range(3)]
                    total = sum(raw)
                    table[t] = tuple(v / total for v in raw)
            post = make_post(texts)
            summary = AbstractiveSummary(text="s", source_post_id="p", provider="m")
            result = select_entailed(TableNli(table), summary, post.sentences)
            expected = tuple(
                i
                for i, t in enumerate(texts)
                if table[t][0] > table[t][1] and table[t][0] > table[t][2]
            )
            assert result.selected == expected

    def test_requires_sentences(self):
        summary = AbstractiveSummary(text="s", source_post_id="p", provider="m")
        with pytest.raises(ValueError):
            select_entailed(TableNli({}), summary, [])


class TestSummarizeIndirect:
    def test_empty_entailed_set(self):
        post = make_post(["Alpha beta.", "Gamma delta."])

        class NeverEntail:
            def classify(self, premise, hypotheses):
                return [(0.1, 0.2, 0.7)] * len(hypotheses)

        result = summarize_indirect(post, StubSummarizer(), NeverEntail())
        assert result.selected == ()
        assert len(result.scores) == 2

    def test_selected_subset_ascending(self, fixture_corpus):
        nli = StubNli()
        summarizer = StubSummarizer()
        for post in fixture_corpus.posts[:10]:
            result = summarize_indirect(post, summarizer, nli)
            assert list(result.selected) == sorted(set(result.selected))
            assert all(0 <= i < len(post.sentences) for i in result.selected)
            assert len(result.scores) == len(post.sentences)

    def test_stub_pipeline_entails_leading_sentences(self):
        post = make_post(
            ["Install the tool.", "Run the tool.", "Enjoy the tool.", "Completely unrelated chatter."]
        )
        result = summarize_indirect(post, StubSummarizer(), StubNli())
        # first three sentences are the stub summary itself -> fully covered
        assert set(result.selected) >= {0, 1, 2}
        assert 3 not in result.selected

    def test_uses_no_labeled_data(self):
        # posts with no gold labels work identically
        post = make_post(["Plain one.", "Plain two."])
        assert post.gold_summary is None
        result = summarize_indirect(post, StubSummarizer(), StubNli())
        assert len(result.scores) == 2


class TestStubNliSanity:
    def test_hypernym_pair_entails(self):
        probs = StubNli().classify("a boy ate an apple", ["a kid ate a fruit"])[0]
        assert probs[0] > probs[1] and probs[0] > probs[2]

    def test_sibling_term_does_not_entail(self):
        probs = StubNli().classify("a boy ate an apple", ["a kid ate a banana"])[0]
        assert not (probs[0] > probs[1] and probs[0] > probs[2])
