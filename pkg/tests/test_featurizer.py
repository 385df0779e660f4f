import numpy as np
import pytest

from assort.corpus import QuestionRecord, Sentence, parse_post_html
from assort.featurizer import (
    LINGUISTIC_PATTERNS,
    N_DOMAIN_FEATURES,
    N_PATTERNS,
    EntityLexicon,
    Lexicons,
    build_domain_features,
    build_entity_lexicon,
    detect_comparative,
    detect_imperative,
    detect_superlative,
    entity_overlap,
    match_linguistic_patterns,
    structural_features,
    stylistic_features,
)


def make_sentence(text, **kwargs):
    defaults = dict(index=0, total_in_post=1)
    defaults.update(kwargs)
    return Sentence(text=text, **defaults)


class TestEntityOverlap:
    q = QuestionRecord(id="1", title="Differences between HashMap and a Hashtable?",
                       tags=["hashmap", "hashtable"])

    def test_full_overlap(self):
        assert entity_overlap(self.q, "Both HashMap and Hashtable do the job.") == 1.0

    def test_half_overlap(self):
        # E_q = {hashmap, hashtable}; sentence mentions only hashmap -> 1/2
        assert entity_overlap(self.q, "A HashMap is usually enough.") == 0.5

    def test_empty_lexicon_yields_zero(self):
        bare = QuestionRecord(id="2", title="why is it slow", tags=[])
        assert entity_overlap(bare, "Because of the allocator.") == 0.0

    def test_token_boundaries(self):
        q = QuestionRecord(id="3", title="about tests", tags=["test"])
        assert entity_overlap(q, "the fastest path wins") == 0.0
        assert entity_overlap(q, "write a test first") == 1.0

    def test_case_insensitive(self):
        assert entity_overlap(self.q, "HASHMAP and hashtable") == 1.0

    def test_custom_builder(self):
        builder = lambda q: EntityLexicon(entities=frozenset({"widget"}))
        assert entity_overlap(self.q, "the widget spins", builder) == 1.0

    def test_lexicon_from_title_identifiers(self):
        q = QuestionRecord(id="4", title="Why does foo_bar and myFunc() differ?", tags=[])
        lexicon = build_entity_lexicon(q)
        assert "foo_bar" in lexicon.entities
        assert "myfunc" in lexicon.entities

    def test_dashed_tag_variant(self):
        q = QuestionRecord(id="5", title="t", tags=["visual-studio"])
        assert entity_overlap(q, "Open Visual Studio first.") == 0.5


class TestComparative:
    def test_canonical_example(self):
        assert detect_comparative(
            "the stack is faster because all free memory is always contiguous"
        ) == 1

    def test_plain_sentence(self):
        assert detect_comparative("use the stack") == 0

    def test_er_exclusions(self):
        assert detect_comparative("her answer") == 0
        assert detect_comparative("ask the server for a number") == 0

    def test_irregulars(self):
        assert detect_comparative("this is better in every way") == 1

    def test_short_er_words_skipped(self):
        assert detect_comparative("per the docs") == 0


class TestSuperlative:
    def test_canonical_example(self):
        assert detect_superlative(
            "there is no doubt that application/json is the best MIME type for a JSON response"
        ) == 1

    def test_substring_safe(self):
        assert detect_superlative("a test case") == 0

    def test_est_rule(self):
        assert detect_superlative("the fastest path") == 1

    def test_irregulars(self):
        assert detect_superlative("the worst part is the api") == 1
        assert detect_superlative("most people agree") == 1


class TestImperative:
    def test_canonical_example(self):
        assert detect_imperative("use git revert commit-id") == 1

    def test_subject_present(self):
        assert detect_imperative("you should use git revert") == 0

    def test_adverb_skip(self):
        assert detect_imperative("Then, run the migration.") == 1
        assert detect_imperative("Alternatively, use Map.") == 1

    def test_determiner_blocks(self):
        assert detect_imperative("The run was slow.") == 0

    def test_unknown_verb(self):
        assert detect_imperative("cats sleep all day") == 0

    def test_empty_after_skips(self):
        assert detect_imperative("Then, however, finally.") == 0


class TestPatterns:
    def test_however_first_dim(self):
        flags = match_linguistic_patterns("However, this breaks on Windows.")
        assert flags[0] == 1
        assert sum(flags) == 1

    def test_not_sentence_initial(self):
        assert sum(match_linguistic_patterns("It is, however, fine.")) == 0

    def test_case_insensitive_dim16(self):
        flags = match_linguistic_patterns("on the other hand, it works.")
        assert flags[15] == 1  # dim 16, 1-indexed

    def test_below_is_prefix_without_comma(self):
        flags = match_linguistic_patterns("Below is the full trace")
        assert flags[16] == 1

    def test_pattern_count(self):
        assert len(LINGUISTIC_PATTERNS) == 19 == N_PATTERNS


class TestStructural:
    def test_first_of_five(self):
        s = make_sentence("a", index=0, total_in_post=5)
        assert structural_features(s) == (0.0, 0)

    def test_middle_of_five(self):
        s = make_sentence("a", index=2, total_in_post=5)
        position, _ = structural_features(s)
        assert position == 0.5

    def test_single_sentence_post(self):
        s = make_sentence("a", index=0, total_in_post=1)
        assert structural_features(s)[0] == 0.0

    def test_code_adjacency_flag(self):
        s = make_sentence("a", precedes_code_block=True)
        assert structural_features(s)[1] == 1


class TestStylistic:
    def test_passthrough(self):
        s = make_sentence("a", has_inline_code=True, is_bold=True, is_list_item_first=True)
        assert stylistic_features(s) == (1, 1, 1)


class TestBuildDomainFeatures:
    q = QuestionRecord(id="1", title="How to pick a Map?", tags=["map"])

    def test_neutral_sentence_only_position(self):
        s = make_sentence("Nothing special about this one", index=2, total_in_post=5)
        vec = build_domain_features(self.q, s).to_vector()
        assert vec[N_PATTERNS + 4] == 0.5  # position slot
        others = np.delete(vec, N_PATTERNS + 4)
        assert np.all(others == 0.0)

    def test_composed_detectors(self):
        html = "<ul><li>Alternatively, use <code>Map</code>.</li></ul>"
        sentence = parse_post_html(html)[0]
        features = build_domain_features(self.q, sentence)
        assert features.pattern_flags[7] == 1  # "Alternatively," is dim 8
        assert features.is_imperative == 1
        assert features.inline_code == 1
        assert features.list_step == 1
        assert features.entity_overlap == 1.0

    def test_layout_stable(self):
        s = make_sentence("Use the map.", index=1, total_in_post=3)
        a = build_domain_features(self.q, s).to_vector()
        b = build_domain_features(self.q, s).to_vector()
        assert a.shape == (N_DOMAIN_FEATURES,) == (28,)
        assert np.array_equal(a, b)

    def test_all_values_in_unit_interval(self, fixture_corpus):
        for post in fixture_corpus.posts[:10]:
            question = fixture_corpus.question_for(post)
            for sentence in post.sentences:
                vec = build_domain_features(question, sentence).to_vector()
                assert np.all(vec >= 0.0) and np.all(vec <= 1.0)
                binary = np.concatenate([vec[:N_PATTERNS], vec[N_PATTERNS + 1 : N_PATTERNS + 4],
                                         vec[N_PATTERNS + 5 :]])
                assert set(np.unique(binary)) <= {0.0, 1.0}


def test_lexicon_override(tmp_path):
    contents = {
        "imperative_verbs": "frobnicate\n",
        "imperative_skip_words": "meanwhile\n",
        "comparative_irregulars": "\n",
        "comparative_exclusions": "\n",
        "superlative_irregulars": "\n",
        "superlative_exclusions": "\n",
    }
    for name, text in contents.items():
        (tmp_path / f"{name}.txt").write_text(text)
    lex = Lexicons.load(tmp_path)
    assert detect_imperative("Meanwhile, frobnicate the widget", lex) == 1
    assert detect_imperative("use the widget", lex) == 0
