"""Domain-specific sentence features: 28 dims over 5 semantic cue families,
2 structural cues, and 3 stylistic cues.

Detectors are lexicon- and rule-based so the whole feature pipeline is
deterministic and auditable. Lexicons ship as package resources, one token
per line, and can be overridden via a directory of same-named files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from assort.corpus import QuestionRecord, Sentence

# Sentence-initial phrases signalling important information, in fixed
# dimension order. All but "Below is" include the trailing comma.
LINGUISTIC_PATTERNS = (
    "However,",
    "First,",
    "In short,",
    "In this case,",
    "In general,",
    "Finally,",
    "Then,",
    "Alternatively,",
    "In other words,",
    "In addition,",
    "In practice,",
    "In fact,",
    "Otherwise,",
    "If you care,",
    "In contrast,",
    "On the other hand,",
    "Below is",
    "Additionally,",
    "Furthermore,",
)

N_PATTERNS = len(LINGUISTIC_PATTERNS)
N_DOMAIN_FEATURES = N_PATTERNS + 9  # 5 semantic families + 2 structural + 3 stylistic

_LEXICON_FILES = (
    "imperative_verbs",
    "imperative_skip_words",
    "comparative_irregulars",
    "comparative_exclusions",
    "superlative_irregulars",
    "superlative_exclusions",
)

# Closed grammatical class; a sentence starting here has an explicit subject
# or is not an instruction.
_PRONOUNS_AND_DETERMINERS = frozenset(
    """i you he she it we they this that these those there the a an my your his
    her its our their mine yours one some any each every all both no none what
    which who whom whose when where why how if as because since although though
    while but and or nor so yet for unless until whenever maybe perhaps"""
    .split()
)

_WORD_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")


@dataclass(frozen=True)
class Lexicons:
    imperative_verbs: frozenset
    imperative_skip_words: frozenset
    comparative_irregulars: frozenset
    comparative_exclusions: frozenset
    superlative_irregulars: frozenset
    superlative_exclusions: frozenset

    @staticmethod
    def load(directory=None) -> "Lexicons":
        """Load lexicons from a directory, or from package resources if None."""
        values = {}
        for name in _LEXICON_FILES:
            if directory is not None:
                text = Path(directory, f"{name}.txt").read_text(encoding="utf-8")
            else:
                text = (
                    resources.files("assort.resources")
                    .joinpath(f"{name}.txt")
                    .read_text(encoding="utf-8")
                )
            tokens = frozenset(
                line.strip().lower()
                for line in text.splitlines()
                if line.strip() and not line.startswith("#")
            )
            values[name] = tokens
        return Lexicons(**values)


@lru_cache(maxsize=4)
def _cached_lexicons(directory):
    return Lexicons.load(directory)


def default_lexicons(directory=None) -> Lexicons:
    return _cached_lexicons(str(directory) if directory is not None else None)


@dataclass(frozen=True)
class EntityLexicon:
    """Normalized software-entity strings recognized for one question."""

    entities: frozenset

    def __len__(self):
        return len(self.entities)


@dataclass(frozen=True)
class DomainFeatures:
    pattern_flags: tuple
    entity_overlap: float
    has_comparative: int
    has_superlative: int
    is_imperative: int
    position: float
    code_adjacent: int
    inline_code: int
    bold: int
    list_step: int

    def to_vector(self) -> np.ndarray:
        vec = np.empty(N_DOMAIN_FEATURES)
        vec[:N_PATTERNS] = self.pattern_flags
        vec[N_PATTERNS:] = (
            self.entity_overlap,
            self.has_comparative,
            self.has_superlative,
            self.is_imperative,
            self.position,
            self.code_adjacent,
            self.inline_code,
            self.bold,
            self.list_step,
        )
        return vec


def _text_of(sentence) -> str:
    return sentence.text if isinstance(sentence, Sentence) else sentence


def _words(text: str) -> list[str]:
    return [w.lower() for w in _WORD_RE.findall(text)]


# ---------------------------------------------------------------------------
# Semantic cues
# ---------------------------------------------------------------------------

_CAMEL_RE = re.compile(r"[a-z0-9][A-Z]")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


def _code_like_tokens(text: str) -> set[str]:
    """camelCase / snake_case / dotted identifiers, normalized to lowercase."""
    found = set()
    for token in _IDENT_RE.findall(text):
        stripped = token.strip("._")
        if not stripped:
            continue
        camel = _CAMEL_RE.search(stripped)
        snake = "_" in stripped
        dotted = "." in stripped
        if camel or snake or dotted:
            found.add(stripped.lower())
    return found


def build_entity_lexicon(question: QuestionRecord) -> EntityLexicon:
    """Question tags plus identifier-shaped tokens from the title."""
    entities = set()
    for tag in question.tags:
        tag = tag.strip().lower()
        if not tag:
            continue
        entities.add(tag)
        if "-" in tag:
            entities.add(tag.replace("-", " "))
    entities |= _code_like_tokens(question.title)
    return EntityLexicon(entities=frozenset(entities))


def _mentions(text: str, entity: str) -> bool:
    pattern = r"(?<![A-Za-z0-9_])" + re.escape(entity) + r"(?![A-Za-z0-9_])"
    return re.search(pattern, text, flags=re.IGNORECASE) is not None


def entity_overlap(question: QuestionRecord, sentence, lexicon_builder=build_entity_lexicon) -> float:
    """|entities of the question found in the sentence| / |question entities|.

    Returns 0.0 when the question yields no recognizable entities.
    """
    lexicon = lexicon_builder(question)
    if not len(lexicon):
        return 0.0
    text = _text_of(sentence)
    hits = sum(1 for entity in lexicon.entities if _mentions(text, entity))
    return hits / len(lexicon)


def detect_comparative(sentence, lexicons: Lexicons | None = None) -> int:
    lex = lexicons or default_lexicons()
    for word in _words(_text_of(sentence)):
        if word in lex.comparative_irregulars:
            return 1
        if (
            word.endswith("er")
            and len(word) > 3
            and word not in lex.comparative_exclusions
        ):
            return 1
    return 0


def detect_superlative(sentence, lexicons: Lexicons | None = None) -> int:
    lex = lexicons or default_lexicons()
    for word in _words(_text_of(sentence)):
        if word in lex.superlative_irregulars:
            return 1
        if (
            word.endswith("est")
            and len(word) > 3
            and word not in lex.superlative_exclusions
        ):
            return 1
    return 0


def detect_imperative(sentence, lexicons: Lexicons | None = None) -> int:
    """1 iff the first word (after leading adverbs) is an imperative verb."""
    lex = lexicons or default_lexicons()
    words = _words(_text_of(sentence))
    i = 0
    while i < len(words) and words[i] in lex.imperative_skip_words:
        i += 1
    if i >= len(words):
        return 0
    head = words[i].split("'")[0]
    if head in _PRONOUNS_AND_DETERMINERS:
        return 0
    return 1 if head in lex.imperative_verbs else 0


def match_linguistic_patterns(sentence) -> tuple:
    """One binary dim per pattern; matches are sentence-initial, case-insensitive."""
    text = _text_of(sentence).lstrip().lower()
    return tuple(
        1 if text.startswith(pattern.lower()) else 0 for pattern in LINGUISTIC_PATTERNS
    )


# ---------------------------------------------------------------------------
# Structural and stylistic cues
# ---------------------------------------------------------------------------

def structural_features(sentence: Sentence) -> tuple[float, int]:
    if sentence.total_in_post <= 1:
        position = 0.0
    else:
        position = sentence.index / (sentence.total_in_post - 1)
    code_adjacent = int(sentence.precedes_code_block or sentence.follows_code_block)
    return position, code_adjacent


def stylistic_features(sentence: Sentence) -> tuple[int, int, int]:
    return (
        int(sentence.has_inline_code),
        int(sentence.is_bold),
        int(sentence.is_list_item_first),
    )


def build_domain_features(
    question: QuestionRecord,
    sentence: Sentence,
    lexicons: Lexicons | None = None,
    lexicon_builder=build_entity_lexicon,
) -> DomainFeatures:
    """All 28 feature dims in fixed layout order."""
    lex = lexicons or default_lexicons()
    position, code_adjacent = structural_features(sentence)
    inline_code, bold, list_step = stylistic_features(sentence)
    return DomainFeatures(
        pattern_flags=match_linguistic_patterns(sentence),
        entity_overlap=entity_overlap(question, sentence, lexicon_builder),
        has_comparative=detect_comparative(sentence, lex),
        has_superlative=detect_superlative(sentence, lex),
        is_imperative=detect_imperative(sentence, lex),
        position=position,
        code_adjacent=code_adjacent,
        inline_code=inline_code,
        bold=bold,
        list_step=list_step,
    )
