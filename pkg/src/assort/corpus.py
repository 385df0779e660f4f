"""Corpus ingestion: post HTML parsing, labeled-corpus loading, splits.

A corpus file is line-delimited JSON with two record kinds:

    {"kind": "q", "id": ..., "title": ..., "tags": [...], "type": "howto|conceptual|bugfix"}
    {"kind": "a", "id": ..., "qid": ..., "html": ..., "gold": [indices]}

``type`` and ``gold`` are optional (absent for unlabeled data). Posts whose
HTML contains no prose sentences (code-only answers) are skipped at
ingestion: the selection task is defined over prose sentences.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser

from assort.question_classifier import QuestionType


class CorpusError(ValueError):
    """Malformed corpus file or violated corpus invariant."""


@dataclass(frozen=True)
class Sentence:
    """One prose sentence of an answer post, with markup-derived flags."""

    index: int
    text: str
    is_bold: bool = False
    has_inline_code: bool = False
    is_list_item_first: bool = False
    precedes_code_block: bool = False
    follows_code_block: bool = False
    total_in_post: int = 1


@dataclass
class QuestionRecord:
    id: str
    title: str
    tags: list[str] = field(default_factory=list)
    gold_type: QuestionType | None = None


@dataclass
class AnswerPost:
    id: str
    question_id: str
    sentences: list[Sentence]
    gold_summary: set[int] | None = None


@dataclass
class LabeledCorpus:
    questions: dict[str, QuestionRecord]
    posts: list[AnswerPost]

    def question_for(self, post: AnswerPost) -> QuestionRecord:
        return self.questions[post.question_id]

    def posts_by_id(self) -> dict[str, AnswerPost]:
        return {p.id: p for p in self.posts}

    def posts_by_type(self) -> dict[QuestionType, list[AnswerPost]]:
        groups: dict[QuestionType, list[AnswerPost]] = {t: [] for t in QuestionType}
        for post in self.posts:
            gold_type = self.questions[post.question_id].gold_type
            if gold_type is not None:
                groups[gold_type].append(post)
        return groups


@dataclass
class DataSplit:
    train: list[str]
    dev: list[str]
    test: list[str]
    seed: int

    def all_ids(self) -> set[str]:
        return set(self.train) | set(self.dev) | set(self.test)


# ---------------------------------------------------------------------------
# HTML -> sentences
# ---------------------------------------------------------------------------

_BLOCK_TAGS = {
    "p", "div", "li", "blockquote", "td", "th", "dt", "dd",
    "h1", "h2", "h3", "h4", "h5", "h6", "tr", "table", "ul", "ol",
}

# Sentence-terminal punctuation followed by whitespace + an upper-case/digit/
# quote opener, or end of block. Code spans are masked before matching so
# dots inside ``foo.bar()`` never split.
_TERMINAL_RE = re.compile(r"[.?!]+")
_NEXT_START_RE = re.compile(r"\s+[\"'(\[]?[A-Z0-9]")

_ABBREVIATIONS = {"e.g", "i.e", "eg", "ie", "etc", "vs", "cf", "et", "al", "resp"}


class _Run:
    __slots__ = ("text", "bold", "code")

    def __init__(self, text, bold, code):
        self.text = text
        self.bold = bold
        self.code = code


_CODE_MARKER = object()


class _PostHtmlParser(HTMLParser):
    """Collects prose blocks (with bold/code char flags) and code-block markers."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks = []          # list of either list[_Run] or _CODE_MARKER
        self._runs: list[_Run] = []
        self._pre_depth = 0
        self._bold_depth = 0
        self._code_depth = 0
        self.li_opened_before_block: set[int] = set()  # block indices starting a list item
        self._li_pending = False

    def _flush(self):
        if any(run.text.strip() for run in self._runs):
            if self._li_pending:
                self.li_opened_before_block.add(len(self.blocks))
                self._li_pending = False
            self.blocks.append(self._runs)
        self._runs = []

    def handle_starttag(self, tag, attrs):
        if tag == "pre":
            self._flush()
            if self._pre_depth == 0:
                self.blocks.append(_CODE_MARKER)
            self._pre_depth += 1
        elif tag in ("b", "strong"):
            self._bold_depth += 1
        elif tag == "code":
            if self._pre_depth == 0:
                self._code_depth += 1
        elif tag == "br":
            self._runs.append(_Run(" ", False, False))
        elif tag in _BLOCK_TAGS:
            self._flush()
            if tag == "li":
                self._li_pending = True

    def handle_endtag(self, tag):
        if tag == "pre":
            self._pre_depth = max(0, self._pre_depth - 1)
        elif tag in ("b", "strong"):
            self._bold_depth = max(0, self._bold_depth - 1)
        elif tag == "code":
            self._code_depth = max(0, self._code_depth - 1)
        elif tag in _BLOCK_TAGS:
            self._flush()
            if tag in ("li", "ul", "ol"):
                self._li_pending = False

    def handle_data(self, data):
        if self._pre_depth > 0 or not data:
            return
        self._runs.append(_Run(data, self._bold_depth > 0, self._code_depth > 0))


def _normalize_runs(runs):
    """Collapse whitespace across runs, keeping per-char bold/code flags aligned."""
    chars, bold, code = [], [], []
    prev_space = True
    for run in runs:
        for ch in run.text:
            if ch.isspace():
                if prev_space:
                    continue
                chars.append(" ")
                bold.append(False)
                code.append(False)
                prev_space = True
            else:
                chars.append(ch)
                bold.append(run.bold)
                code.append(run.code)
                prev_space = False
    while chars and chars[-1] == " ":
        chars.pop()
        bold.pop()
        code.pop()
    return "".join(chars), bold, code


def _split_block(text: str, code_flags) -> list[tuple[int, int]]:
    """Sentence spans over ``text``; punctuation inside code spans is masked."""
    if not text:
        return []
    masked = "".join(
        "x" if (code_flags[i] and ch in ".?!") else ch for i, ch in enumerate(text)
    )
    boundaries = []
    for match in _TERMINAL_RE.finditer(masked):
        end = match.end()
        rest = masked[end:]
        if rest.strip() and not _NEXT_START_RE.match(rest):
            continue
        head = masked[: match.start()]
        tail = head.rsplit(None, 1)[-1].lstrip("\"'([") if head.strip() else ""
        if tail.lower() in _ABBREVIATIONS:
            continue
        boundaries.append(end)
    spans = []
    start = 0
    for end in boundaries:
        spans.append((start, end))
        start = end
    if start < len(text):
        spans.append((start, len(text)))
    out = []
    for lo, hi in spans:
        segment = text[lo:hi]
        lead = len(segment) - len(segment.lstrip())
        trail = len(segment) - len(segment.rstrip())
        if segment.strip():
            out.append((lo + lead, hi - trail))
    return out


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence splitter for plain (markup-free) text."""
    flags = [False] * len(text)
    return [text[lo:hi] for lo, hi in _split_block(text, flags)]


def parse_post_html(html: str) -> list[Sentence]:
    """Parse an answer-post HTML fragment into ordered, flag-annotated sentences.

    Code blocks (``pre``) contribute no text but set adjacency flags on the
    nearest preceding and following sentences. Returns an empty list for
    code-only posts.
    """
    parser = _PostHtmlParser()
    parser.feed(html)
    parser.close()
    parser._flush()

    drafts = []  # dicts, total filled in afterwards
    follows_pending = False
    for block_idx, block in enumerate(parser.blocks):
        if block is _CODE_MARKER:
            if drafts:
                drafts[-1]["precedes_code_block"] = True
            follows_pending = True
            continue
        text, bold_flags, code_flags = _normalize_runs(block)
        first_in_item = block_idx in parser.li_opened_before_block
        for k, (lo, hi) in enumerate(_split_block(text, code_flags)):
            drafts.append(
                {
                    "text": text[lo:hi],
                    "is_bold": any(bold_flags[lo:hi]),
                    "has_inline_code": any(code_flags[lo:hi]),
                    "is_list_item_first": first_in_item and k == 0,
                    "precedes_code_block": False,
                    "follows_code_block": follows_pending and k == 0,
                }
            )
            if k == 0:
                follows_pending = False

    total = len(drafts)
    return [Sentence(index=i, total_in_post=total, **d) for i, d in enumerate(drafts)]


# ---------------------------------------------------------------------------
# Corpus file loading
# ---------------------------------------------------------------------------

_TYPE_NAMES = {
    "howto": QuestionType.HOW_TO,
    "conceptual": QuestionType.CONCEPTUAL,
    "bugfix": QuestionType.BUG_FIXING,
}
TYPE_LABELS = {v: k for k, v in _TYPE_NAMES.items()}


def _fail(line_no: int, message: str):
    raise CorpusError(f"line {line_no}: {message}")


def load_corpus(path) -> LabeledCorpus:
    """Load a line-delimited corpus file, validating all corpus invariants."""
    questions: dict[str, QuestionRecord] = {}
    posts: list[AnswerPost] = []
    post_lines: dict[str, int] = {}

    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(line_no, f"invalid JSON ({exc.msg})")
            if not isinstance(record, dict) or "kind" not in record:
                _fail(line_no, "record must be an object with a 'kind' field")
            kind = record["kind"]
            if kind == "q":
                qid = str(record.get("id", ""))
                title = record.get("title", "")
                if not qid:
                    _fail(line_no, "question missing 'id'")
                if qid in questions:
                    _fail(line_no, f"duplicate question id {qid!r}")
                if not isinstance(title, str) or not title.strip():
                    _fail(line_no, f"question {qid!r} has an empty title")
                tags = record.get("tags", [])
                if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
                    _fail(line_no, f"question {qid!r}: 'tags' must be a list of strings")
                gold_type = None
                if "type" in record and record["type"] is not None:
                    if record["type"] not in _TYPE_NAMES:
                        _fail(line_no, f"unknown question type {record['type']!r}")
                    gold_type = _TYPE_NAMES[record["type"]]
                questions[qid] = QuestionRecord(id=qid, title=title, tags=tags, gold_type=gold_type)
            elif kind == "a":
                pid = str(record.get("id", ""))
                qid = str(record.get("qid", ""))
                if not pid or not qid:
                    _fail(line_no, "post missing 'id' or 'qid'")
                if pid in post_lines:
                    _fail(line_no, f"duplicate post id {pid!r}")
                html = record.get("html")
                if not isinstance(html, str):
                    _fail(line_no, f"post {pid!r}: 'html' must be a string")
                sentences = parse_post_html(html)
                gold = None
                if "gold" in record and record["gold"] is not None:
                    raw_gold = record["gold"]
                    if not isinstance(raw_gold, list) or not all(
                        isinstance(i, int) and not isinstance(i, bool) for i in raw_gold
                    ):
                        _fail(line_no, f"post {pid!r}: 'gold' must be a list of integers")
                    gold = set(raw_gold)
                    bad = [i for i in gold if i < 0 or i >= len(sentences)]
                    if bad:
                        _fail(
                            line_no,
                            f"post {pid!r}: gold indices {sorted(bad)} out of range "
                            f"for {len(sentences)} sentences",
                        )
                if not sentences:
                    continue  # code-only post
                post_lines[pid] = line_no
                posts.append(AnswerPost(id=pid, question_id=qid, sentences=sentences, gold_summary=gold))
            else:
                _fail(line_no, f"unknown record kind {kind!r}")

    for post in posts:
        if post.question_id not in questions:
            _fail(post_lines[post.id], f"post {post.id!r} references unknown question {post.question_id!r}")
    return LabeledCorpus(questions=questions, posts=posts)


# ---------------------------------------------------------------------------
# Splits, folds, subsampling
# ---------------------------------------------------------------------------

def split_corpus(corpus: LabeledCorpus, ratios=(8, 1, 1), seed: int = 0) -> DataSplit:
    """Stratified train/dev/test split; per-type ratios honored within rounding."""
    if len(ratios) != 3 or any(r < 0 for r in ratios) or sum(ratios) <= 0:
        raise CorpusError(f"bad split ratios {ratios!r}")
    groups = corpus.posts_by_type()
    untyped = len(corpus.posts) - sum(len(g) for g in groups.values())
    if untyped:
        raise CorpusError(f"{untyped} posts belong to questions without a gold type; cannot stratify")
    for qtype, group in groups.items():
        if len(group) < 10:
            raise CorpusError(
                f"too few posts for type {TYPE_LABELS[qtype]!r}: {len(group)} < 10"
            )
    total = sum(ratios)
    rng = random.Random(seed)
    train, dev, test = [], [], []
    for qtype in QuestionType:
        ids = sorted(p.id for p in groups[qtype])
        rng.shuffle(ids)
        n = len(ids)
        n_dev = int(n * ratios[1] / total + 0.5)
        n_test = int(n * ratios[2] / total + 0.5)
        n_train = n - n_dev - n_test
        train.extend(ids[:n_train])
        dev.extend(ids[n_train : n_train + n_dev])
        test.extend(ids[n_train + n_dev :])
    return DataSplit(train=train, dev=dev, test=test, seed=seed)


def kfold(corpus: LabeledCorpus, k: int = 10, seed: int = 0) -> list[DataSplit]:
    """k disjoint test folds covering the corpus; train = complement, dev empty."""
    n = len(corpus.posts)
    if k < 2:
        raise CorpusError(f"k must be >= 2, got {k}")
    if k > n:
        raise CorpusError(f"k={k} exceeds corpus size {n}")
    ids = sorted(p.id for p in corpus.posts)
    random.Random(seed).shuffle(ids)
    base, extra = divmod(n, k)
    folds, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        test = ids[start : start + size]
        train = ids[:start] + ids[start + size :]
        folds.append(DataSplit(train=train, dev=[], test=test, seed=seed))
        start += size
    return folds


def sample_prefix(ids: list[str], fraction: float, seed: int) -> list[str]:
    """First ceil(fraction*N) ids of one seeded shuffle, so fractions nest."""
    if not 0 < fraction <= 1:
        raise CorpusError(f"fraction must be in (0, 1], got {fraction}")
    shuffled = sorted(ids)
    random.Random(seed).shuffle(shuffled)
    keep = math.ceil(fraction * len(shuffled))
    return shuffled[:keep]


def subsample(corpus: LabeledCorpus, fraction: float, seed: int = 0) -> LabeledCorpus:
    """Retain a seeded-shuffle prefix of posts; prune questions to referenced ones."""
    keep = set(sample_prefix([p.id for p in corpus.posts], fraction, seed))
    posts = [p for p in corpus.posts if p.id in keep]
    qids = {p.question_id for p in posts}
    questions = {qid: q for qid, q in corpus.questions.items() if qid in qids}
    return LabeledCorpus(questions=questions, posts=posts)
