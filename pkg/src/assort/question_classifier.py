"""Question-type classification from titles.

A linear one-vs-rest SVM over TF-IDF title features, trained by hinge-loss
stochastic subgradient descent. Margins are converted to a softmax confidence
distribution so the downstream ensemble can weight per-type predictions.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

import numpy as np


class QuestionType(enum.Enum):
    """The three supported question categories, in fixed ensemble order."""

    HOW_TO = 0
    CONCEPTUAL = 1
    BUG_FIXING = 2


N_TYPES = len(QuestionType)
TYPE_ORDER = tuple(QuestionType)


@dataclass(frozen=True)
class TypeDistribution:
    """Softmax confidence over the three question types (sums to 1)."""

    probs: tuple[float, float, float]

    def __post_init__(self):
        if len(self.probs) != N_TYPES:
            raise ValueError(f"expected {N_TYPES} probabilities, got {len(self.probs)}")
        if any(p < 0 or p > 1 for p in self.probs):
            raise ValueError(f"probabilities out of [0,1]: {self.probs}")
        if abs(math.fsum(self.probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")

    @staticmethod
    def one_hot(qtype: QuestionType) -> "TypeDistribution":
        probs = [0.0] * N_TYPES
        probs[qtype.value] = 1.0
        return TypeDistribution(tuple(probs))

    def argmax(self) -> QuestionType:
        return TYPE_ORDER[max(range(N_TYPES), key=lambda i: self.probs[i])]


_TOKEN_RE = re.compile(r"[a-z0-9_+#]+(?:\.[a-z0-9_+#]+)*")


def tokenize_title(title: str) -> list[str]:
    return _TOKEN_RE.findall(title.lower())


@dataclass
class TitleVocabulary:
    """Token index plus document frequencies from the training titles."""

    index: dict[str, int]
    doc_freq: list[int]
    n_docs: int

    @staticmethod
    def build(titles: list[str]) -> "TitleVocabulary":
        index: dict[str, int] = {}
        doc_freq: list[int] = []
        for title in titles:
            for token in set(tokenize_title(title)):
                if token not in index:
                    index[token] = len(index)
                    doc_freq.append(0)
                doc_freq[index[token]] += 1
        return TitleVocabulary(index=index, doc_freq=doc_freq, n_docs=len(titles))

    def __len__(self):
        return len(self.index)


def featurize_title(vocab: TitleVocabulary, title: str) -> dict[int, float]:
    """Sparse TF-IDF vector: tf * ln(N/df); out-of-vocabulary tokens dropped."""
    counts: dict[int, int] = {}
    for token in tokenize_title(title):
        idx = vocab.index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return {
        idx: tf * math.log(vocab.n_docs / vocab.doc_freq[idx])
        for idx, tf in counts.items()
        if vocab.doc_freq[idx] < vocab.n_docs  # ln(1) terms carry no signal
    }


@dataclass
class SvmTrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 200
    temperature: float = 1.0
    seed: int = 0


@dataclass
class LinearSvmModel:
    weights: np.ndarray  # (k, V)
    biases: np.ndarray  # (k,)
    vocab: TitleVocabulary
    temperature: float = 1.0
    loss_history: list[float] = field(default_factory=list, repr=False)

    def margins(self, features: dict[int, float]) -> np.ndarray:
        scores = self.biases.copy()
        if features:
            idx = np.fromiter(features.keys(), dtype=np.intp, count=len(features))
            vals = np.fromiter(features.values(), dtype=np.float64, count=len(features))
            scores = scores + self.weights[:, idx] @ vals
        return scores


def _hinge_objective(weights, biases, l2, examples):
    reg = 0.5 * l2 * float(np.sum(weights * weights))
    total = 0.0
    for features, y in examples:
        scores = biases.copy()
        if features:
            idx = np.fromiter(features.keys(), dtype=np.intp, count=len(features))
            vals = np.fromiter(features.values(), dtype=np.float64, count=len(features))
            scores = scores + weights[:, idx] @ vals
        total += float(np.sum(np.maximum(0.0, 1.0 - y * scores)))
    return reg + total / len(examples)


def train_svm(questions, config: SvmTrainConfig | None = None) -> LinearSvmModel:
    """Train one-vs-rest linear SVMs on question titles.

    Deterministic given the seed. Records the regularized hinge objective at
    each epoch boundary in ``loss_history``.
    """
    config = config or SvmTrainConfig()
    questions = list(questions)
    per_class = {t: 0 for t in QuestionType}
    for q in questions:
        if q.gold_type is None:
            raise ValueError(f"question {q.id!r} has no gold type")
        per_class[q.gold_type] += 1
    for qtype, count in per_class.items():
        if count < 2:
            raise ValueError(
                f"need at least 2 examples of type {qtype.name}, got {count}"
            )

    vocab = TitleVocabulary.build([q.title for q in questions])
    examples = []
    for q in questions:
        y = -np.ones(N_TYPES)
        y[q.gold_type.value] = 1.0
        examples.append((featurize_title(vocab, q.title), y))

    rng = np.random.default_rng(config.seed)
    weights = np.zeros((N_TYPES, len(vocab)))
    biases = np.zeros(N_TYPES)
    history = []
    order = np.arange(len(examples))
    for epoch in range(1, config.epochs + 1):
        lr = config.learning_rate / math.sqrt(epoch)
        rng.shuffle(order)
        for j in order:
            features, y = examples[j]
            scores = biases.copy()
            if features:
                idx = np.fromiter(features.keys(), dtype=np.intp, count=len(features))
                vals = np.fromiter(features.values(), dtype=np.float64, count=len(features))
                scores = scores + weights[:, idx] @ vals
            weights *= 1.0 - lr * config.l2
            violated = y * scores < 1.0
            if features and violated.any():
                weights[np.ix_(violated, idx)] += lr * np.outer(y[violated], vals)
            biases[violated] += lr * y[violated]
        history.append(_hinge_objective(weights, biases, config.l2, examples))

    return LinearSvmModel(
        weights=weights,
        biases=biases,
        vocab=vocab,
        temperature=config.temperature,
        loss_history=history,
    )


def predict_distribution(model: LinearSvmModel, title: str) -> TypeDistribution:
    """Softmax over margin scores divided by temperature."""
    scores = model.margins(featurize_title(model.vocab, title)) / model.temperature
    scores = scores - scores.max()
    exp = np.exp(scores)
    probs = exp / exp.sum()
    return TypeDistribution(tuple(float(p) for p in probs))


def predict_type(model: LinearSvmModel, title: str) -> QuestionType:
    return predict_distribution(model, title).argmax()
