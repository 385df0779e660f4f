"""Ensemble inference and the supervised pipeline.

A sentence's final score is the question-type distribution dotted with the
per-type classifier outputs: phi = sum_i p_i * lambda_i. Sentences with
phi strictly above the threshold theta form the extractive summary.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field

import numpy as np

from assort import fnn
from assort.embeddings import EmbeddingError
from assort.featurizer import (
    N_DOMAIN_FEATURES,
    Lexicons,
    build_domain_features,
    default_lexicons,
)
from assort.fnn import FnnModel, TrainConfig
from assort.question_classifier import (
    N_TYPES,
    LinearSvmModel,
    QuestionType,
    SvmTrainConfig,
    TitleVocabulary,
    TypeDistribution,
    predict_distribution,
    train_svm,
)

BUNDLE_FORMAT = "assort-bundle"
BUNDLE_VERSION = 1

THETA_GRID = tuple(round(0.30 + 0.05 * i, 2) for i in range(9))  # 0.30 .. 0.70


class BundleError(RuntimeError):
    pass


@dataclass(frozen=True)
class Summary:
    post_id: str
    selected: tuple
    scores: tuple

    def __post_init__(self):
        if list(self.selected) != sorted(set(self.selected)):
            raise ValueError("selected indices must be ascending and unique")
        if self.selected and (min(self.selected) < 0 or max(self.selected) >= len(self.scores)):
            raise ValueError("selected indices out of range")


@dataclass
class BundleConfig:
    svm: SvmTrainConfig = field(default_factory=SvmTrainConfig)
    fnn: TrainConfig = field(default_factory=TrainConfig)
    theta: float = 0.5
    tune_theta: bool = False
    use_embeddings: bool = True
    use_domain_features: bool = True

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")


@dataclass
class TrainedBundle:
    svm: LinearSvmModel
    heads: dict  # QuestionType -> FnnModel
    theta: float
    embedding_fingerprint: str
    use_embeddings: bool = True
    use_domain_features: bool = True

    def __post_init__(self):
        if set(self.heads) != set(QuestionType):
            raise BundleError("bundle must carry one head per question type")
        if not 0.0 < self.theta < 1.0:
            raise BundleError(f"theta must be in (0, 1), got {self.theta}")


def score_sentence(p: TypeDistribution, lambdas) -> float:
    """phi = sum_i p_i * lambda_i, exactly rounded (permutation invariant)."""
    if len(lambdas) != len(p.probs):
        raise ValueError(f"expected {len(p.probs)} lambdas, got {len(lambdas)}")
    return math.fsum(pi * li for pi, li in zip(p.probs, lambdas))


def encode_post(
    question,
    post,
    embedder,
    lexicons: Lexicons | None = None,
    use_embeddings: bool = True,
    use_domain_features: bool = True,
) -> np.ndarray:
    """(n, D+28) sentence encodings: embedding block then domain features.

    Ablations zero a block rather than dropping it, so encoding shapes stay
    fixed across variants.
    """
    lexicons = lexicons or default_lexicons()
    n = len(post.sentences)
    dim = embedder.dimension
    X = np.zeros((n, dim + N_DOMAIN_FEATURES))
    if use_embeddings and n:
        vectors = embedder.embed([s.text for s in post.sentences])
        X[:, :dim] = np.asarray(vectors)
    if use_domain_features:
        for i, sentence in enumerate(post.sentences):
            X[i, dim:] = build_domain_features(question, sentence, lexicons).to_vector()
    return X


def sentence_lambdas(bundle: TrainedBundle, encodings: np.ndarray) -> np.ndarray:
    """(n, k) per-type summative probabilities, in QuestionType order."""
    return np.column_stack(
        [fnn.forward_batch(bundle.heads[t], encodings) for t in QuestionType]
    )


def summarize_supervised(
    bundle: TrainedBundle,
    question,
    post,
    embedder,
    lexicons: Lexicons | None = None,
    type_distribution: TypeDistribution | None = None,
) -> Summary:
    """Score every sentence and select those with phi strictly above theta.

    ``type_distribution`` overrides the classifier's softmax output (used by
    the no-ensemble ablation, which forces a one-hot distribution).
    """
    if embedder.fingerprint != bundle.embedding_fingerprint:
        raise BundleError(
            f"embedding fingerprint mismatch: bundle was trained with "
            f"{bundle.embedding_fingerprint!r}, provider is {embedder.fingerprint!r}"
        )
    if not post.sentences:
        return Summary(post_id=post.id, selected=(), scores=())
    p = type_distribution or predict_distribution(bundle.svm, question.title)
    encodings = encode_post(
        question,
        post,
        embedder,
        lexicons,
        use_embeddings=bundle.use_embeddings,
        use_domain_features=bundle.use_domain_features,
    )
    lambdas = sentence_lambdas(bundle, encodings)
    scores = tuple(score_sentence(p, row) for row in lambdas.tolist())
    selected = tuple(i for i, phi in enumerate(scores) if phi > bundle.theta)
    return Summary(post_id=post.id, selected=selected, scores=scores)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def _labeled_encodings(corpus, post_ids, embedder, lexicons, config):
    """Per-type (encodings, labels) over labeled posts, QuestionType keyed."""
    by_id = corpus.posts_by_id()
    out = {t: ([], []) for t in QuestionType}
    for pid in post_ids:
        post = by_id[pid]
        if post.gold_summary is None:
            continue
        question = corpus.question_for(post)
        if question.gold_type is None:
            continue
        X = encode_post(
            question,
            post,
            embedder,
            lexicons,
            use_embeddings=config.use_embeddings,
            use_domain_features=config.use_domain_features,
        )
        encs, labels = out[question.gold_type]
        for i in range(len(post.sentences)):
            encs.append(X[i])
            labels.append(1.0 if i in post.gold_summary else 0.0)
    return out


def train_bundle(
    corpus,
    split,
    config: BundleConfig | None = None,
    embedder=None,
    lexicons: Lexicons | None = None,
) -> TrainedBundle:
    """Train the SVM plus one head per question type on the split's train posts."""
    if embedder is None:
        raise EmbeddingError("train_bundle requires an embedding provider")
    config = config or BundleConfig()
    lexicons = lexicons or default_lexicons()
    by_id = corpus.posts_by_id()

    train_questions = []
    seen = set()
    for pid in split.train:
        qid = by_id[pid].question_id
        if qid not in seen:
            seen.add(qid)
            train_questions.append(corpus.questions[qid])
    svm = train_svm([q for q in train_questions if q.gold_type is not None], config.svm)

    per_type = _labeled_encodings(corpus, split.train, embedder, lexicons, config)
    heads = {}
    input_dim = embedder.dimension + N_DOMAIN_FEATURES
    for qtype in QuestionType:
        encs, labels = per_type[qtype]
        if not encs:
            raise BundleError(f"no labeled training posts for type {qtype.name}")
        model = fnn.init_fnn(config.fnn.seed + qtype.value, input_dim, config.fnn.hidden_width)
        heads[qtype] = fnn.train(model, list(zip(encs, labels)), config.fnn)

    bundle = TrainedBundle(
        svm=svm,
        heads=heads,
        theta=config.theta,
        embedding_fingerprint=embedder.fingerprint,
        use_embeddings=config.use_embeddings,
        use_domain_features=config.use_domain_features,
    )
    if config.tune_theta and split.dev:
        bundle.theta = tune_theta(bundle, corpus, split.dev, embedder, lexicons)
    return bundle


def best_theta(scored, grid=THETA_GRID) -> float:
    """Grid theta maximizing micro-F1 over (scores, gold) pairs; lowest wins ties."""
    winner, best_f1 = grid[0], -1.0
    for theta in grid:
        gold_n = pred_n = hit_n = 0
        for scores, gold in scored:
            predicted = {i for i, phi in enumerate(scores) if phi > theta}
            gold_n += len(gold)
            pred_n += len(predicted)
            hit_n += len(gold & predicted)
        precision = hit_n / pred_n if pred_n else 0.0
        recall = hit_n / gold_n if gold_n else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        if f1 > best_f1:
            winner, best_f1 = theta, f1
    return winner


def tune_theta(bundle, corpus, dev_ids, embedder, lexicons=None, grid=THETA_GRID) -> float:
    """Tune theta on dev posts by exhaustive grid search over micro-F1."""
    by_id = corpus.posts_by_id()
    scored = []
    for pid in dev_ids:
        post = by_id[pid]
        if post.gold_summary is None or not post.sentences:
            continue
        summary = summarize_supervised(
            bundle, corpus.question_for(post), post, embedder, lexicons
        )
        scored.append((summary.scores, post.gold_summary))
    if not scored:
        return bundle.theta
    return best_theta(scored, grid)


# ---------------------------------------------------------------------------
# Bundle artifact
# ---------------------------------------------------------------------------

def _pack(array) -> str:
    return base64.b64encode(np.ascontiguousarray(array, dtype="<f8").tobytes()).decode("ascii")


def _unpack(blob: str, shape) -> np.ndarray:
    data = np.frombuffer(base64.b64decode(blob), dtype="<f8").astype(np.float64)
    return np.ascontiguousarray(data.reshape(shape))


def bundle_to_bytes(bundle: TrainedBundle) -> bytes:
    vocab = bundle.svm.vocab
    tokens = [None] * len(vocab.index)
    for token, idx in vocab.index.items():
        tokens[idx] = token
    payload = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "theta": bundle.theta,
        "embedding_fingerprint": bundle.embedding_fingerprint,
        "use_embeddings": bundle.use_embeddings,
        "use_domain_features": bundle.use_domain_features,
        "svm": {
            "temperature": bundle.svm.temperature,
            "n_docs": vocab.n_docs,
            "tokens": tokens,
            "doc_freq": vocab.doc_freq,
            "weights": _pack(bundle.svm.weights),
            "biases": _pack(bundle.svm.biases),
        },
        "heads": {
            qtype.name: {
                "input_dim": head.input_dim,
                "hidden_width": head.hidden_width,
                "W1": _pack(head.W1),
                "b1": _pack(head.b1),
                "W2": _pack(head.W2),
                "b2": head.b2,
            }
            for qtype, head in sorted(bundle.heads.items(), key=lambda kv: kv[0].value)
        },
    }
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def save_bundle(bundle: TrainedBundle, path):
    with open(path, "wb") as handle:
        handle.write(bundle_to_bytes(bundle))


def load_bundle(path, embedder=None) -> TrainedBundle:
    """Load a bundle artifact; fails loudly on version, shape, or fingerprint mismatch."""
    with open(path, "rb") as handle:
        payload = json.loads(handle.read().decode("utf-8"))
    if payload.get("format") != BUNDLE_FORMAT:
        raise BundleError(f"{path}: not a bundle artifact")
    if payload.get("version") != BUNDLE_VERSION:
        raise BundleError(f"{path}: unsupported bundle version {payload.get('version')}")

    svm_data = payload["svm"]
    vocab = TitleVocabulary(
        index={token: i for i, token in enumerate(svm_data["tokens"])},
        doc_freq=list(svm_data["doc_freq"]),
        n_docs=svm_data["n_docs"],
    )
    n_vocab = len(vocab.index)
    svm = LinearSvmModel(
        weights=_unpack(svm_data["weights"], (N_TYPES, n_vocab)),
        biases=_unpack(svm_data["biases"], (N_TYPES,)),
        vocab=vocab,
        temperature=svm_data["temperature"],
    )
    heads = {}
    for qtype in QuestionType:
        head_data = payload["heads"][qtype.name]
        d_in, width = head_data["input_dim"], head_data["hidden_width"]
        heads[qtype] = FnnModel(
            W1=_unpack(head_data["W1"], (width, d_in)),
            b1=_unpack(head_data["b1"], (width,)),
            W2=_unpack(head_data["W2"], (width,)),
            b2=float(head_data["b2"]),
        )
    bundle = TrainedBundle(
        svm=svm,
        heads=heads,
        theta=payload["theta"],
        embedding_fingerprint=payload["embedding_fingerprint"],
        use_embeddings=payload["use_embeddings"],
        use_domain_features=payload["use_domain_features"],
    )
    if embedder is not None:
        if embedder.fingerprint != bundle.embedding_fingerprint:
            raise BundleError(
                f"{path}: bundle fingerprint {bundle.embedding_fingerprint!r} does not "
                f"match provider {embedder.fingerprint!r}"
            )
        expected = embedder.dimension + N_DOMAIN_FEATURES
        for qtype, head in heads.items():
            if head.input_dim != expected:
                raise BundleError(
                    f"{path}: head {qtype.name} expects input dim {head.input_dim}, "
                    f"provider implies {expected}"
                )
    return bundle
