"""Sentence-level evaluation: metrics, k-fold harness, ablations, low-resource
curve, and the lead-k floor baseline.

Metrics are micro-averaged (pooled sentence-level counts) across posts and
folds by default; macro averaging over folds is available behind a flag and
is recorded in every report.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace

from assort.corpus import DataSplit, LabeledCorpus, sample_prefix, split_corpus
from assort.ensemble import (
    BundleConfig,
    Summary,
    summarize_supervised,
    train_bundle,
)
from assort.indirect import summarize_indirect
from assort.question_classifier import TypeDistribution, predict_distribution

REPORT_RECORD = "assort-eval-report"
REPORT_VERSION = 1


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    n_gold: int
    n_predicted: int
    n_correct: int

    @staticmethod
    def from_counts(n_gold: int, n_predicted: int, n_correct: int) -> "Metrics":
        if n_gold == 0 and n_predicted == 0:
            return Metrics(1.0, 1.0, 1.0, 0, 0, 0)
        precision = n_correct / n_predicted if n_predicted else 0.0
        recall = n_correct / n_gold if n_gold else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        return Metrics(precision, recall, f1, n_gold, n_predicted, n_correct)


def metrics(gold, predicted) -> Metrics:
    """Exact set arithmetic: P = |G∩M|/|M|, R = |G∩M|/|G|, F1 harmonic mean."""
    gold = set(gold)
    predicted = set(predicted)
    return Metrics.from_counts(len(gold), len(predicted), len(gold & predicted))


class AblationVariant(enum.Enum):
    FULL = "full"
    NO_BERT = "no_bert"
    NO_DOMAIN_FEATURES = "no_domain_features"
    NO_ENSEMBLE = "no_ensemble"
    NO_QUESTION_CLASSIFIER = "no_question_classifier"


@dataclass
class EvalReport:
    variant: str
    fold_metrics: list[Metrics]
    aggregate: Metrics
    training_fraction: float | None = None
    seed: int = 0
    config_digest: str = ""
    averaging: str = "micro"


# ---------------------------------------------------------------------------
# Pipelines: anything with fit(corpus, split) -> summarizer(question, post)
# ---------------------------------------------------------------------------

class BundleSummarizer:
    def __init__(self, bundle, embedder, lexicons=None, one_hot_types=False):
        self.bundle = bundle
        self.embedder = embedder
        self.lexicons = lexicons
        self.one_hot_types = one_hot_types

    def summarize(self, question, post) -> Summary:
        forced = None
        if self.one_hot_types:
            forced = TypeDistribution.one_hot(
                predict_distribution(self.bundle.svm, question.title).argmax()
            )
        return summarize_supervised(
            self.bundle,
            question,
            post,
            self.embedder,
            self.lexicons,
            type_distribution=forced,
        )


class SupervisedPipeline:
    """Trains a bundle per split; the variant controls the ablated component."""

    def __init__(self, config: BundleConfig, embedder, lexicons=None,
                 variant: AblationVariant = AblationVariant.FULL):
        self.config = config
        self.embedder = embedder
        self.lexicons = lexicons
        self.variant = variant

    def fit(self, corpus: LabeledCorpus, split: DataSplit) -> BundleSummarizer:
        config = self.config
        if self.variant is AblationVariant.NO_BERT:
            config = replace(config, use_embeddings=False)
        elif self.variant is AblationVariant.NO_DOMAIN_FEATURES:
            config = replace(config, use_domain_features=False)

        if self.variant is AblationVariant.NO_QUESTION_CLASSIFIER:
            bundle = self._fit_single_head(corpus, split, config)
        else:
            bundle = train_bundle(corpus, split, config, self.embedder, self.lexicons)
        return BundleSummarizer(
            bundle,
            self.embedder,
            self.lexicons,
            one_hot_types=self.variant is AblationVariant.NO_ENSEMBLE,
        )

    def _fit_single_head(self, corpus, split, config):
        # One head trained on all types; installing it for every type keeps
        # the ensemble arithmetic unchanged (all lambdas equal).
        from assort import fnn
        from assort.ensemble import TrainedBundle, _labeled_encodings
        from assort.featurizer import N_DOMAIN_FEATURES, default_lexicons
        from assort.question_classifier import QuestionType, train_svm

        lexicons = self.lexicons or default_lexicons()
        by_id = corpus.posts_by_id()
        seen, questions = set(), []
        for pid in split.train:
            qid = by_id[pid].question_id
            if qid not in seen:
                seen.add(qid)
                questions.append(corpus.questions[qid])
        svm = train_svm([q for q in questions if q.gold_type is not None], config.svm)

        per_type = _labeled_encodings(corpus, split.train, self.embedder, lexicons, config)
        encodings, labels = [], []
        for qtype in QuestionType:
            encs, labs = per_type[qtype]
            encodings.extend(encs)
            labels.extend(labs)
        if not encodings:
            raise ValueError("no labeled training posts")
        model = fnn.init_fnn(
            config.fnn.seed, self.embedder.dimension + N_DOMAIN_FEATURES, config.fnn.hidden_width
        )
        head = fnn.train(model, list(zip(encodings, labels)), config.fnn)
        return TrainedBundle(
            svm=svm,
            heads={t: head for t in QuestionType},
            theta=config.theta,
            embedding_fingerprint=self.embedder.fingerprint,
            use_embeddings=config.use_embeddings,
            use_domain_features=config.use_domain_features,
        )


class FixedBundlePipeline:
    """Evaluate an already-trained bundle: fit() ignores the split."""

    def __init__(self, bundle, embedder, lexicons=None):
        self._summarizer = BundleSummarizer(bundle, embedder, lexicons)

    def fit(self, corpus, split) -> BundleSummarizer:
        return self._summarizer


class IndirectSummarizer:
    def __init__(self, summarizer_provider, nli_provider, max_length=120):
        self.summarizer_provider = summarizer_provider
        self.nli_provider = nli_provider
        self.max_length = max_length

    def summarize(self, question, post) -> Summary:
        return summarize_indirect(
            post, self.summarizer_provider, self.nli_provider, max_length=self.max_length
        )


class IndirectPipeline:
    """No training anywhere: fit() ignores the split."""

    def __init__(self, summarizer_provider, nli_provider, max_length=120):
        self._summarizer = IndirectSummarizer(summarizer_provider, nli_provider, max_length)

    def fit(self, corpus, split) -> IndirectSummarizer:
        return self._summarizer


def lead_k_baseline(post, k: int) -> Summary:
    """The first min(k, N) sentences of the post."""
    if k < 0:
        raise ValueError("k must be >= 0")
    n = len(post.sentences)
    selected = tuple(range(min(k, n)))
    scores = tuple(1.0 if i < k else 0.0 for i in range(n))
    return Summary(post_id=post.id, selected=selected, scores=scores)


class LeadKSummarizer:
    def __init__(self, k: int):
        self.k = k

    def summarize(self, question, post) -> Summary:
        return lead_k_baseline(post, self.k)


class LeadKPipeline:
    def __init__(self, k: int):
        self._summarizer = LeadKSummarizer(k)

    def fit(self, corpus, split) -> LeadKSummarizer:
        return self._summarizer


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------

def evaluate(
    pipeline,
    corpus: LabeledCorpus,
    splits,
    variant: str = "full",
    training_fraction: float | None = None,
    seed: int = 0,
    config_digest: str = "",
    macro: bool = False,
) -> EvalReport:
    """Fit per split, score its test posts, pool sentence-level counts."""
    by_id = corpus.posts_by_id()
    fold_metrics = []
    totals = [0, 0, 0]
    for split in splits:
        model = pipeline.fit(corpus, split)
        gold_n = pred_n = hit_n = 0
        for pid in split.test:
            post = by_id[pid]
            if post.gold_summary is None:
                continue
            summary = model.summarize(corpus.question_for(post), post)
            predicted = set(summary.selected)
            gold_n += len(post.gold_summary)
            pred_n += len(predicted)
            hit_n += len(post.gold_summary & predicted)
        fold_metrics.append(Metrics.from_counts(gold_n, pred_n, hit_n))
        totals[0] += gold_n
        totals[1] += pred_n
        totals[2] += hit_n

    if macro:
        k = len(fold_metrics)
        aggregate = Metrics(
            precision=sum(m.precision for m in fold_metrics) / k,
            recall=sum(m.recall for m in fold_metrics) / k,
            f1=sum(m.f1 for m in fold_metrics) / k,
            n_gold=totals[0],
            n_predicted=totals[1],
            n_correct=totals[2],
        )
    else:
        aggregate = Metrics.from_counts(*totals)
    return EvalReport(
        variant=variant,
        fold_metrics=fold_metrics,
        aggregate=aggregate,
        training_fraction=training_fraction,
        seed=seed,
        config_digest=config_digest,
        averaging="macro" if macro else "micro",
    )


def run_ablation(
    variant: AblationVariant,
    corpus: LabeledCorpus,
    splits,
    config: BundleConfig,
    embedder,
    lexicons=None,
    seed: int = 0,
    config_digest: str = "",
    macro: bool = False,
) -> EvalReport:
    pipeline = SupervisedPipeline(config, embedder, lexicons, variant=variant)
    return evaluate(
        pipeline,
        corpus,
        splits,
        variant=variant.value,
        seed=seed,
        config_digest=config_digest,
        macro=macro,
    )


def _stratified_prefix(corpus, train_ids, fraction, seed):
    """Per-type seeded-shuffle prefixes; nested across fractions, and every
    question type keeps at least one post even at small fractions."""
    by_id = corpus.posts_by_id()
    groups: dict = {}
    for pid in train_ids:
        qtype = corpus.question_for(by_id[pid]).gold_type
        groups.setdefault(qtype, []).append(pid)
    keep = set()
    for qtype in sorted(groups, key=lambda t: t.value):
        keep.update(sample_prefix(groups[qtype], fraction, seed))
    return keep


def low_resource_curve(
    corpus: LabeledCorpus,
    fractions,
    seeds,
    config: BundleConfig,
    embedder,
    lexicons=None,
    indirect_pipeline=None,
    ratios=(8, 1, 1),
    config_digest: str = "",
    macro: bool = False,
) -> list[EvalReport]:
    """Retrain on nested training subsets, evaluate on the fixed test fold.

    Subsets are per-type prefixes of seeded shuffles, reordered to the
    original train order so the fraction-1.0 run is identical to a plain
    evaluation. The indirect pipeline, which consumes no training data,
    contributes one constant report per seed.
    """
    for fraction in fractions:
        if not 0 < fraction <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    reports = []
    for seed in seeds:
        split = split_corpus(corpus, ratios=ratios, seed=seed)
        for fraction in fractions:
            keep = _stratified_prefix(corpus, split.train, fraction, seed)
            sub_split = DataSplit(
                train=[pid for pid in split.train if pid in keep],
                dev=split.dev,
                test=split.test,
                seed=seed,
            )
            pipeline = SupervisedPipeline(config, embedder, lexicons)
            reports.append(
                evaluate(
                    pipeline,
                    corpus,
                    [sub_split],
                    variant="supervised",
                    training_fraction=fraction,
                    seed=seed,
                    config_digest=config_digest,
                    macro=macro,
                )
            )
        if indirect_pipeline is not None:
            reports.append(
                evaluate(
                    indirect_pipeline,
                    corpus,
                    [split],
                    variant="indirect",
                    training_fraction=None,
                    seed=seed,
                    config_digest=config_digest,
                    macro=macro,
                )
            )
    return reports


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _metrics_record(m: Metrics) -> dict:
    return {
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
        "n_gold": m.n_gold,
        "n_predicted": m.n_predicted,
        "n_correct": m.n_correct,
    }


def report_record(report: EvalReport) -> dict:
    return {
        "record": REPORT_RECORD,
        "record_version": REPORT_VERSION,
        "variant": report.variant,
        "training_fraction": report.training_fraction,
        "seed": report.seed,
        "config_digest": report.config_digest,
        "averaging": report.averaging,
        "aggregate": _metrics_record(report.aggregate),
        "folds": [_metrics_record(m) for m in report.fold_metrics],
    }


def write_reports(path, reports):
    with open(path, "w", encoding="utf-8") as handle:
        for report in reports:
            handle.write(json.dumps(report_record(report), sort_keys=True) + "\n")


def load_reports(path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def render_table(reports) -> str:
    """Fixed-width table over aggregate metrics, 4 decimal places."""
    header = f"{'variant':<24} {'fraction':>8} {'folds':>5} {'precision':>9} {'recall':>9} {'f1':>9}"
    lines = [header, "-" * len(header)]
    for report in reports:
        fraction = f"{report.training_fraction:.2f}" if report.training_fraction is not None else "-"
        agg = report.aggregate
        lines.append(
            f"{report.variant:<24} {fraction:>8} {len(report.fold_metrics):>5} "
            f"{agg.precision:>9.4f} {agg.recall:>9.4f} {agg.f1:>9.4f}"
        )
    return "\n".join(lines) + "\n"
