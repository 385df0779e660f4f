import pathlib

import pytest

from assort import corpus as corpus_mod
from assort.embeddings import StubEmbeddingProvider
from assort.ensemble import BundleConfig
from assort.fnn import TrainConfig
from assort.question_classifier import SvmTrainConfig

DATA_DIR = pathlib.Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus_50.jsonl"
TINY_CORPUS = DATA_DIR / "tiny_corpus.jsonl"

# Desk-scale training configuration: small embedding dim and hidden width,
# a learning rate suited to training the head from scratch on tens of posts.
DESK_CONFIG_VALUES = {
    "embedding_dim": 64,
    "embedding_seed": 0,
    "svm_epochs": 80,
    "fnn_hidden_width": 64,
    "fnn_learning_rate": 0.003,
    "fnn_epochs": 200,
    "fnn_batch_size": 512,
}


def desk_bundle_config(seed: int = 42) -> BundleConfig:
    return BundleConfig(
        svm=SvmTrainConfig(epochs=80, seed=seed),
        fnn=TrainConfig(
            learning_rate=0.003, epochs=200, hidden_width=64, batch_size=512, seed=seed
        ),
    )


@pytest.fixture(scope="session")
def fixture_corpus():
    return corpus_mod.load_corpus(FIXTURE_CORPUS)


@pytest.fixture(scope="session")
def tiny_corpus():
    return corpus_mod.load_corpus(TINY_CORPUS)


@pytest.fixture(scope="session")
def stub_embedder():
    return StubEmbeddingProvider(dimension=64, seed=0)


def make_titles():
    """90 keyword-separable synthetic titles, 30 per type, deterministic."""
    from assort.question_classifier import QuestionType

    topics = [
        "merge branches", "resize an image", "sort a dataframe", "cache api calls",
        "parse yaml", "deploy a container", "stream a file", "batch requests",
        "encode base64", "schedule tasks", "compress logs", "rotate keys",
        "trace memory", "mock a client", "paginate results", "throttle events",
        "validate forms", "hash passwords", "retry uploads", "watch folders",
        "sign tokens", "seed a database", "profile queries", "chunk uploads",
        "diff configs", "pin versions", "strip whitespace", "escape quotes",
        "flatten lists", "group records",
    ]
    questions = []
    for i, topic in enumerate(topics):
        questions.append((f"how to {topic} quickly", QuestionType.HOW_TO, f"h{i}"))
        questions.append(
            (f"what is the meaning of {topic} internals", QuestionType.CONCEPTUAL, f"c{i}")
        )
        questions.append(
            (f"error while trying the {topic} step fails", QuestionType.BUG_FIXING, f"b{i}")
        )
    return questions
