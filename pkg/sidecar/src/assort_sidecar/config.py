"""Service configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_EMBEDDER = "jeniya/BERTOverflow"
DEFAULT_SUMMARIZER = "facebook/bart-large-cnn"
DEFAULT_NLI = "roberta-large-mnli"

DEFAULT_BUDGETS = {"embed": 512, "summarize": 1024, "nli": 512}


@dataclass
class SidecarConfig:
    embedder_model: str = DEFAULT_EMBEDDER
    summarizer_model: str = DEFAULT_SUMMARIZER
    nli_model: str = DEFAULT_NLI
    port: int = 8008
    stub: bool = False
    stub_dimension: int = 768
    stub_seed: int = 0
    max_input_tokens: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    device: str = "cpu"
    batch_size: int = 16
