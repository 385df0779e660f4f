"""Flat key-value run configuration.

A config file is a single JSON object of scalars. Unknown keys are
rejected so typos fail loudly. The digest of the effective config (defaults
plus file plus CLI overrides) is recorded in every manifest and report.
"""

from __future__ import annotations

import hashlib
import json

from assort.embeddings import EmbeddingProviderConfig
from assort.ensemble import BundleConfig
from assort.fnn import TrainConfig
from assort.gateway import GatewayConfig
from assort.question_classifier import SvmTrainConfig


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "embedding_backing": "stub",  # stub | file | remote
    "embedding_dim": 768,
    "embedding_seed": 0,
    "embedding_file": "",
    "embedding_cache": "",
    "svm_learning_rate": 0.1,
    "svm_l2": 1e-4,
    "svm_epochs": 200,
    "svm_temperature": 1.0,
    "fnn_hidden_width": 256,
    "fnn_learning_rate": 1e-5,
    "fnn_epochs": 150,
    "fnn_batch_size": 512,
    "fnn_beta1": 0.9,
    "fnn_beta2": 0.999,
    "fnn_epsilon": 1e-8,
    "fnn_positive_weight": 1.0,
    "theta": 0.5,
    "tune_theta": False,
    "gateway_url": "",
    "gateway_timeout": 10.0,
    "gateway_retries": 3,
    "gateway_backoff": 0.2,
    "gateway_parallelism": 4,
    "gateway_max_input_tokens": 900,
    "summary_max_tokens": 120,
    "lexicon_dir": "",
    "macro_average": False,
    "lead_fallback": False,
}


def load_config(path=None, overrides=None) -> dict:
    """Defaults, then file values, then overrides; unknown keys are errors."""
    config = dict(DEFAULTS)
    for source_name, source in (("config file", path), ("override", overrides)):
        if source is None:
            continue
        if source_name == "config file":
            with open(source, encoding="utf-8") as handle:
                try:
                    values = json.load(handle)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"{source}: invalid JSON ({exc.msg})")
            if not isinstance(values, dict):
                raise ConfigError(f"{source}: config must be a flat JSON object")
        else:
            values = source
        for key, value in values.items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            default = DEFAULTS[key]
            if isinstance(default, bool):
                if not isinstance(value, bool):
                    raise ConfigError(f"config key {key!r} must be a boolean")
            elif isinstance(default, (int, float)):
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"config key {key!r} must be a number")
                value = type(default)(value) if isinstance(default, float) else value
                if isinstance(default, int) and not isinstance(value, int):
                    raise ConfigError(f"config key {key!r} must be an integer")
            elif isinstance(default, str) and not isinstance(value, str):
                raise ConfigError(f"config key {key!r} must be a string")
            config[key] = value
    return config


def config_digest(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def bundle_config(config: dict, seed: int = 0) -> BundleConfig:
    return BundleConfig(
        svm=SvmTrainConfig(
            learning_rate=config["svm_learning_rate"],
            l2=config["svm_l2"],
            epochs=config["svm_epochs"],
            temperature=config["svm_temperature"],
            seed=seed,
        ),
        fnn=TrainConfig(
            learning_rate=config["fnn_learning_rate"],
            beta1=config["fnn_beta1"],
            beta2=config["fnn_beta2"],
            epsilon=config["fnn_epsilon"],
            batch_size=config["fnn_batch_size"],
            epochs=config["fnn_epochs"],
            hidden_width=config["fnn_hidden_width"],
            positive_weight=config["fnn_positive_weight"],
            seed=seed,
        ),
        theta=config["theta"],
        tune_theta=config["tune_theta"],
    )


def embedding_config(config: dict) -> EmbeddingProviderConfig:
    return EmbeddingProviderConfig(
        backing=config["embedding_backing"],
        dimension=config["embedding_dim"],
        seed=config["embedding_seed"],
        file_path=config["embedding_file"],
        cache_path=config["embedding_cache"],
    )


def gateway_config(config: dict) -> GatewayConfig:
    return GatewayConfig(
        base_url=config["gateway_url"],
        timeout=config["gateway_timeout"],
        max_retries=config["gateway_retries"],
        backoff=config["gateway_backoff"],
        parallelism=config["gateway_parallelism"],
        max_input_tokens=config["gateway_max_input_tokens"],
    )
