"""HTTP client for the inference sidecar.

Wire protocol (shared with the sidecar):

    POST /v1/embed     {"texts": [..]}                  -> {"dim": D, "vectors": [[..]], "model": ..}
    POST /v1/summarize {"text": .., "max_tokens": N}    -> {"summary": .., "model": ..}
    POST /v1/nli       {"premise": .., "hypotheses": [..]} -> {"probs": [[e,c,n], ..], "model": ..}

The ASSORT_MODEL_URL environment variable overrides the configured base
address. Transient failures are retried with exponential backoff; every
response is schema-validated before reaching core modules.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import requests

ENV_BASE_URL = "ASSORT_MODEL_URL"
NLI_BATCH = 16


class GatewayError(RuntimeError):
    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


@dataclass
class GatewayConfig:
    base_url: str = ""
    timeout: float = 10.0
    max_retries: int = 3
    backoff: float = 0.2
    parallelism: int = 4
    max_input_tokens: int = 900

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def resolved_base_url(self) -> str:
        url = os.environ.get(ENV_BASE_URL) or self.base_url
        if not url:
            raise GatewayError(
                f"no model service address: set {ENV_BASE_URL} or configure gateway_url"
            )
        return url.rstrip("/")


def truncate_tokens(text: str, budget: int) -> str:
    """Keep the leading ``budget`` whitespace-delimited tokens."""
    tokens = text.split()
    if len(tokens) <= budget:
        return text
    return " ".join(tokens[:budget])


class GatewayClient:
    """Blocking request/response client with retries; safe for concurrent use."""

    def __init__(self, config: GatewayConfig | None = None, session=None):
        self.config = config or GatewayConfig()
        self._session = session or requests.Session()
        self.last_attempts = 0  # attempts consumed by the most recent request

    def _post(self, path: str, payload: dict) -> dict:
        url = self.config.resolved_base_url() + path
        attempts = 0
        last_error = None
        while attempts <= self.config.max_retries:
            attempts += 1
            self.last_attempts = attempts
            try:
                response = self._session.post(url, json=payload, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = f"{type(exc).__name__}: {exc}"
            else:
                if response.status_code >= 500:
                    last_error = f"server error {response.status_code}"
                elif response.status_code >= 400:
                    raise GatewayError(
                        f"{path}: request rejected ({response.status_code}): {response.text[:200]}",
                        attempts=attempts,
                    )
                else:
                    try:
                        return response.json()
                    except ValueError:
                        raise GatewayError(
                            f"{path}: response is not valid JSON", attempts=attempts
                        )
            if attempts <= self.config.max_retries:
                time.sleep(self.config.backoff * 2 ** (attempts - 1))
        raise GatewayError(
            f"{path}: failed after {attempts} attempts ({last_error})", attempts=attempts
        )

    # -- endpoints ----------------------------------------------------------

    def embed(self, texts):
        """Returns (vectors, model identity); validates count and dimension."""
        if not texts:
            raise GatewayError("/v1/embed: no texts given")
        body = self._post("/v1/embed", {"texts": list(texts)})
        vectors = body.get("vectors")
        dim = body.get("dim")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise GatewayError(
                f"/v1/embed: expected {len(texts)} vectors, got "
                f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
            )
        out = []
        for row in vectors:
            arr = np.asarray(row, dtype=np.float64)
            if arr.ndim != 1 or (dim is not None and arr.size != dim):
                raise GatewayError(f"/v1/embed: vector of length {arr.size}, declared dim {dim}")
            if not np.all(np.isfinite(arr)):
                raise GatewayError("/v1/embed: non-finite values in response")
            out.append(arr)
        return out, body.get("model", "")

    def summarize(self, text: str, max_tokens: int):
        """Returns (summary text, model identity); input is front-truncated."""
        clipped = truncate_tokens(text, self.config.max_input_tokens)
        body = self._post("/v1/summarize", {"text": clipped, "max_tokens": max_tokens})
        summary = body.get("summary")
        if not isinstance(summary, str) or not summary.strip():
            raise GatewayError("/v1/summarize: empty summary in response")
        return summary, body.get("model", "")

    def nli(self, premise: str, hypotheses):
        """Returns one (entail, contradict, neutral) row per hypothesis, in order."""
        hypotheses = list(hypotheses)
        if not hypotheses:
            return []
        chunks = [hypotheses[i : i + NLI_BATCH] for i in range(0, len(hypotheses), NLI_BATCH)]

        def call(chunk):
            body = self._post("/v1/nli", {"premise": premise, "hypotheses": chunk})
            probs = body.get("probs")
            if not isinstance(probs, list) or len(probs) != len(chunk):
                raise GatewayError(
                    f"/v1/nli: expected {len(chunk)} rows, got "
                    f"{len(probs) if isinstance(probs, list) else type(probs).__name__}"
                )
            rows = []
            for row in probs:
                if not isinstance(row, list) or len(row) != 3:
                    raise GatewayError(f"/v1/nli: malformed probability row {row!r}")
                values = tuple(float(v) for v in row)
                if any(v < 0 or v > 1 for v in values) or not math.isclose(
                    sum(values), 1.0, abs_tol=1e-6
                ):
                    raise GatewayError(f"/v1/nli: row {values!r} is not a distribution")
                rows.append(values)
            return rows

        if len(chunks) == 1:
            return call(chunks[0])
        with ThreadPoolExecutor(max_workers=max(1, self.config.parallelism)) as pool:
            results = list(pool.map(call, chunks))
        return [row for chunk_rows in results for row in chunk_rows]


def remote_embed(config: GatewayConfig, texts):
    """One-shot embedding call; returns (vectors, model identity)."""
    return GatewayClient(config).embed(texts)


def remote_summarize(config: GatewayConfig, text: str, max_tokens: int):
    """One-shot summarization call; returns (summary, model identity)."""
    return GatewayClient(config).summarize(text, max_tokens)


def remote_nli(config: GatewayConfig, premise: str, hypotheses):
    """One-shot NLI call; returns (entail, contradict, neutral) rows in order."""
    return GatewayClient(config).nli(premise, hypotheses)
