"""FastAPI application implementing the wire protocol.

    POST /v1/embed     {"texts": [..]}                     -> {"dim", "vectors", "model"}
    POST /v1/summarize {"text", "max_tokens"}              -> {"summary", "model"}
    POST /v1/nli       {"premise", "hypotheses": [..]}     -> {"probs", "model"}
    GET  /v1/health                                        -> {"ok", "models", "stub"}

Inputs above the per-model token budget are rejected with 413 and the
budget named in the message. Every response carries the resolved model
identity for provenance.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from assort_sidecar.config import SidecarConfig
from assort_sidecar.stub_models import StubModels


class EmbedRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class SummarizeRequest(BaseModel):
    text: str
    max_tokens: int = 120


class NliRequest(BaseModel):
    premise: str
    hypotheses: list[str] = Field(min_length=1)


def _check_budget(texts, budget: int, endpoint: str):
    for text in texts:
        n_tokens = len(text.split())
        if n_tokens > budget:
            raise HTTPException(
                status_code=413,
                detail=(
                    f"{endpoint}: input of {n_tokens} tokens exceeds the "
                    f"token budget of {budget}"
                ),
            )


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    config = config or SidecarConfig()
    if config.stub:
        models = StubModels(dimension=config.stub_dimension, seed=config.stub_seed)
    else:
        from assort_sidecar.real_models import RealModels

        models = RealModels(config)

    app = FastAPI(title="assort-sidecar", version="0.1.0")
    app.state.config = config
    app.state.models = models

    @app.get("/v1/health")
    def health():
        return {"ok": True, "models": models.identities, "stub": config.stub}

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        _check_budget(request.texts, config.max_input_tokens["embed"], "/v1/embed")
        vectors = models.embed(request.texts)
        return {
            "dim": len(vectors[0]),
            "vectors": vectors,
            "model": models.identities["embedder"],
        }

    @app.post("/v1/summarize")
    def summarize(request: SummarizeRequest):
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="/v1/summarize: empty input text")
        if request.max_tokens < 1:
            raise HTTPException(status_code=400, detail="/v1/summarize: max_tokens must be >= 1")
        _check_budget([request.text], config.max_input_tokens["summarize"], "/v1/summarize")
        summary = models.summarize(request.text, request.max_tokens)
        return {"summary": summary, "model": models.identities["summarizer"]}

    @app.post("/v1/nli")
    def nli(request: NliRequest):
        budget = config.max_input_tokens["nli"]
        _check_budget([request.premise, *request.hypotheses], budget, "/v1/nli")
        probs = models.nli(request.premise, request.hypotheses)
        return {"probs": probs, "model": models.identities["nli"]}

    return app
