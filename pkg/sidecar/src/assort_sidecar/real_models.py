"""Pretrained-model providers (lazy transformers/torch imports).

Embeddings are the mean of all token embeddings (attention-mask weighted).
NLI logits are softmaxed and reordered to (entail, contradict, neutral)
using the checkpoint's id2label, so checkpoints with different label
orders stay wire-compatible.
"""

from __future__ import annotations

import numpy as np


class RealModels:
    def __init__(self, config):
        import torch
        from transformers import (
            AutoModel,
            AutoModelForSequenceClassification,
            AutoTokenizer,
            pipeline,
        )

        self._torch = torch
        self.device = config.device
        self.batch_size = config.batch_size

        self.embed_tokenizer = AutoTokenizer.from_pretrained(config.embedder_model)
        self.embed_model = AutoModel.from_pretrained(config.embedder_model).to(self.device).eval()

        self.summarizer = pipeline(
            "summarization", model=config.summarizer_model, device=-1 if self.device == "cpu" else 0
        )

        self.nli_tokenizer = AutoTokenizer.from_pretrained(config.nli_model)
        self.nli_model = (
            AutoModelForSequenceClassification.from_pretrained(config.nli_model)
            .to(self.device)
            .eval()
        )
        self._nli_order = self._resolve_label_order(self.nli_model.config.id2label)

        self.identities = {
            "embedder": config.embedder_model,
            "summarizer": config.summarizer_model,
            "nli": config.nli_model,
        }

    @staticmethod
    def _resolve_label_order(id2label) -> list[int]:
        """Indices of (entail, contradict, neutral) in the model's logit order."""
        slots = {"entail": None, "contradict": None, "neutral": None}
        for idx, label in id2label.items():
            name = str(label).lower()
            for key in slots:
                if name.startswith(key):
                    slots[key] = int(idx)
        if any(v is None for v in slots.values()):
            raise ValueError(f"cannot map NLI labels {id2label!r} to entail/contradict/neutral")
        return [slots["entail"], slots["contradict"], slots["neutral"]]

    def embed(self, texts):
        torch = self._torch
        out = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            encoded = self.embed_tokenizer(
                batch, padding=True, truncation=True, return_tensors="pt"
            ).to(self.device)
            with torch.no_grad():
                hidden = self.embed_model(**encoded).last_hidden_state
            mask = encoded["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
            out.extend(pooled.cpu().double().numpy())
        return [vec.tolist() for vec in out]

    def summarize(self, text, max_tokens):
        result = self.summarizer(
            text, max_length=max_tokens, min_length=min(16, max_tokens), truncation=True
        )
        return result[0]["summary_text"].strip()

    def nli(self, premise, hypotheses):
        torch = self._torch
        rows = []
        for start in range(0, len(hypotheses), self.batch_size):
            batch = hypotheses[start : start + self.batch_size]
            encoded = self.nli_tokenizer(
                [premise] * len(batch), batch, padding=True, truncation=True, return_tensors="pt"
            ).to(self.device)
            with torch.no_grad():
                logits = self.nli_model(**encoded).logits
            probs = torch.softmax(logits, dim=-1).cpu().double().numpy()
            for row in probs:
                ordered = np.array([row[i] for i in self._nli_order])
                ordered = ordered / ordered.sum()  # renormalize after reordering
                rows.append(ordered.tolist())
        return rows
