"""Inference sidecar for the assort toolkit.

Serves /v1/embed, /v1/summarize, and /v1/nli behind the shared wire
protocol, backed either by real pretrained models or by deterministic
stubs (no downloads) for integration testing.
"""

__version__ = "0.1.0"
