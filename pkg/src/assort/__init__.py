"""Extractive summarization of Stack Overflow answer posts.

Two pipelines: a supervised ensemble (question-type classifier plus
per-type sentence classifiers) and an indirect-supervision pipeline
(abstractive summary traced back to original sentences via NLI), with a
shared evaluation harness.
"""

__version__ = "0.1.0"
