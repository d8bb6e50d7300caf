"""Cohort screening toolkit: criterion classification and extractive summaries."""

from clinscreen._core import (
    CRITERIA,
    ClinscreenError,
    Pipeline,
    __version__,
    corpus_stats,
    generate_synthetic,
    micro_prf,
    preprocess,
    rouge,
    summarize,
    train,
)

__all__ = [
    "CRITERIA",
    "ClinscreenError",
    "Pipeline",
    "__version__",
    "corpus_stats",
    "generate_synthetic",
    "micro_prf",
    "preprocess",
    "rouge",
    "summarize",
    "train",
]
