"""Quality-score producer: image-text similarity and autoregressive loss,
with a deterministic mock mode for pipeline work without GPUs."""

from .batch import BatchSummary, DatasetRecord, batch_score, read_dataset, score_line
from .config import ScorerConfig, assemble_text
from .mock import mock_score
from .scoring import (
    ScoringError,
    load_real_encoders,
    load_real_loss_model,
    score_loss,
    score_similarity,
    similarity_text,
)

__version__ = "0.1.0"

__all__ = [
    "BatchSummary",
    "DatasetRecord",
    "ScorerConfig",
    "ScoringError",
    "assemble_text",
    "batch_score",
    "load_real_encoders",
    "load_real_loss_model",
    "mock_score",
    "read_dataset",
    "score_line",
    "score_loss",
    "score_similarity",
    "similarity_text",
    "__version__",
]
