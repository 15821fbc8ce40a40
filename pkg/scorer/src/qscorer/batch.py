"""Batch scoring over a line-delimited dataset file.

Input is the public visual-instruction layout, one object per line:

  {"id": str, "image": str, "conversations": [{"from": "human"|"gpt",
   "value": str}, ...], "task_type": str?}

Output is the flat score layout the curation tooling consumes:

  {"id": str, "clip_score": float, "loss": float, "token_length": int,
   "task_type": str}

Scoring a large corpus is slow and interruptible, so output is written
incrementally and runs are resumable: a rerun with --resume skips every id
already present in the output file and appends only the remainder. Because
records are emitted in input order with a fixed serialization, a resumed
run converges to the same bytes as an uninterrupted one.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .config import ScorerConfig
from .mock import mock_score
from .scoring import (
    ImageEncoder,
    LossModel,
    ScoringError,
    TextEncoder,
    score_loss,
    score_similarity,
    similarity_text,
)

log = logging.getLogger(__name__)

_SPEAKER = {"human": "human", "gpt": "assistant", "assistant": "assistant"}


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    image: str
    conversations: tuple[tuple[str, str], ...]
    task_type: str


@dataclass(frozen=True)
class BatchSummary:
    scored: int
    skipped: int  # per-sample scoring failures
    resumed: int  # ids already present before this run


def read_dataset(path: str | Path) -> Iterator[DatasetRecord]:
    """Yield dataset records; malformed lines abort with their line number."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                convs = tuple(
                    (_SPEAKER.get(t["from"], t["from"]), t["value"])
                    for t in obj["conversations"]
                )
                yield DatasetRecord(
                    id=str(obj["id"]),
                    image=obj.get("image", ""),
                    conversations=convs,
                    task_type=obj.get("task_type", "unknown"),
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ScoringError(f"{path}:{lineno}: bad dataset line ({exc!r})")


def score_line(sid: str, sim: float, loss: float, token: int, task: str) -> str:
    obj = {"id": sid, "clip_score": sim, "loss": loss,
           "token_length": token, "task_type": task}
    return json.dumps(obj, separators=(",", ":"))


def _existing_ids(path: Path) -> set[str]:
    """Ids already in the output; a truncated final line is discarded so the
    rerun rewrites it."""
    if not path.exists():
        return set()
    ids: set[str] = set()
    keep = 0
    with open(path, "r+", encoding="utf-8") as fh:
        while True:
            line = fh.readline()
            if not line:
                break
            if not line.endswith("\n"):
                fh.truncate(keep)
                log.warning("discarded truncated final line in %s", path)
                break
            try:
                ids.add(str(json.loads(line)["id"]))
            except (json.JSONDecodeError, KeyError):
                fh.truncate(keep)
                log.warning("discarded unparseable tail of %s", path)
                break
            keep = fh.tell()
    return ids


def batch_score(
    dataset_path: str | Path,
    out_path: str | Path,
    config: ScorerConfig,
    *,
    resume: bool = False,
    image_encoder: ImageEncoder | None = None,
    text_encoder: TextEncoder | None = None,
    loss_model: LossModel | None = None,
) -> BatchSummary:
    """Score every dataset record, appending one score line per sample.

    Mock mode needs no models. Real mode loads the configured checkpoints
    unless stub callables are injected. A sample that fails to score is
    logged and skipped; the run continues.
    """
    out_path = Path(out_path)
    done = _existing_ids(out_path) if resume else set()
    if not resume and out_path.exists():
        os.unlink(out_path)

    if config.mode == "real":
        if image_encoder is None or text_encoder is None:
            from .scoring import load_real_encoders

            image_encoder, text_encoder = load_real_encoders(config)
        if loss_model is None:
            from .scoring import load_real_loss_model

            loss_model = load_real_loss_model(config)

    scored = skipped = resumed = 0
    with open(out_path, "a", encoding="utf-8", newline="\n") as fh:
        for record in read_dataset(dataset_path):
            if record.id in done:
                resumed += 1
                continue
            try:
                if config.mode == "mock":
                    sim, loss, token = mock_score(
                        record.id, record.conversations, record.task_type,
                        config.seed,
                    )
                else:
                    text = similarity_text(record.conversations, config)
                    sim = score_similarity(
                        record.image, text, config, image_encoder, text_encoder
                    )
                    loss, token = score_loss(
                        record.image, record.conversations, config, loss_model
                    )
            except ScoringError as exc:
                log.warning("skipping %s: %s", record.id, exc)
                skipped += 1
                continue
            fh.write(score_line(record.id, sim, loss, token,
                                record.task_type) + "\n")
            scored += 1
    return BatchSummary(scored=scored, skipped=skipped, resumed=resumed)
