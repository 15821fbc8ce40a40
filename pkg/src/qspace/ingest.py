"""Streaming I/O and the joined quality index.

File formats (all UTF-8, line-delimited):

  dataset:  {"id": str, "image": str, "conversations": [{"from": "human"|"gpt",
            "value": str}, ...], "task_type": str?}  -- one object per line,
            mirroring the public LLaVA/SVIT layout ("gpt" -> assistant).
  scores:   {"id": str, "clip_score": float, "loss": float,
            "token_length": int, "task_type": str}  -- one flat object per line.
  manifest: line 1 is a header object {"version": 1, "strategy", "params",
            "source_count"}; every following line is one id. Output is
            byte-exact deterministic.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .core import DataError, SampleRecord, ScoreRecord, SubsetManifest, validate_sample

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1

_SPEAKER_FROM_WIRE = {"human": "human", "gpt": "assistant", "assistant": "assistant"}
_WIRE_FROM_SPEAKER = {"human": "human", "assistant": "gpt"}


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write to a temp file in the target directory, then rename into place.

    Guarantees no partial output is ever visible at `path`.
    """
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sample_from_obj(obj: dict, where: str) -> SampleRecord:
    try:
        convs = tuple(
            (_SPEAKER_FROM_WIRE.get(turn["from"], turn["from"]), turn["value"])
            for turn in obj["conversations"]
        )
        return SampleRecord(
            id=str(obj["id"]),
            image=obj.get("image", ""),
            conversations=convs,
            task_type=obj.get("task_type", "unknown"),
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"{where}: malformed sample object ({exc!r})") from exc


def sample_to_obj(record: SampleRecord) -> dict:
    obj = {
        "id": record.id,
        "image": record.image,
        "conversations": [
            {"from": _WIRE_FROM_SPEAKER.get(sp, sp), "value": text}
            for sp, text in record.conversations
        ],
    }
    if record.task_type != "unknown":
        obj["task_type"] = record.task_type
    return obj


def load_dataset(path: str | Path, lenient: bool = False) -> Iterator[SampleRecord]:
    """Yield validated SampleRecords from a line-delimited dataset file.

    Strict by default: a malformed or invalid line aborts with its line
    number. With lenient=True bad lines are logged and skipped.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = _sample_from_obj(json.loads(line), where)
            except json.JSONDecodeError as exc:
                if lenient:
                    log.warning("skipping %s: %s", where, exc)
                    continue
                raise DataError(f"{where}: invalid JSON ({exc})") from exc
            except DataError:
                if lenient:
                    log.warning("skipping malformed line %s", where)
                    continue
                raise
            violations = validate_sample(record)
            if violations:
                if lenient:
                    log.warning("skipping %s: %s", where, "; ".join(violations))
                    continue
                raise DataError(f"{where}: invalid sample: {'; '.join(violations)}")
            yield record


def load_scores(path: str | Path) -> list[ScoreRecord]:
    """Parse and range-check a score file; errors name the line, id and field."""
    records: list[ScoreRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON ({exc})") from exc
            try:
                record = ScoreRecord(
                    id=str(obj["id"]),
                    clip_score=float(obj["clip_score"]),
                    loss=float(obj["loss"]),
                    token_length=int(obj["token_length"]),
                    task_type=obj.get("task_type", "unknown"),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{where}: malformed score object ({exc!r})") from exc
            violations = record.violations()
            if violations:
                raise DataError(
                    f"{where}: id {record.id!r}: {'; '.join(violations)}"
                )
            records.append(record)
    return records


@dataclass(frozen=True)
class QualityIndex:
    """The joined quality space: every sample with both attributes, plus the
    two canonical axis orderings.

    Rows are stored in ascending-id order, so the index is a pure function of
    the input record *set* (permuting the input yields an identical index).
    Immutable after construction; safe to share across threads.
    """

    ids: np.ndarray  # unicode, ascending
    clip_score: np.ndarray
    loss: np.ndarray
    token_length: np.ndarray
    task_type: np.ndarray
    sim_order: np.ndarray  # row indices, ascending clip_score, ties by id
    loss_order: np.ndarray
    sim_rank: np.ndarray  # position of each row in sim_order (0-based)
    loss_rank: np.ndarray
    samples: dict[str, SampleRecord] | None = None
    _row_of: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def sorted_by_similarity(self) -> list[str]:
        return list(self.ids[self.sim_order])

    @property
    def sorted_by_loss(self) -> list[str]:
        return list(self.ids[self.loss_order])

    def row(self, sample_id: str) -> int:
        return self._row_of[sample_id]

    def axis_values(self, axis: str) -> np.ndarray:
        if axis == "similarity":
            return self.clip_score
        if axis == "loss":
            return self.loss
        if axis == "token_length":
            return self.token_length
        raise ValueError(f"unknown axis {axis!r}")


def build_index(
    scores: list[ScoreRecord],
    samples: Iterable[SampleRecord] | None = None,
    lenient: bool = False,
) -> QualityIndex:
    """Join scores (and optionally samples) into a QualityIndex.

    Strict join: when samples are supplied, score ids and sample ids must
    match exactly; mismatches abort listing up to 10 offenders. lenient=True
    instead drops unmatched records with a logged count. Silent drops would
    corrupt percentile math, hence the strict default.
    """
    if not scores:
        raise DataError("build_index: empty score list")
    by_id: dict[str, ScoreRecord] = {}
    for rec in scores:
        if rec.id in by_id:
            raise DataError(f"duplicate id in scores: {rec.id!r}")
        by_id[rec.id] = rec

    sample_map: dict[str, SampleRecord] | None = None
    if samples is not None:
        sample_map = {}
        for s in samples:
            if s.id in sample_map:
                raise DataError(f"duplicate id in samples: {s.id!r}")
            sample_map[s.id] = s
        missing_samples = sorted(set(by_id) - set(sample_map))
        missing_scores = sorted(set(sample_map) - set(by_id))
        if missing_samples or missing_scores:
            if lenient:
                log.warning(
                    "lenient join: dropping %d unmatched score ids and "
                    "%d unmatched sample ids",
                    len(missing_samples),
                    len(missing_scores),
                )
                for sid in missing_samples:
                    del by_id[sid]
                for sid in missing_scores:
                    del sample_map[sid]
                if not by_id:
                    raise DataError("lenient join dropped every record")
            else:
                parts = []
                if missing_samples:
                    parts.append(
                        f"score ids missing from samples: {missing_samples[:10]}"
                    )
                if missing_scores:
                    parts.append(
                        f"sample ids missing from scores: {missing_scores[:10]}"
                    )
                raise DataError("join mismatch: " + "; ".join(parts))

    ordered = sorted(by_id.values(), key=lambda r: r.id)
    ids = np.array([r.id for r in ordered])
    clip_score = np.array([r.clip_score for r in ordered], dtype=np.float64)
    loss = np.array([r.loss for r in ordered], dtype=np.float64)
    token_length = np.array([r.token_length for r in ordered], dtype=np.int64)
    task_type = np.array([r.task_type for r in ordered])

    # rows are id-ascending, so a stable sort by value keeps ties id-ordered
    sim_order = np.argsort(clip_score, kind="stable")
    loss_order = np.argsort(loss, kind="stable")
    sim_rank = np.empty(len(ids), dtype=np.int64)
    sim_rank[sim_order] = np.arange(len(ids))
    loss_rank = np.empty(len(ids), dtype=np.int64)
    loss_rank[loss_order] = np.arange(len(ids))

    return QualityIndex(
        ids=ids,
        clip_score=clip_score,
        loss=loss,
        token_length=token_length,
        task_type=task_type,
        sim_order=sim_order,
        loss_order=loss_order,
        sim_rank=sim_rank,
        loss_rank=loss_rank,
        samples=sample_map,
        _row_of={sid: i for i, sid in enumerate(ids)},
    )


def write_manifest(manifest: SubsetManifest, path: str | Path) -> None:
    header = {
        "version": MANIFEST_VERSION,
        "strategy": manifest.strategy,
        "params": manifest.params,
        "source_count": manifest.source_count,
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    lines.extend(manifest.ids)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path: str | Path) -> SubsetManifest:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first:
            raise DataError(f"{path}: empty manifest file")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: missing or invalid manifest header") from exc
        if not isinstance(header, dict) or "version" not in header:
            raise DataError(f"{path}: missing or invalid manifest header")
        if header["version"] != MANIFEST_VERSION:
            raise DataError(
                f"{path}: unknown manifest version {header['version']!r}"
            )
        ids = tuple(line.strip() for line in fh if line.strip())
    return SubsetManifest(
        ids=ids,
        strategy=header.get("strategy", ""),
        params={str(k): str(v) for k, v in header.get("params", {}).items()},
        source_count=int(header.get("source_count", len(ids))),
    )


def export_subset_dataset(
    manifest: SubsetManifest,
    samples: Iterable[SampleRecord],
    out_path: str | Path,
) -> None:
    """Project the sample stream down to the manifest ids, in manifest order,
    written in the same dataset format `load_dataset` reads."""
    wanted = set(manifest.ids)
    found: dict[str, SampleRecord] = {}
    for record in samples:
        if record.id in wanted:
            found[record.id] = record
    missing = [sid for sid in manifest.ids if sid not in found]
    if missing:
        raise DataError(f"export: manifest ids missing from samples: {missing[:10]}")
    lines = [
        json.dumps(sample_to_obj(found[sid]), sort_keys=True, separators=(",", ":"))
        for sid in manifest.ids
    ]
    atomic_write_text(out_path, "".join(line + "\n" for line in lines))
