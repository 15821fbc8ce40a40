"""Domain types shared by the whole toolkit.

Every type here is a frozen dataclass: construct once, share freely across
threads. Validation happens at construction (hard invariants raise) or via
`validate_sample` (soft checks returned as a violation list).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TASK_TYPES = (
    "detail_description",
    "referring_qa",
    "complex_reasoning",
    "conversation_qa",
    "unknown",
)

SPEAKER_HUMAN = "human"
SPEAKER_ASSISTANT = "assistant"


class DataError(Exception):
    """A problem with input data (parse, range, join). CLI maps this to exit 1."""


@dataclass(frozen=True)
class SampleRecord:
    """One instruction-tuning example: an image reference plus conversation turns."""

    id: str
    image: str
    conversations: tuple[tuple[str, str], ...]  # (speaker, text) pairs
    task_type: str = "unknown"


def validate_sample(record: SampleRecord) -> list[str]:
    """Return all invariant violations for a SampleRecord (empty list = valid).

    Violations are data, not faults: this never raises and never mutates.
    """
    violations: list[str] = []
    if not record.id:
        violations.append("id empty")
    if not record.image:
        violations.append("image path empty")
    if not record.conversations:
        violations.append("conversations empty")
    else:
        for i, (speaker, _text) in enumerate(record.conversations):
            expected = SPEAKER_HUMAN if i % 2 == 0 else SPEAKER_ASSISTANT
            if speaker not in (SPEAKER_HUMAN, SPEAKER_ASSISTANT):
                violations.append(f"turn {i}: unknown speaker {speaker!r}")
            elif speaker != expected:
                if i == 0:
                    violations.append("first speaker must be human")
                else:
                    violations.append(f"turn {i}: speakers must alternate")
    if record.task_type not in TASK_TYPES:
        violations.append(f"unknown task_type {record.task_type!r}")
    return violations


@dataclass(frozen=True)
class ScoreRecord:
    """Per-sample dual quality attributes: image-text similarity and model loss.

    clip_score is the cosine of unit-normalized embeddings, so it lives in
    [-1, 1] regardless of which encoder checkpoint produced it. loss is the
    SUM of per-token negative log-likelihoods (nats) over the target tokens;
    token_length is kept alongside so a per-token mean can always be derived.
    """

    id: str
    clip_score: float
    loss: float
    token_length: int
    task_type: str = "unknown"

    def violations(self) -> list[str]:
        out: list[str] = []
        if not self.id:
            out.append("id empty")
        if not math.isfinite(self.clip_score):
            out.append("clip_score not finite")
        elif not -1.0 <= self.clip_score <= 1.0:
            out.append(f"clip_score {self.clip_score} outside [-1, 1]")
        if not math.isfinite(self.loss):
            out.append("loss not finite")
        elif self.loss < 0.0:
            out.append(f"loss {self.loss} negative")
        if self.token_length < 1:
            out.append(f"token_length {self.token_length} < 1")
        if self.task_type not in TASK_TYPES:
            out.append(f"unknown task_type {self.task_type!r}")
        return out


@dataclass(frozen=True)
class Bounds1D:
    """Closed interval [lower, upper]; upper may be +inf for one-sided bounds."""

    lower: float
    upper: float = math.inf

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} > upper {self.upper}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class Bounds2D:
    """A selection rectangle: bounds on the similarity and loss axes."""

    similarity: Bounds1D
    loss: Bounds1D


@dataclass(frozen=True)
class SubsetManifest:
    """Ordered, deduplicated list of selected sample ids with provenance.

    `params` records the thresholds / fractions / seed that produced the
    subset; `source_count` is the size N of the parent index. The id order is
    deterministic: descending selection rank, ties broken by ascending id.
    """

    ids: tuple[str, ...]
    strategy: str
    params: dict[str, str] = field(default_factory=dict)
    source_count: int = 0

    def __post_init__(self) -> None:
        if len(set(self.ids)) != len(self.ids):
            raise ValueError(f"manifest ({self.strategy}) contains duplicate ids")
        if len(self.ids) > self.source_count:
            raise ValueError(
                f"manifest ({self.strategy}) has {len(self.ids)} ids but "
                f"source_count is only {self.source_count}"
            )

    def __len__(self) -> int:
        return len(self.ids)
