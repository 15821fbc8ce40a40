"""Multi-phase curriculum plans with linearly advancing quality thresholds.

Phase k keeps every record at or above both thresholds
    S(k) = S_base + k * delta_s,    L(k) = L_base + k * delta_l
(one-sided lower bounds only), so later phase regions nest inside earlier
ones. Materialized phases draw without cross-phase repetition: the totals in
a schedule count distinct examples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import DataError, SampleRecord, SubsetManifest
from .ingest import QualityIndex, atomic_write_text, sample_to_obj
from .selection import quantile

PHASE_LABELS = {0: "initialization", 1: "intermediate", 2: "advanced"}


def phase_label(k: int) -> str:
    return PHASE_LABELS.get(k, f"phase-{k}")


@dataclass(frozen=True)
class PhaseSpec:
    k: int
    s_threshold: float
    l_threshold: float
    draw_count: int
    label: str


@dataclass(frozen=True)
class CurriculumPlan:
    phases: tuple[PhaseSpec, ...]
    seed: int
    base: tuple[float, float]  # (S_base, L_base)
    deltas: tuple[float, float]  # (delta_s, delta_l), both >= 0

    def __post_init__(self) -> None:
        if not self.phases:
            raise ValueError("plan needs at least one phase")
        if self.deltas[0] < 0 or self.deltas[1] < 0:
            raise ValueError("deltas must be >= 0")
        for phase in self.phases:
            expect_s = self.base[0] + phase.k * self.deltas[0]
            expect_l = self.base[1] + phase.k * self.deltas[1]
            if phase.s_threshold != expect_s or phase.l_threshold != expect_l:
                raise ValueError(f"phase {phase.k} thresholds off the linear ramp")


def plan_curriculum(
    index: QualityIndex,
    num_phases: int,
    base_percentiles: tuple[float, float] = (0.0, 0.0),
    deltas: tuple[float, float] | None = None,
    per_phase: int = 0,
    seed: int = 0,
) -> CurriculumPlan:
    """Build a K-phase plan over an index.

    Base thresholds come from nearest-rank percentiles of each axis. With
    deltas=None (auto), each axis's [base, max] range is split into K equal
    blocks, so the last phase's region is the final block.
    """
    if num_phases < 1:
        raise ValueError(f"num_phases must be >= 1, got {num_phases}")
    q_s, q_l = base_percentiles
    s_base = quantile(index, "similarity", q_s)
    l_base = quantile(index, "loss", q_l)
    if deltas is None:
        s_max = float(index.clip_score.max())
        l_max = float(index.loss.max())
        deltas = ((s_max - s_base) / num_phases, (l_max - l_base) / num_phases)

    phases = tuple(
        PhaseSpec(
            k=k,
            s_threshold=s_base + k * deltas[0],
            l_threshold=l_base + k * deltas[1],
            draw_count=per_phase,
            label=phase_label(k),
        )
        for k in range(num_phases)
    )
    plan = CurriculumPlan(phases=phases, seed=seed, base=(s_base, l_base),
                          deltas=deltas)
    for phase in phases:
        if _region_mask(index, phase).sum() == 0:
            raise DataError(
                f"phase {phase.k} region is empty "
                f"(S >= {phase.s_threshold}, L >= {phase.l_threshold}); "
                "reduce the deltas or the phase count"
            )
    return plan


def _region_mask(index: QualityIndex, phase: PhaseSpec) -> np.ndarray:
    return (index.clip_score >= phase.s_threshold) & (index.loss >= phase.l_threshold)


def phase_region(index: QualityIndex, plan: CurriculumPlan, k: int) -> SubsetManifest:
    """All records meeting phase k's (one-sided) thresholds, ascending by id."""
    if not 0 <= k < len(plan.phases):
        raise ValueError(f"phase {k} out of range")
    phase = plan.phases[k]
    rows = np.flatnonzero(_region_mask(index, phase))
    return SubsetManifest(
        ids=tuple(index.ids[rows]),
        strategy=f"curriculum:phase{k}:region",
        params={
            "k": str(k),
            "s_p": repr(phase.s_threshold),
            "l_p": repr(phase.l_threshold),
        },
        source_count=index.n,
    )


def materialize(index: QualityIndex, plan: CurriculumPlan) -> list[SubsetManifest]:
    """Draw each phase's samples: uniform without replacement from the phase
    region minus everything drawn in earlier phases.

    Each phase uses a sub-seed derived from (plan.seed, k), so changing a
    later phase's draw count never perturbs earlier phases.
    """
    drawn: set[str] = set()
    manifests: list[SubsetManifest] = []
    for phase in plan.phases:
        region_ids = index.ids[np.flatnonzero(_region_mask(index, phase))]
        pool = [sid for sid in region_ids if sid not in drawn]  # id-ascending
        if len(pool) < phase.draw_count:
            raise DataError(
                f"phase {phase.k}: eligible pool has {len(pool)} records, "
                f"need {phase.draw_count}"
            )
        if phase.draw_count >= len(pool):
            chosen = pool
        else:
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=plan.seed, spawn_key=(phase.k,))
            )
            picks = rng.choice(len(pool), size=phase.draw_count, replace=False)
            chosen = sorted(pool[i] for i in picks)
        drawn.update(chosen)
        manifests.append(
            SubsetManifest(
                ids=tuple(chosen),
                strategy=f"curriculum:phase{phase.k}",
                params={
                    "k": str(phase.k),
                    "label": phase.label,
                    "s_p": repr(phase.s_threshold),
                    "l_p": repr(phase.l_threshold),
                    "m": str(phase.draw_count),
                    "seed": str(plan.seed),
                },
                source_count=index.n,
            )
        )
    return manifests


def emit_training_schedule(
    manifests: list[SubsetManifest],
    samples: Iterable[SampleRecord],
    out_dir: str | Path,
) -> None:
    """Write phase_<k>.jsonl files (dataset format) plus schedule.json.

    One file per phase: sequential fine-tuning runs consume phases
    independently. Byte-identical on re-run with identical inputs.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    wanted: set[str] = set()
    for manifest in manifests:
        wanted.update(manifest.ids)
    found: dict[str, SampleRecord] = {}
    for record in samples:
        if record.id in wanted:
            found[record.id] = record
    missing = sorted(wanted - set(found))
    if missing:
        raise DataError(f"schedule: sample ids missing: {missing[:10]}")

    schedule = {"version": 1, "seed": None, "phases": []}
    for manifest in manifests:
        k = int(manifest.params["k"])
        filename = f"phase_{k}.jsonl"
        lines = [
            json.dumps(sample_to_obj(found[sid]), sort_keys=True,
                       separators=(",", ":"))
            for sid in manifest.ids
        ]
        atomic_write_text(out_dir / filename, "".join(line + "\n" for line in lines))
        schedule["seed"] = int(manifest.params["seed"])
        schedule["phases"].append(
            {
                "k": k,
                "label": manifest.params["label"],
                "S_p": float(manifest.params["s_p"]),
                "L_p": float(manifest.params["l_p"]),
                "m": len(manifest.ids),
                "file": filename,
            }
        )
    atomic_write_text(
        out_dir / "schedule.json",
        json.dumps(schedule, sort_keys=True, indent=2) + "\n",
    )
