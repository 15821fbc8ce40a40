"""Shared fixtures: small synthetic indexes plus the full-size mock corpus.

The mock corpus mirrors the shape of a 157,712-sample visual-instruction
dataset: four task-type clusters with distinct positions in the quality
space, a planted token-length/loss correlation, and enough mass in every
region cell for per-region sampling.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from qspace.core import ScoreRecord
from qspace.ingest import build_index

CORPUS_N = 157_712
CORPUS_SEED = 20240824

# (sim mean, sim std, loss mean, loss std) per task type; detail_description
# sits upper-right, referring_qa lower-left, complex_reasoning spreads wide
CLUSTERS = {
    "detail_description": (0.45, 0.12, 6.5, 1.6),
    "referring_qa": (0.15, 0.12, 3.5, 1.6),
    "complex_reasoning": (0.30, 0.20, 5.0, 2.8),
    "conversation_qa": (0.30, 0.12, 5.0, 1.6),
}


def make_index(rows, samples=None):
    """Build a QualityIndex from (id, clip_score, loss[, token_length[, task]])."""
    scores = []
    for row in rows:
        sid, s, l = row[0], row[1], row[2]
        tok = row[3] if len(row) > 3 else 10
        task = row[4] if len(row) > 4 else "unknown"
        scores.append(ScoreRecord(id=sid, clip_score=s, loss=l,
                                  token_length=tok, task_type=task))
    return build_index(scores, samples)


def random_scores(rng: np.random.Generator, n: int) -> list[ScoreRecord]:
    types = list(CLUSTERS) + ["unknown"]
    return [
        ScoreRecord(
            id=f"r{i:04d}",
            clip_score=float(rng.uniform(-1, 1)),
            loss=float(rng.uniform(0, 10)),
            token_length=int(rng.integers(1, 200)),
            task_type=types[int(rng.integers(0, len(types)))],
        )
        for i in range(n)
    ]


def random_index(rng: np.random.Generator, n: int):
    return build_index(random_scores(rng, n))


def generate_corpus_arrays(n: int = CORPUS_N, seed: int = CORPUS_SEED):
    rng = np.random.default_rng(seed)
    type_names = np.array(list(CLUSTERS))
    task = type_names[np.arange(n) % 4]
    sim = np.empty(n)
    loss = np.empty(n)
    for name, (ms, ss, ml, sl) in CLUSTERS.items():
        mask = task == name
        sim[mask] = rng.normal(ms, ss, mask.sum())
        loss[mask] = rng.normal(ml, sl, mask.sum())
    sim = np.clip(sim, -1.0, 1.0)
    loss = np.clip(loss, 0.01, None)
    token = np.maximum(1, np.round(18 * loss + rng.normal(0, 25, n))).astype(int)
    ids = np.array([f"svit{i:07d}" for i in range(n)])
    return ids, sim, loss, token, task


def write_score_file(path: Path, ids, sim, loss, token, task) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(ids)):
            fh.write(
                '{"id":"%s","clip_score":%r,"loss":%r,"token_length":%d,'
                '"task_type":"%s"}\n'
                % (ids[i], float(sim[i]), float(loss[i]), int(token[i]), task[i])
            )


def write_dataset_file(path: Path, ids, token, task) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(ids)):
            answer = "x" * max(4, 4 * int(token[i]) % 400)
            obj = {
                "id": str(ids[i]),
                "image": f"images/{ids[i]}.jpg",
                "conversations": [
                    {"from": "human", "value": f"Describe image {i}."},
                    {"from": "gpt", "value": answer},
                ],
                "task_type": str(task[i]),
            }
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Directory holding the 157,712-record mock score and dataset files."""
    root = tmp_path_factory.mktemp("corpus")
    arrays = generate_corpus_arrays()
    write_score_file(root / "scores.jsonl", *arrays)
    write_dataset_file(root / "dataset.jsonl", arrays[0], arrays[3], arrays[4])
    np.savez(root / "arrays.npz", ids=arrays[0], sim=arrays[1], loss=arrays[2],
             token=arrays[3], task=arrays[4])
    return root


@pytest.fixture(scope="session")
def corpus_scores(corpus_dir: Path) -> Path:
    return corpus_dir / "scores.jsonl"


@pytest.fixture(scope="session")
def corpus_dataset(corpus_dir: Path) -> Path:
    return corpus_dir / "dataset.jsonl"


@pytest.fixture(scope="session")
def corpus_index(corpus_scores: Path):
    from qspace.ingest import load_scores

    return build_index(load_scores(corpus_scores))
