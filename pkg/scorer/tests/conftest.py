"""Shared helpers: synthetic dataset files in the public jsonl layout."""

from __future__ import annotations

import json
from pathlib import Path

TASKS = ("detail_description", "referring_qa", "complex_reasoning",
         "conversation_qa")


def dataset_obj(i: int, answer_chars: int | None = None) -> dict:
    task = TASKS[i % 4]
    # answer size varies with index so loss/length coupling is observable
    chars = answer_chars if answer_chars is not None else 20 + (i * 37) % 600
    return {
        "id": f"svit{i:07d}",
        "image": f"images/{i:07d}.jpg",
        "conversations": [
            {"from": "human", "value": f"Describe image {i}."},
            {"from": "gpt", "value": "x" * chars},
        ],
        "task_type": task,
    }


def write_dataset(path: Path, n: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n):
            fh.write(json.dumps(dataset_obj(i), separators=(",", ":")) + "\n")
