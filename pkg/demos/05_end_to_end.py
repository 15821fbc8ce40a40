"""End-to-end: mock-score a raw dataset file, then curate it through the
command-line pipeline.

The scorer and the curation toolkit only share file formats; this script
drives both exactly the way a shell user would.
"""

import json
from pathlib import Path

from qscorer import ScorerConfig, batch_score
from qspace.cli import main

out_dir = Path(__file__).parent / "out" / "pipeline"
out_dir.mkdir(parents=True, exist_ok=True)

# a small raw dataset in the public jsonl layout
tasks = ("detail_description", "referring_qa", "complex_reasoning",
         "conversation_qa")
dataset = out_dir / "dataset.jsonl"
with open(dataset, "w", encoding="utf-8") as fh:
    for i in range(2000):
        obj = {
            "id": f"img{i:05d}",
            "image": f"images/{i:05d}.jpg",
            "conversations": [
                {"from": "human", "value": f"Describe image {i}."},
                {"from": "gpt", "value": "word " * (10 + (i * 7) % 120)},
            ],
            "task_type": tasks[i % 4],
        }
        fh.write(json.dumps(obj, separators=(",", ":")) + "\n")

# 1. score it (mock mode: deterministic, no models needed)
scores = out_dir / "scores.jsonl"
summary = batch_score(dataset, scores, ScorerConfig(seed=5))
print(f"scored {summary.scored} samples")

# 2. pick the top 10% rectangle of the quality space
assert main(["select", "--scores", str(scores), "--strategy", "diq",
             "--fraction", "0.10", "--out", str(out_dir / "top.manifest")]) == 0

# 3. export the selected subset back into dataset form for training
assert main(["export", "--manifest", str(out_dir / "top.manifest"),
             "--dataset", str(dataset),
             "--out", str(out_dir / "subset.jsonl")]) == 0

n_subset = len((out_dir / "subset.jsonl").read_text().splitlines())
print(f"exported training subset of {n_subset} samples")

# 4. summary stats of the scored space
assert main(["analyze", "stats", "--scores", str(scores),
             "--out", str(out_dir / "stats.json")]) == 0
stats = json.loads((out_dir / "stats.json").read_text())
print(f"loss median: {stats['loss']['quantiles']['0.5']:.3f}")
