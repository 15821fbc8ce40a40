"""Shared helper for the demo scripts: a small synthetic score corpus.

Four task-type clusters sit at different spots in the quality plane, the
same shape a real visual-instruction corpus shows once scored.
"""

import numpy as np

from qspace.core import ScoreRecord
from qspace.ingest import build_index

CLUSTERS = {
    "detail_description": (0.45, 0.12, 6.5, 1.6),
    "referring_qa": (0.15, 0.12, 3.5, 1.6),
    "complex_reasoning": (0.30, 0.20, 5.0, 2.8),
    "conversation_qa": (0.30, 0.12, 5.0, 1.6),
}


def demo_index(n=4000, seed=42):
    rng = np.random.default_rng(seed)
    names = list(CLUSTERS)
    records = []
    for i in range(n):
        task = names[i % 4]
        ms, ss, ml, sl = CLUSTERS[task]
        loss = max(0.01, rng.normal(ml, sl))
        records.append(ScoreRecord(
            id=f"demo{i:05d}",
            clip_score=float(np.clip(rng.normal(ms, ss), -1, 1)),
            loss=float(loss),
            token_length=max(1, int(round(18 * loss + rng.normal(0, 25)))),
            task_type=task,
        ))
    return build_index(records)
