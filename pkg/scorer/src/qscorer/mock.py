"""Deterministic mock scoring.

Scores derive from a keyed blake2b hash of (seed, sample id), so they are
reproducible across platforms and processes without touching any model.
The planted structure mirrors real corpora closely enough for downstream
tooling to be exercised end to end:

  * each task type occupies its own cluster in the quality plane,
  * loss grows with conversation length (longer answers accumulate more
    per-token penalties),
  * token_length is a 4-characters-per-token estimate of the text size.

Approximate normal deviates come from Irwin-Hall sums of hash-derived
uniforms; pure arithmetic, no libm transcendentals, hence bit-stable
everywhere.
"""

from __future__ import annotations

import hashlib
import math
from typing import Sequence

# (sim mean, sim std, loss base, loss std) per task type
_CLUSTERS = {
    "detail_description": (0.45, 0.12, 4.0, 0.9),
    "referring_qa": (0.15, 0.12, 1.6, 0.9),
    "complex_reasoning": (0.30, 0.20, 2.8, 1.5),
    "conversation_qa": (0.30, 0.12, 2.8, 0.9),
    "unknown": (0.30, 0.16, 2.8, 1.2),
}

_LOSS_PER_CHAR = 0.012  # couples loss to conversation size
_MIN_LOSS = 0.01


def _uniforms(seed: int, sample_id: str, n: int) -> list[float]:
    """n reproducible uniforms in [0, 1) keyed on (seed, sample_id)."""
    key = seed.to_bytes(8, "big", signed=True)
    out = []
    counter = 0
    while len(out) < n:
        h = hashlib.blake2b(
            f"{sample_id}\x00{counter}".encode(), key=key, digest_size=32
        ).digest()
        for i in range(0, 32, 8):
            out.append(int.from_bytes(h[i:i + 8], "big") / 2.0**64)
        counter += 1
    return out[:n]


def _normal(uniforms: Sequence[float]) -> float:
    """Irwin-Hall approximation: sum of 12 uniforms minus 6 is close to N(0,1)."""
    assert len(uniforms) == 12
    return sum(uniforms) - 6.0


def mock_score(
    sample_id: str,
    conversations: Sequence[tuple[str, str]],
    task_type: str,
    seed: int,
) -> tuple[float, float, int]:
    """Deterministic (clip_score, loss, token_length) for one sample."""
    ms, ss, base, sl = _CLUSTERS.get(task_type, _CLUSTERS["unknown"])
    us = _uniforms(seed, sample_id, 24)
    chars = sum(len(text) for _speaker, text in conversations)
    sim = ms + ss * _normal(us[:12])
    sim = min(1.0, max(-1.0, sim))
    loss = base + _LOSS_PER_CHAR * chars + sl * _normal(us[12:])
    loss = max(_MIN_LOSS, loss)
    token_length = max(1, math.ceil(chars / 4))
    return sim, loss, token_length
