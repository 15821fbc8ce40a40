"""Subset selection over the quality space.

All selectors are pure functions of an immutable QualityIndex and return
SubsetManifests with deterministic ordering: descending selection rank, ties
broken by ascending id. Random sampling is pinned to numpy's PCG64 generator
so manifests reproduce bit-for-bit across platforms.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import Bounds1D, Bounds2D, DataError, SubsetManifest
from .ingest import QualityIndex

log = logging.getLogger(__name__)

STRATEGIES = ("dis", "dil", "diq")


def quantile(index: QualityIndex, axis: str, q: float) -> float:
    """Nearest-rank quantile of one axis: the value at sorted position
    ceil(q*n), position 1 for q=0."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    values = index.axis_values(axis)
    order = index.sim_order if axis == "similarity" else index.loss_order
    pos = max(1, math.ceil(q * index.n))
    return float(values[order[pos - 1]])


def _fmt(value: float) -> str:
    return repr(float(value))


def _manifest_desc_value(
    index: QualityIndex, rows: np.ndarray, keys: np.ndarray, strategy: str,
    params: dict[str, str],
) -> SubsetManifest:
    # descending key, ties ascending id (rows are id-ascending already)
    order = np.lexsort((index.ids[rows], -keys))
    ids = tuple(index.ids[rows[order]])
    return SubsetManifest(ids=ids, strategy=strategy, params=params,
                          source_count=index.n)


def select_dis(index: QualityIndex, bounds: Bounds1D) -> SubsetManifest:
    """Records with clip_score in [lower, upper], descending clip_score."""
    mask = (index.clip_score >= bounds.lower) & (index.clip_score <= bounds.upper)
    rows = np.flatnonzero(mask)
    params = {"s_min": _fmt(bounds.lower), "s_max": _fmt(bounds.upper)}
    return _manifest_desc_value(index, rows, index.clip_score[rows], "dis", params)


def select_dil(index: QualityIndex, bounds: Bounds1D) -> SubsetManifest:
    """Records with loss in [lower, upper], descending loss."""
    mask = (index.loss >= bounds.lower) & (index.loss <= bounds.upper)
    rows = np.flatnonzero(mask)
    params = {"l_min": _fmt(bounds.lower), "l_max": _fmt(bounds.upper)}
    return _manifest_desc_value(index, rows, index.loss[rows], "dil", params)


def select_diq(index: QualityIndex, bounds: Bounds2D) -> SubsetManifest:
    """Records inside the rectangle: the set intersection of the matching
    DIS and DIL selections, ordered by descending rank-sum."""
    s, l = bounds.similarity, bounds.loss
    mask = (
        (index.clip_score >= s.lower) & (index.clip_score <= s.upper)
        & (index.loss >= l.lower) & (index.loss <= l.upper)
    )
    rows = np.flatnonzero(mask)
    ranksum = (index.sim_rank[rows] + index.loss_rank[rows]).astype(np.float64)
    params = {
        "s_min": _fmt(s.lower), "s_max": _fmt(s.upper),
        "l_min": _fmt(l.lower), "l_max": _fmt(l.upper),
    }
    return _manifest_desc_value(index, rows, ranksum, "diq", params)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def select_top_fraction(
    index: QualityIndex, strategy: str, fraction: float
) -> SubsetManifest:
    """The top-f subset: m = round(f*n) records.

    dis/dil: top m by the axis value. diq: binary-search a single joint
    quantile position so the pair of thresholds admits >= m records with
    s >= S_p and l >= L_p, then trim to exactly m by descending rank-sum.
    One shared quantile is the least-arbitrary corner rectangle.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = index.n
    m = min(n, _round_half_up(fraction * n))
    params = {"fraction": _fmt(fraction), "m": str(m)}

    if strategy in ("dis", "dil"):
        values = index.clip_score if strategy == "dis" else index.loss
        # canonical descending order: highest value first, ties ascending id
        order = np.lexsort((index.ids, -values))
        ids = tuple(index.ids[order[:m]])
        return SubsetManifest(ids=ids, strategy=strategy, params=params,
                              source_count=index.n)

    # diq: largest sorted position p (1-based) whose thresholds still admit m
    sim_sorted = index.clip_score[index.sim_order]
    loss_sorted = index.loss[index.loss_order]

    def admitted(p: int) -> np.ndarray:
        s_thr = sim_sorted[p - 1]
        l_thr = loss_sorted[p - 1]
        return (index.clip_score >= s_thr) & (index.loss >= l_thr)

    lo, hi = 1, n  # admitted(1) is everything; find max p with count >= m
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if int(admitted(mid).sum()) >= m:
            lo = mid
        else:
            hi = mid - 1
    rows = np.flatnonzero(admitted(lo))
    params["s_p"] = _fmt(sim_sorted[lo - 1])
    params["l_p"] = _fmt(loss_sorted[lo - 1])
    ranksum = (index.sim_rank[rows] + index.loss_rank[rows]).astype(np.float64)
    order = np.lexsort((index.ids[rows], -ranksum))[:m]
    ids = tuple(index.ids[rows[order]])
    return SubsetManifest(ids=ids, strategy="diq", params=params,
                          source_count=index.n)


@dataclass(frozen=True)
class RegionGrid:
    """3x3 partition of the quality space.

    Row r indexes the loss band (low -> high), column c the similarity band.
    Cells are half-open [edge, next_edge) with the top edge inclusive, so the
    partition law is exact even with boundary values.
    """

    row_edges: tuple[float, float, float, float]  # loss axis
    col_edges: tuple[float, float, float, float]  # similarity axis
    cells: dict[tuple[int, int], SubsetManifest]


def partition_regions(index: QualityIndex, binning: str = "quantile") -> RegionGrid:
    """Split the space into 9 regions, 3 bands per axis.

    quantile binning places interior edges at the 1/3 and 2/3 nearest-rank
    quantiles (balanced bands); equal_width splits [min, max] into three
    equal intervals per axis.
    """
    if index.n < 9:
        raise DataError(f"partition_regions needs >= 9 records, got {index.n}")
    if binning not in ("quantile", "equal_width"):
        raise ValueError(f"unknown binning {binning!r}")

    def axis_edges(axis: str) -> tuple[float, float, float, float]:
        values = index.axis_values(axis)
        vmin, vmax = float(values.min()), float(values.max())
        if binning == "quantile":
            if vmin == vmax:
                raise DataError(
                    f"{axis} axis is constant; quantile binning is degenerate, "
                    "use equal_width"
                )
            return (vmin, quantile(index, axis, 1 / 3),
                    quantile(index, axis, 2 / 3), vmax)
        step = (vmax - vmin) / 3.0
        return (vmin, vmin + step, vmin + 2 * step, vmax)

    col_edges = axis_edges("similarity")
    row_edges = axis_edges("loss")

    # half-open bands, top edge inclusive
    col_idx = np.clip(
        np.searchsorted(np.asarray(col_edges[1:3]), index.clip_score, side="right"),
        0, 2,
    )
    row_idx = np.clip(
        np.searchsorted(np.asarray(row_edges[1:3]), index.loss, side="right"),
        0, 2,
    )

    cells: dict[tuple[int, int], SubsetManifest] = {}
    for r in range(3):
        for c in range(3):
            rows = np.flatnonzero((row_idx == r) & (col_idx == c))
            cells[(r, c)] = SubsetManifest(
                ids=tuple(index.ids[rows]),  # rows are already id-ascending
                strategy=f"region:r{r}c{c}",
                params={
                    "binning": binning,
                    "l_lo": _fmt(row_edges[r]), "l_hi": _fmt(row_edges[r + 1]),
                    "s_lo": _fmt(col_edges[c]), "s_hi": _fmt(col_edges[c + 1]),
                },
                source_count=index.n,
            )
    return RegionGrid(row_edges=row_edges, col_edges=col_edges, cells=cells)


def sample_from(manifest: SubsetManifest, m: int, seed: int) -> SubsetManifest:
    """Uniform sample without replacement of size min(m, |manifest|).

    Pinned generator: numpy PCG64 seeded with `seed`, drawing indices over
    the id-ascending pool. Output ordered ascending by id.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    pool = sorted(manifest.ids)
    params = dict(manifest.params)
    params.update({"sample_m": str(m), "seed": str(seed)})
    if m >= len(pool):
        if m > len(pool):
            log.warning(
                "sample_from: requested %d from %d available; returning all",
                m, len(pool),
            )
        chosen = pool
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        picks = rng.choice(len(pool), size=m, replace=False)
        chosen = sorted(pool[i] for i in picks)
    return SubsetManifest(
        ids=tuple(chosen),
        strategy=manifest.strategy,
        params=params,
        source_count=manifest.source_count,
    )


def mix(subsets: list[SubsetManifest]) -> SubsetManifest:
    """Deduplicated union of subsets sharing one parent index, ascending id."""
    if not subsets:
        raise ValueError("mix needs at least one subset")
    source = subsets[0].source_count
    for sub in subsets[1:]:
        if sub.source_count != source:
            raise DataError(
                f"mix: mismatched source_count {sub.source_count} != {source}"
            )
    union: set[str] = set()
    total = 0
    params: dict[str, str] = {}
    for i, sub in enumerate(subsets):
        union.update(sub.ids)
        total += len(sub.ids)
        params[f"part{i}"] = f"{sub.strategy}:{len(sub.ids)}"
    params["overlap"] = str(total - len(union))
    return SubsetManifest(
        ids=tuple(sorted(union)),
        strategy="mix(" + "+".join(sub.strategy for sub in subsets) + ")",
        params=params,
        source_count=source,
    )
