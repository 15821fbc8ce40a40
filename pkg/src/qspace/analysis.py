"""Distribution analysis over the quality space: axis summaries, 2D grids,
correlations, and deterministic SVG scatter export.

Grids always use bin edges spanning the FULL index, even when filtered by
task type, so grids for different task types share a common frame and are
directly comparable cell-by-cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bounds2D, TASK_TYPES, DataError
from .curriculum import CurriculumPlan
from .ingest import QualityIndex, atomic_write_text
from .selection import RegionGrid, quantile

STAT_QUANTILES = (0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99)
DEFAULT_BINS = (50, 50)

GRID_METRICS = ("count", "density", "mean_token_length")


@dataclass(frozen=True)
class Grid2D:
    """A binned view of the quality space.

    values has shape (len(y_edges)-1, len(x_edges)-1); row i covers the loss
    band [y_edges[i], y_edges[i+1]). Empty cells of a mean_token_length grid
    are NaN, never zero.
    """

    x_edges: np.ndarray  # similarity axis
    y_edges: np.ndarray  # loss axis
    values: np.ndarray
    metric: str

    def __post_init__(self) -> None:
        if np.any(np.diff(self.x_edges) <= 0) or np.any(np.diff(self.y_edges) <= 0):
            raise ValueError("grid edges must be strictly ascending")
        if self.values.shape != (len(self.y_edges) - 1, len(self.x_edges) - 1):
            raise ValueError("values shape does not match edges")
        if self.metric not in GRID_METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")

    @property
    def x_centers(self) -> np.ndarray:
        return (self.x_edges[:-1] + self.x_edges[1:]) / 2.0

    @property
    def y_centers(self) -> np.ndarray:
        return (self.y_edges[:-1] + self.y_edges[1:]) / 2.0


@dataclass(frozen=True)
class AxisStats:
    min: float
    max: float
    mean: float
    std: float
    quantiles: dict[float, float]


def axis_stats(index: QualityIndex) -> dict[str, AxisStats]:
    """Summary statistics per axis, with nearest-rank quantiles consistent
    with selection.quantile."""
    out: dict[str, AxisStats] = {}
    for axis in ("similarity", "loss"):
        values = index.axis_values(axis)
        out[axis] = AxisStats(
            min=float(values.min()),
            max=float(values.max()),
            mean=float(values.mean()),
            std=float(values.std()),
            quantiles={q: quantile(index, axis, q) for q in STAT_QUANTILES},
        )
    return out


def _full_index_edges(
    index: QualityIndex, bins: tuple[int, int]
) -> tuple[np.ndarray, np.ndarray]:
    bx, by = bins
    if bx < 1 or by < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")

    def span(values: np.ndarray, nbins: int) -> np.ndarray:
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:  # widen a degenerate axis so edges stay strictly ascending
            lo, hi = lo - 0.5, hi + 0.5
        return np.linspace(lo, hi, nbins + 1)

    return span(index.clip_score, bx), span(index.loss, by)


def _cell_indices(
    values: np.ndarray, edges: np.ndarray
) -> np.ndarray:
    # half-open bins with the top edge inclusive (histogram convention)
    return np.clip(np.searchsorted(edges, values, side="right") - 1, 0,
                   len(edges) - 2)


def density_grid(
    index: QualityIndex,
    task_type: str | None = None,
    bins: tuple[int, int] = DEFAULT_BINS,
) -> Grid2D:
    """Count grid over (similarity, loss), optionally filtered by task type.

    Edges always span the full index so per-task grids are additive: summing
    the grids of all task types reproduces the unfiltered grid cell-wise.
    """
    if task_type is not None and task_type not in TASK_TYPES:
        raise DataError(f"unknown task_type {task_type!r}")
    x_edges, y_edges = _full_index_edges(index, bins)
    if task_type is None:
        mask = np.ones(index.n, dtype=bool)
    else:
        mask = index.task_type == task_type
    counts, _, _ = np.histogram2d(
        index.loss[mask], index.clip_score[mask], bins=(y_edges, x_edges)
    )
    return Grid2D(x_edges=x_edges, y_edges=y_edges, values=counts, metric="count")


def token_length_grid(
    index: QualityIndex, bins: tuple[int, int] = DEFAULT_BINS
) -> Grid2D:
    """Mean token length per cell; empty cells are NaN."""
    x_edges, y_edges = _full_index_edges(index, bins)
    xi = _cell_indices(index.clip_score, x_edges)
    yi = _cell_indices(index.loss, y_edges)
    shape = (len(y_edges) - 1, len(x_edges) - 1)
    sums = np.zeros(shape)
    counts = np.zeros(shape)
    np.add.at(sums, (yi, xi), index.token_length.astype(np.float64))
    np.add.at(counts, (yi, xi), 1.0)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return Grid2D(x_edges=x_edges, y_edges=y_edges, values=means,
                  metric="mean_token_length")


def correlation(index: QualityIndex, a: str, b: str) -> float:
    """Pearson correlation between two per-sample attributes."""
    va = index.axis_values(_canon_attr(a)).astype(np.float64)
    vb = index.axis_values(_canon_attr(b)).astype(np.float64)
    if index.n < 2:
        raise DataError("correlation needs at least 2 records")
    if va.std() == 0 or vb.std() == 0:
        raise DataError("correlation undefined on a zero-variance axis")
    return float(np.corrcoef(va, vb)[0, 1])


def _canon_attr(name: str) -> str:
    if name in ("clip_score", "similarity"):
        return "similarity"
    if name == "loss":
        return "loss"
    if name == "token_length":
        return "token_length"
    raise ValueError(f"unknown attribute {name!r}")


# --- deterministic SVG scatter -------------------------------------------

_SVG_W, _SVG_H = 720, 540
_MARGIN = 60
_TASK_COLORS = {
    "detail_description": "#d62728",
    "referring_qa": "#1f77b4",
    "complex_reasoning": "#2ca02c",
    "conversation_qa": "#9467bd",
    "unknown": "#7f7f7f",
}


def _f(v: float) -> str:
    return f"{v:.3f}"


def render_scatter(
    index: QualityIndex,
    out_path: str,
    color_by: str = "none",
    overlay_bounds: Bounds2D | None = None,
    overlay_regions: RegionGrid | None = None,
    overlay_plan: CurriculumPlan | None = None,
) -> None:
    """Write a deterministic SVG scatter of the quality space.

    Same index and overlays always produce byte-identical output: fixed
    element order (points in id order), fixed float formatting, no
    timestamps or generated ids.
    """
    if color_by not in ("task_type", "token_length", "none"):
        raise ValueError(f"unknown color_by {color_by!r}")
    x_lo, x_hi = float(index.clip_score.min()), float(index.clip_score.max())
    y_lo, y_hi = float(index.loss.min()), float(index.loss.max())
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def sx(v: float) -> float:
        return _MARGIN + (v - x_lo) / (x_hi - x_lo) * (_SVG_W - 2 * _MARGIN)

    def sy(v: float) -> float:
        # larger loss plots higher on the page
        return _SVG_H - _MARGIN - (v - y_lo) / (y_hi - y_lo) * (_SVG_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
        f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_SVG_H - _MARGIN}" x2="{_SVG_W - _MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_SVG_H - _MARGIN}" stroke="black"/>',
        f'<text x="{_SVG_W // 2}" y="{_SVG_H - 15}" text-anchor="middle" '
        f'font-size="14">clip score</text>',
        f'<text x="18" y="{_SVG_H // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {_SVG_H // 2})">loss</text>',
    ]

    if color_by == "token_length":
        t_lo = float(index.token_length.min())
        t_hi = float(index.token_length.max())
        t_span = (t_hi - t_lo) or 1.0

    for row in range(index.n):  # rows are id-ascending: stable element order
        if color_by == "task_type":
            color = _TASK_COLORS[str(index.task_type[row])]
        elif color_by == "token_length":
            frac = (float(index.token_length[row]) - t_lo) / t_span
            shade = int(round(220 * (1.0 - frac)))
            color = f"rgb({shade},{shade},255)"
        else:
            color = "#1f77b4"
        parts.append(
            f'<circle cx="{_f(sx(index.clip_score[row]))}" '
            f'cy="{_f(sy(index.loss[row]))}" r="2" fill="{color}" '
            f'fill-opacity="0.6"/>'
        )

    def vline(v: float, color: str) -> None:
        if math.isfinite(v) and x_lo <= v <= x_hi:
            parts.append(
                f'<line x1="{_f(sx(v))}" y1="{_MARGIN}" x2="{_f(sx(v))}" '
                f'y2="{_SVG_H - _MARGIN}" stroke="{color}" stroke-width="1.5" '
                f'stroke-dasharray="5,3"/>'
            )

    def hline(v: float, color: str) -> None:
        if math.isfinite(v) and y_lo <= v <= y_hi:
            parts.append(
                f'<line x1="{_MARGIN}" y1="{_f(sy(v))}" x2="{_SVG_W - _MARGIN}" '
                f'y2="{_f(sy(v))}" stroke="{color}" stroke-width="1.5" '
                f'stroke-dasharray="5,3"/>'
            )

    if overlay_bounds is not None:
        vline(overlay_bounds.similarity.lower, "black")
        vline(overlay_bounds.similarity.upper, "black")
        hline(overlay_bounds.loss.lower, "black")
        hline(overlay_bounds.loss.upper, "black")
    if overlay_regions is not None:
        for v in overlay_regions.col_edges[1:3]:
            vline(v, "#555555")
        for v in overlay_regions.row_edges[1:3]:
            hline(v, "#555555")
    if overlay_plan is not None:
        for phase in overlay_plan.phases:
            vline(phase.s_threshold, "#cc6600")
            hline(phase.l_threshold, "#cc6600")

    if color_by == "task_type":
        present = sorted(set(str(t) for t in index.task_type))
        for i, task in enumerate(present):
            y = _MARGIN + 18 * i
            parts.append(
                f'<rect x="{_SVG_W - _MARGIN + 6}" y="{y - 9}" width="10" '
                f'height="10" fill="{_TASK_COLORS[task]}"/>'
            )
            parts.append(
                f'<text x="{_SVG_W - _MARGIN + 20}" y="{y}" '
                f'font-size="10">{task}</text>'
            )

    parts.append("</svg>")
    atomic_write_text(out_path, "\n".join(parts) + "\n")


# --- CSV export -----------------------------------------------------------


def export_grid_csv(grid: Grid2D, path: str) -> None:
    """CSV layout: header row of x bin centers (first field blank); one row
    per y bin, its center first. NaN cells become empty fields."""
    lines = ["," + ",".join(repr(float(c)) for c in grid.x_centers)]
    for i, yc in enumerate(grid.y_centers):
        fields = [repr(float(yc))]
        for v in grid.values[i]:
            fields.append("" if np.isnan(v) else repr(float(v)))
        lines.append(",".join(fields))
    atomic_write_text(path, "\n".join(lines) + "\n")


def import_grid_csv(path: str, metric: str = "count") -> Grid2D:
    """Parse a CSV written by export_grid_csv.

    Edges are reconstructed from the (uniform) bin centers, so they match the
    original up to floating-point rounding.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = lines[0].split(",")
    x_centers = np.array([float(v) for v in header[1:]])
    y_centers = []
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        y_centers.append(float(fields[0]))
        rows.append([float(v) if v else np.nan for v in fields[1:]])
    y_centers = np.array(y_centers)

    def edges_from_centers(centers: np.ndarray) -> np.ndarray:
        if len(centers) == 1:
            return np.array([centers[0] - 0.5, centers[0] + 0.5])
        step = centers[1] - centers[0]
        return np.concatenate([centers - step / 2, [centers[-1] + step / 2]])

    return Grid2D(
        x_edges=edges_from_centers(x_centers),
        y_edges=edges_from_centers(y_centers),
        values=np.array(rows),
        metric=metric,
    )
