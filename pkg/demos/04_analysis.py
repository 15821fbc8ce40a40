"""Describing a scored corpus: axis stats, density grids, correlations and
a vector scatter plot.
"""

from pathlib import Path

from qspace.analysis import (
    axis_stats,
    correlation,
    density_grid,
    export_grid_csv,
    render_scatter,
    token_length_grid,
)

from demo_corpus import demo_index

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

index = demo_index()

for axis, stats in axis_stats(index).items():
    print(f"{axis:11s} median {stats.quantiles[0.50]:8.3f}  "
          f"p95 {stats.quantiles[0.95]:8.3f}")

# longer answers accumulate more per-token loss
corr = correlation(index, "token_length", "loss")
print(f"\ncorr(token_length, loss) = {corr:.3f}")

# density of one task type; the detail_description cluster sits upper-right
grid = density_grid(index, task_type="detail_description", bins=(20, 20))
export_grid_csv(grid, out_dir / "detail_density.csv")
print(f"detail_description occupies {int((grid.values > 0).sum())} "
      f"of {grid.values.size} cells")

# mean answer length per cell of the full space
tl = token_length_grid(index, bins=(10, 10))
export_grid_csv(tl, out_dir / "token_length.csv")

# deterministic SVG scatter, colored by task type
render_scatter(index, out_dir / "scatter.svg", color_by="task_type")
print(f"wrote {sorted(p.name for p in out_dir.iterdir())}")
