"""qspace: two-dimensional quality-space curation for multimodal
instruction-tuning datasets.

Each sample is mapped to (clip score, model loss). Subsets are selected by
bounded bands on either axis or both, by top-fraction rank, or by a 3x3
region partition; multi-phase curriculum schedules advance both thresholds
linearly. See the README and demos/ for worked examples.
"""

from .core import (
    Bounds1D,
    Bounds2D,
    DataError,
    SampleRecord,
    ScoreRecord,
    SubsetManifest,
    validate_sample,
)
from .ingest import (
    QualityIndex,
    build_index,
    export_subset_dataset,
    load_dataset,
    load_scores,
    read_manifest,
    write_manifest,
)
from .selection import (
    RegionGrid,
    mix,
    partition_regions,
    quantile,
    sample_from,
    select_dil,
    select_diq,
    select_dis,
    select_top_fraction,
)
from .curriculum import (
    CurriculumPlan,
    PhaseSpec,
    emit_training_schedule,
    materialize,
    phase_region,
    plan_curriculum,
)
from .analysis import (
    AxisStats,
    Grid2D,
    axis_stats,
    correlation,
    density_grid,
    export_grid_csv,
    import_grid_csv,
    render_scatter,
    token_length_grid,
)

__version__ = "0.1.0"

__all__ = [
    "AxisStats",
    "Bounds1D",
    "Bounds2D",
    "CurriculumPlan",
    "DataError",
    "Grid2D",
    "PhaseSpec",
    "QualityIndex",
    "RegionGrid",
    "SampleRecord",
    "ScoreRecord",
    "SubsetManifest",
    "axis_stats",
    "build_index",
    "correlation",
    "density_grid",
    "emit_training_schedule",
    "export_grid_csv",
    "export_subset_dataset",
    "import_grid_csv",
    "load_dataset",
    "load_scores",
    "materialize",
    "mix",
    "partition_regions",
    "phase_region",
    "plan_curriculum",
    "quantile",
    "read_manifest",
    "render_scatter",
    "sample_from",
    "select_dil",
    "select_diq",
    "select_dis",
    "select_top_fraction",
    "token_length_grid",
    "validate_sample",
    "write_manifest",
]
