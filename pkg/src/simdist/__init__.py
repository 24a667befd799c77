"""Dataset similarity from image feature vectors.

Pipeline: read feature matrices (FVEC1/CSV), jointly center and project
both datasets to principal components, compute per-image and dataset
distances, then analyze: split statistics, threshold-swept F-scores,
smoothed curves, and seeded selection of adaptation candidates.
"""

from .analysis import (
    DistributionSummary,
    ScaledSeries,
    SplitPart,
    SplitReport,
    distribution_summary,
    min_max_scale,
    moving_average,
    select_for_adaptation,
    sort_by_distance,
    split_stats,
)
from .distance import (
    DistanceReport,
    DistanceTable,
    PcSweep,
    Ranking,
    build_table,
    dataset_distance,
    distance_report,
    extreme_images,
    image_distances,
    normalize_rows,
    pairwise,
    pc_sweep,
    rank_datasets,
)
from .embedding_io import FeatureMatrix, read_csv, read_fvec, write_csv, write_fvec
from .errors import SimdistError
from .performance import (
    Counts,
    OdsResult,
    PixelGrid,
    confusion_counts,
    default_thresholds,
    ods,
    per_image_fscores,
    read_pgm,
    write_pgm,
)
from .projection import (
    DEFAULT_COMPONENTS,
    ProjectionResult,
    center_concat,
    fit_pca,
    project_pair,
)
from .synth import SynthSpec, generate

__all__ = [
    "Counts",
    "DEFAULT_COMPONENTS",
    "DistanceReport",
    "DistanceTable",
    "DistributionSummary",
    "FeatureMatrix",
    "OdsResult",
    "PcSweep",
    "PixelGrid",
    "ProjectionResult",
    "Ranking",
    "ScaledSeries",
    "SimdistError",
    "SplitPart",
    "SplitReport",
    "SynthSpec",
    "build_table",
    "center_concat",
    "confusion_counts",
    "dataset_distance",
    "default_thresholds",
    "distance_report",
    "distribution_summary",
    "extreme_images",
    "fit_pca",
    "generate",
    "image_distances",
    "min_max_scale",
    "moving_average",
    "normalize_rows",
    "ods",
    "pairwise",
    "pc_sweep",
    "per_image_fscores",
    "project_pair",
    "rank_datasets",
    "read_csv",
    "read_fvec",
    "read_pgm",
    "select_for_adaptation",
    "sort_by_distance",
    "split_stats",
    "write_csv",
    "write_fvec",
    "write_pgm",
]

__version__ = "0.1.0"
