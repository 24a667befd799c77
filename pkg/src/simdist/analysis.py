"""Distance-sorted statistics: splits, scaling, smoothing, and selection.

Images are sorted by their distance from the primary dataset, cut into k
contiguous parts, and summarized per part. Distances are min-max scaled
to [0, 1] before statistics by default. A seeded deterministic sampler
picks adaptation candidates from the far end of the scaled range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distance import DistanceReport
from .errors import (
    BadK,
    DegenerateScale,
    EmptyInput,
    InsufficientCandidates,
    LengthMismatch,
    SimdistError,
    ZeroWindow,
)
from .rng import SplitMix64

SELECTION_LOW = 0.6
SELECTION_HIGH = 1.0


@dataclass(frozen=True)
class ScaledSeries:
    """A series mapped to [0, 1], remembering the original extremes."""

    values: np.ndarray = field(repr=False)
    degenerate: bool
    source_min: float
    source_max: float

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SplitPart:
    """One contiguous slice [start, stop) of the distance-sorted order."""

    start: int
    stop: int
    mean: float
    std: float
    f_score: float | None = None


@dataclass(frozen=True)
class SplitReport:
    parts: tuple[SplitPart, ...]
    k: int
    scaled: bool


def sort_by_distance(report: DistanceReport) -> np.ndarray:
    """Permutation putting per-image distances in ascending order, stable."""
    return np.argsort(report.image_distances, kind="stable")


def min_max_scale(values) -> ScaledSeries:
    """Map values affinely onto [0, 1]; an all-equal series maps to zeros."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("nothing to scale")
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return ScaledSeries(
            values=np.zeros_like(values), degenerate=True,
            source_min=lo, source_max=hi,
        )
    return ScaledSeries(
        values=(values - lo) / (hi - lo), degenerate=False,
        source_min=lo, source_max=hi,
    )


def split_stats(
    sorted_distances,
    per_image_scores=None,
    k: int = 2,
    scale: bool = True,
    allow_any_k: bool = False,
    part_scores=None,
) -> SplitReport:
    """Cut the sorted distances into k parts and summarize each.

    Boundaries fall at floor(i*m/k). Per-part sigma is the population
    standard deviation. With `scale`, distances are min-max scaled over
    the whole series first, so means land in [0, 1]. A part's f_score
    comes from `part_scores` (one value per part) when given, else from
    the mean of `per_image_scores` over the part, else stays None.
    """
    distances = np.asarray(sorted_distances, dtype=np.float64)
    m = distances.size
    if m == 0:
        raise EmptyInput("no distances to split")
    if k not in (2, 3) and not allow_any_k:
        raise BadK(f"k={k}; pass allow_any_k for values outside {{2, 3}}")
    if not 1 <= k <= m:
        raise BadK(f"k={k} outside [1, {m}]")
    if np.any(np.diff(distances) < 0):
        raise SimdistError("distances must be sorted ascending")
    if per_image_scores is not None:
        per_image_scores = np.asarray(per_image_scores, dtype=np.float64)
        if per_image_scores.size != m:
            raise LengthMismatch(
                f"{per_image_scores.size} scores for {m} distances"
            )
    if part_scores is not None:
        part_scores = [float(s) for s in part_scores]
        if len(part_scores) != k:
            raise LengthMismatch(f"{len(part_scores)} part scores for k={k}")
    stats_source = min_max_scale(distances).values if scale else distances
    bounds = [i * m // k for i in range(k + 1)]
    parts = []
    for index, (start, stop) in enumerate(zip(bounds, bounds[1:])):
        chunk = stats_source[start:stop]
        if part_scores is not None:
            f_score = part_scores[index]
        elif per_image_scores is not None:
            f_score = float(np.mean(per_image_scores[start:stop]))
        else:
            f_score = None
        parts.append(SplitPart(
            start=start,
            stop=stop,
            mean=float(np.mean(chunk)),
            std=float(np.std(chunk)),
            f_score=f_score,
        ))
    return SplitReport(parts=tuple(parts), k=k, scaled=scale)


def moving_average(values, window: int | None = None) -> np.ndarray:
    """Centered moving average, truncated at the edges, output length m.

    Default window is max(1, m // 10). For window w the slice at i spans
    [i - (w-1)//2, i + w//2], clipped to the series.
    """
    values = np.asarray(values, dtype=np.float64)
    m = values.size
    if m == 0:
        raise EmptyInput("nothing to smooth")
    if window is None:
        window = max(1, m // 10)
    if window < 1:
        raise ZeroWindow(f"window must be >= 1, got {window}")
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        return values.copy()
    left = (window - 1) // 2
    right = window // 2
    out = np.empty(m)
    for i in range(m):
        out[i] = np.mean(values[max(0, i - left):min(m, i + right + 1)])
    # rounding can nudge a window mean past the series extremes by 1 ulp
    return np.clip(out, lo, hi)


def select_for_adaptation(
    scaled: ScaledSeries,
    q: int,
    low: float = SELECTION_LOW,
    high: float = SELECTION_HIGH,
    seed: int = 0,
) -> list[int]:
    """Draw q candidate indices with scaled distance in [low, high].

    Sampling is uniform without replacement from the deterministic seeded
    generator, so identical inputs and seed give identical picks.
    """
    if not 0.0 <= low < high <= 1.0:
        raise SimdistError(f"band [{low}, {high}] must satisfy 0 <= low < high <= 1")
    if q < 0:
        raise SimdistError(f"selection count must be >= 0, got {q}")
    if scaled.degenerate:
        raise DegenerateScale("all distances equal; scaled band is meaningless")
    candidates = [
        int(i) for i, v in enumerate(scaled.values) if low <= v <= high
    ]
    if len(candidates) < q:
        raise InsufficientCandidates(len(candidates), q)
    picks = SplitMix64(seed).sample_without_replacement(len(candidates), q)
    return [candidates[p] for p in picks]


@dataclass(frozen=True)
class DistributionSummary:
    """Five-number summary plus moments, with the raw values attached."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    mean: float
    std: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def distribution_summary(report: DistanceReport) -> DistributionSummary:
    """Summary of per-image distances; quartiles interpolate linearly.

    Standard deviation is the population form, matching split_stats.
    """
    values = report.image_distances
    q1, median, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    return DistributionSummary(
        minimum=float(values.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        maximum=float(values.max()),
        mean=float(values.mean()),
        std=float(values.std()),
        values=values,
    )
