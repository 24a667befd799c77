"""Pairwise distances, per-image and dataset-level scores, and rankings.

The m x n matrix holds Euclidean distances from every secondary image to
every primary image. Row sums give each secondary image's distance from
the primary dataset; their mean is the dataset-level distance. Rows of a
cross-dataset table are normalized to sum to 1 so different models can
share one table.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .embedding_io import FeatureMatrix
from .errors import (
    DimensionMismatch,
    EmptyInput,
    KTooLarge,
    MixedPrimary,
    SimdistError,
)
from .projection import DEFAULT_COMPONENTS, project_pair


def _rows(out: np.ndarray, secondary: np.ndarray, primary: np.ndarray, lo: int, hi: int):
    # one fixed-shape expression per row keeps results identical no matter
    # how rows are partitioned across threads
    for j in range(lo, hi):
        diff = primary - secondary[j]
        out[j] = np.sqrt((diff * diff).sum(axis=1))


def pairwise(
    secondary_proj: np.ndarray, primary_proj: np.ndarray, threads: int = 1
) -> np.ndarray:
    """Distance from every secondary row (axis 0) to every primary row (axis 1)."""
    secondary_proj = np.asarray(secondary_proj, dtype=np.float64)
    primary_proj = np.asarray(primary_proj, dtype=np.float64)
    if secondary_proj.ndim != 2 or primary_proj.ndim != 2:
        raise DimensionMismatch("projections must be 2-d")
    if secondary_proj.shape[1] != primary_proj.shape[1]:
        raise DimensionMismatch(
            f"column counts differ: {secondary_proj.shape[1]} "
            f"vs {primary_proj.shape[1]}"
        )
    m = secondary_proj.shape[0]
    out = np.empty((m, primary_proj.shape[0]))
    threads = max(1, min(threads, m)) if m else 1
    if threads == 1:
        _rows(out, secondary_proj, primary_proj, 0, m)
        return out
    bounds = [m * i // threads for i in range(threads + 1)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_rows, out, secondary_proj, primary_proj, lo, hi)
            for lo, hi in zip(bounds, bounds[1:])
        ]
        for future in futures:
            future.result()
    return out


def image_distances(matrix: np.ndarray) -> np.ndarray:
    """Row sums: each secondary image's total distance from the primary."""
    return np.asarray(matrix, dtype=np.float64).sum(axis=1)


def dataset_distance(distances: np.ndarray) -> float:
    """Mean of the per-image distances."""
    distances = np.asarray(distances, dtype=np.float64)
    if distances.size == 0:
        raise EmptyInput("no image distances to average")
    return float(np.mean(distances))


@dataclass(frozen=True)
class DistanceReport:
    """One secondary-vs-primary comparison.

    `matrix` is dropped when a report is rebuilt from its serialized form;
    everything else survives the round trip.
    """

    primary_id: str
    secondary_id: str
    image_ids: tuple[str, ...]
    image_distances: np.ndarray = field(repr=False)
    dataset_distance: float
    matrix: np.ndarray | None = field(default=None, repr=False)
    # I^dist sums over primary images, so its scale depends on n; carry it
    n_primary: int | None = None

    def __post_init__(self):
        dists = np.ascontiguousarray(self.image_distances, dtype=np.float64)
        dists.flags.writeable = False
        object.__setattr__(self, "image_distances", dists)
        object.__setattr__(self, "image_ids", tuple(self.image_ids))
        m = dists.shape[0]
        if m == 0:
            raise EmptyInput("report needs at least one secondary image")
        if len(self.image_ids) != m:
            raise DimensionMismatch(f"{len(self.image_ids)} ids for {m} rows")
        if self.matrix is not None:
            matrix = np.ascontiguousarray(self.matrix, dtype=np.float64)
            matrix.flags.writeable = False
            object.__setattr__(self, "matrix", matrix)
            if matrix.shape[0] != m:
                raise DimensionMismatch("matrix rows must match image count")
            if np.any(matrix < 0):
                raise SimdistError("pairwise distances must be nonnegative")
        mean = float(np.mean(dists))
        if abs(self.dataset_distance - mean) > 1e-12 * max(1.0, abs(mean)):
            raise SimdistError("dataset_distance is not the mean of image_distances")

    @property
    def m(self) -> int:
        return len(self.image_ids)


def distance_report(
    primary: FeatureMatrix,
    secondary: FeatureMatrix,
    z: int = DEFAULT_COMPONENTS,
    threads: int = 1,
    keep_matrix: bool = True,
) -> DistanceReport:
    """Full pipeline: joint projection, pairwise matrix, row sums, mean."""
    result = project_pair(primary, secondary, z)
    matrix = pairwise(result.projected_secondary, result.projected_primary, threads)
    per_image = image_distances(matrix)
    return DistanceReport(
        primary_id=primary.dataset_id,
        secondary_id=secondary.dataset_id,
        image_ids=secondary.image_ids,
        image_distances=per_image,
        dataset_distance=dataset_distance(per_image),
        matrix=matrix if keep_matrix else None,
        n_primary=primary.n,
    )


def normalize_rows(raw: np.ndarray) -> tuple[np.ndarray, tuple[bool, ...]]:
    """Divide each row by its sum; all-zero rows pass through flagged."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise DimensionMismatch("table must be 2-d")
    sums = raw.sum(axis=1)
    zero = sums == 0.0
    safe = np.where(zero, 1.0, sums)
    return raw / safe[:, None], tuple(bool(flag) for flag in zero)


@dataclass(frozen=True)
class DistanceTable:
    """Cross-dataset score table, one model per row, raw and row-normalized."""

    row_labels: tuple[str, ...]
    column_labels: tuple[str, ...]
    raw: np.ndarray = field(repr=False)
    normalized: np.ndarray = field(repr=False)
    zero_rows: tuple[bool, ...]

    def __post_init__(self):
        raw = np.ascontiguousarray(self.raw, dtype=np.float64)
        normalized = np.ascontiguousarray(self.normalized, dtype=np.float64)
        raw.flags.writeable = False
        normalized.flags.writeable = False
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "normalized", normalized)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "column_labels", tuple(self.column_labels))
        object.__setattr__(self, "zero_rows", tuple(self.zero_rows))
        shape = (len(self.row_labels), len(self.column_labels))
        if raw.shape != shape or normalized.shape != shape:
            raise DimensionMismatch(
                f"table shape {raw.shape} does not match labels {shape}"
            )
        if len(self.zero_rows) != shape[0]:
            raise DimensionMismatch("one zero-row flag per row required")


def build_table(
    row_labels, column_labels, raw: np.ndarray
) -> DistanceTable:
    """Assemble a DistanceTable, normalizing rows and flagging zero ones."""
    normalized, zero = normalize_rows(raw)
    return DistanceTable(
        row_labels=tuple(row_labels),
        column_labels=tuple(column_labels),
        raw=np.asarray(raw, dtype=np.float64),
        normalized=normalized,
        zero_rows=zero,
    )


@dataclass(frozen=True)
class PcSweep:
    """Dataset distance per component count, with successive deltas."""

    z_values: tuple[int, ...]
    o_dist: tuple[float, ...]
    deltas: tuple[float, ...]


def pc_sweep(
    primary: FeatureMatrix,
    secondary: FeatureMatrix,
    z_values,
    threads: int = 1,
) -> PcSweep:
    """Run the full pipeline once per z and tabulate the results."""
    z_values = tuple(int(z) for z in z_values)
    if not z_values:
        raise EmptyInput("no component counts to sweep")
    scores = tuple(
        distance_report(primary, secondary, z, threads, keep_matrix=False).dataset_distance
        for z in z_values
    )
    deltas = tuple(
        abs(b - a) for a, b in zip(scores, scores[1:])
    )
    return PcSweep(z_values=z_values, o_dist=scores, deltas=deltas)


@dataclass(frozen=True)
class Ranking:
    """Secondaries ordered by dataset distance, closest first."""

    primary_id: str
    order: tuple[tuple[str, float], ...]

    def closest(self, k: int) -> tuple[str, ...]:
        return tuple(label for label, _ in self.order[:k])

    def farthest(self, k: int) -> tuple[str, ...]:
        ranked = sorted(self.order, key=lambda item: (-item[1], item[0]))
        return tuple(label for label, _ in ranked[:k])


def rank_datasets(reports) -> Ranking:
    """Sort reports by dataset distance ascending, label-lexicographic ties."""
    reports = list(reports)
    if not reports:
        raise EmptyInput("no reports to rank")
    primary_ids = {report.primary_id for report in reports}
    if len(primary_ids) != 1:
        raise MixedPrimary(f"reports span primaries {sorted(primary_ids)}")
    order = sorted(
        ((r.secondary_id, r.dataset_distance) for r in reports),
        key=lambda item: (item[1], item[0]),
    )
    return Ranking(primary_id=reports[0].primary_id, order=tuple(order))


def extreme_images(report: DistanceReport, k: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """The k closest and k farthest secondary image ids by per-image distance."""
    if not 0 <= k <= report.m:
        raise KTooLarge(f"k={k} outside [0, {report.m}]")
    pairs = list(zip(report.image_ids, report.image_distances))
    closest = sorted(pairs, key=lambda item: (item[1], item[0]))
    farthest = sorted(pairs, key=lambda item: (-item[1], item[0]))
    return (
        tuple(label for label, _ in closest[:k]),
        tuple(label for label, _ in farthest[:k]),
    )
