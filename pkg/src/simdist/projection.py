"""Joint centering and SVD-based projection to principal components.

Both datasets are centered with one shared mean, the centered stack is
decomposed as A = U S Vt, and rows are projected onto the top-z right
singular vectors. Component signs follow a fixed convention so repeated
runs produce identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding_io import FeatureMatrix
from .errors import DimensionMismatch, TooManyComponents

DEFAULT_COMPONENTS = 25

# Singular values at or below RANK_EPS * largest count as zero for rank.
RANK_EPS = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    """Fitted projection plus both datasets' coordinates in it."""

    mean: np.ndarray = field(repr=False)
    components: np.ndarray = field(repr=False)
    explained_variance: np.ndarray = field(repr=False)
    projected_primary: np.ndarray = field(repr=False)
    projected_secondary: np.ndarray = field(repr=False)
    z: int

    def __post_init__(self):
        for name in (
            "mean",
            "components",
            "explained_variance",
            "projected_primary",
            "projected_secondary",
        ):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        q = self.mean.shape[0]
        if self.components.shape != (q, self.z):
            raise DimensionMismatch(
                f"components shape {self.components.shape}, expected {(q, self.z)}"
            )
        if self.explained_variance.shape != (self.z,):
            raise DimensionMismatch("explained_variance length must equal z")
        for proj in (self.projected_primary, self.projected_secondary):
            if proj.ndim != 2 or proj.shape[1] != self.z:
                raise DimensionMismatch("projections must be rows x z")
        if np.any(np.diff(self.explained_variance) > 0):
            raise DimensionMismatch("explained_variance must be nonincreasing")

    @property
    def rank(self) -> int:
        """Count of components whose singular value is numerically nonzero."""
        s = np.sqrt(self.explained_variance)
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.count_nonzero(s > RANK_EPS * s[0]))


def center_concat(
    primary: FeatureMatrix, secondary: FeatureMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """Stack primary rows over secondary rows and subtract the joint mean."""
    if primary.q != secondary.q:
        raise DimensionMismatch(
            f"feature widths differ: {primary.q} vs {secondary.q}"
        )
    stacked = np.vstack([primary.values, secondary.values])
    mean = stacked.mean(axis=0)
    return stacked - mean, mean


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    np.argmax picks the lowest index on ties, which is the convention.
    """
    anchors = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[anchors, np.arange(components.shape[1])])
    signs[signs == 0] = 1.0
    return components * signs


def fit_pca(
    centered: np.ndarray,
    z: int,
    *,
    n_primary: int | None = None,
    mean: np.ndarray | None = None,
) -> ProjectionResult:
    """Project centered rows onto the top-z right singular vectors.

    `n_primary` marks where the primary rows end so the projection can be
    split back into the two datasets; when omitted every row counts as
    primary. `mean` is carried through for later out-of-sample use.
    """
    centered = np.asarray(centered, dtype=np.float64)
    total, q = centered.shape
    limit = min(total, q)
    if not 1 <= z <= limit:
        raise TooManyComponents(f"z={z} outside [1, {limit}] for {total}x{q}")
    if n_primary is None:
        n_primary = total
    if mean is None:
        mean = np.zeros(q)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = _fix_signs(vt[:z].T)
    projected = centered @ components
    # max(total-1, 1) keeps a single-row (all-zero) input from dividing by 0
    variance = (singular[:z] ** 2) / max(total - 1, 1)
    return ProjectionResult(
        mean=mean,
        components=components,
        explained_variance=variance,
        projected_primary=projected[:n_primary],
        projected_secondary=projected[n_primary:],
        z=z,
    )


def project_pair(
    primary: FeatureMatrix,
    secondary: FeatureMatrix,
    z: int = DEFAULT_COMPONENTS,
) -> ProjectionResult:
    """Center the pair jointly and project both datasets to z components."""
    centered, mean = center_concat(primary, secondary)
    return fit_pca(centered, z, n_primary=primary.n, mean=mean)
