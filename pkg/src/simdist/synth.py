"""Seeded synthetic feature matrices for tests and demos.

Three generators: standard normal rows plus a constant shift, a low-rank
product with optional additive noise, and two exact point clusters at
+shift and -shift. All randomness comes from the documented generator in
`rng`, so outputs are reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding_io import FeatureMatrix
from .errors import BadSpec
from .rng import RandomStream

KINDS = ("gaussian-shifted", "low-rank", "two-cluster")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic matrix."""

    n: int
    q: int
    kind: str
    shift: float | tuple[float, ...] = 0.0
    rank: int | None = None
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadSpec(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 1 or self.q < 1:
            raise BadSpec(f"need n >= 1 and q >= 1, got {self.n}x{self.q}")
        if self.noise < 0:
            raise BadSpec(f"noise must be >= 0, got {self.noise}")
        if self.kind == "low-rank":
            if self.rank is None or not 1 <= self.rank <= min(self.n, self.q):
                raise BadSpec(
                    f"low-rank needs 1 <= rank <= {min(self.n, self.q)}, "
                    f"got {self.rank}"
                )
        else:
            if self.rank is not None:
                raise BadSpec(f"rank is only meaningful for low-rank, got {self.rank}")
            if self.noise != 0.0:
                raise BadSpec(f"noise is only meaningful for low-rank, got {self.noise}")

    def shift_vector(self) -> np.ndarray:
        """The shift as a q-vector; a scalar broadcasts to every coordinate."""
        if np.isscalar(self.shift):
            return np.full(self.q, float(self.shift))
        vector = np.asarray(self.shift, dtype=np.float64)
        if vector.shape != (self.q,):
            raise BadSpec(f"shift has shape {vector.shape}, expected ({self.q},)")
        return vector


def generate(spec: SynthSpec, dataset_id: str | None = None) -> FeatureMatrix:
    """Build the matrix described by `spec`, deterministically per seed."""
    shift = spec.shift_vector()
    stream = RandomStream(spec.seed)
    if spec.kind == "gaussian-shifted":
        values = stream.normals(spec.n * spec.q).reshape(spec.n, spec.q) + shift
    elif spec.kind == "low-rank":
        left = stream.normals(spec.n * spec.rank).reshape(spec.n, spec.rank)
        right = stream.normals(spec.rank * spec.q).reshape(spec.rank, spec.q)
        values = left @ right
        if spec.noise > 0.0:
            values = values + spec.noise * stream.normals(
                spec.n * spec.q
            ).reshape(spec.n, spec.q)
    else:
        # first floor(n/2) rows sit exactly at +shift, the rest at -shift
        values = np.empty((spec.n, spec.q))
        half = spec.n // 2
        values[:half] = shift
        values[half:] = -shift
    if dataset_id is None:
        dataset_id = f"synth-{spec.kind}-s{spec.seed}"
    ids = tuple(f"row{i}" for i in range(spec.n))
    return FeatureMatrix(dataset_id, ids, values)
