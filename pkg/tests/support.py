"""Shared constants and small builders for the engine test suite."""

from pathlib import Path

import numpy as np

from simdist.performance import PixelGrid

FIXTURES = Path(__file__).parent / "fixtures"


def grid_from(rows) -> PixelGrid:
    """2-d nested list / array of floats in [0, 1] -> PixelGrid."""
    array = np.asarray(rows, dtype=np.float64)
    return PixelGrid(width=array.shape[1], height=array.shape[0], values=array)
