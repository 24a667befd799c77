"""Tiny image writers and readers shared by the extractor tests."""

from pathlib import Path

import numpy as np
from PIL import Image


def write_solid(path: Path, rgb: tuple[int, int, int], size: int = 32) -> None:
    """Save a solid-color RGB PNG."""
    arr = np.broadcast_to(np.asarray(rgb, dtype=np.uint8), (size, size, 3)).copy()
    Image.fromarray(arr).save(path)


def write_gray(path: Path, values) -> None:
    """Save an 8-bit grayscale image from a 2-d array."""
    Image.fromarray(np.asarray(values, dtype=np.uint8), mode="L").save(path)


def write_gray16(path: Path, values) -> None:
    """Save a 16-bit grayscale PNG from a 2-d array."""
    Image.fromarray(np.asarray(values, dtype=np.uint16)).save(path)


def read_pgm(path: Path) -> np.ndarray:
    """Parse the strict P5 layout the converter writes."""
    data = Path(path).read_bytes()
    assert data.startswith(b"P5\n")
    dims, maxval, payload = data[3:].split(b"\n", 2)
    width, height = map(int, dims.split())
    assert maxval == b"255"
    values = np.frombuffer(payload, dtype=np.uint8)
    assert values.size == width * height
    return values.reshape(height, width)
