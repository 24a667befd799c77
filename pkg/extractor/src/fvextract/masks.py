"""Mask and probability-map conversion into the binary P5 PGM convention.

Masks binarize at the usual 8-bit midpoint: a pixel counts as positive when
its value exceeds 127, and positives are written as 255. Probability maps
can skip binarization with ``keep_gray`` so their 8-bit levels survive.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import UnreadableImage
from .images import list_images

_THRESHOLD = 127


def _load_gray(path: Path) -> np.ndarray:
    """Decode ``path`` as 8-bit grayscale, rescaling deeper sources first."""
    try:
        with Image.open(path) as img:
            arr = np.asarray(img)
            if arr.dtype != np.uint8:
                # 16-bit (or deeper) grayscale: map the full range onto 0..255
                scaled = np.round(arr.astype(np.float64) * (255.0 / 65535.0))
                return np.clip(scaled, 0.0, 255.0).astype(np.uint8)
            if img.mode != "L":
                return np.asarray(img.convert("L"))
            return arr
    except (OSError, ValueError) as exc:
        raise UnreadableImage(f"{path}: {exc}") from None


def _write_pgm(path: Path, values: np.ndarray) -> None:
    height, width = values.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    path.write_bytes(header + values.tobytes())


def convert_masks(in_dir: str | Path, out_dir: str | Path, keep_gray: bool = False) -> list[Path]:
    """Convert every image in ``in_dir`` to a P5 PGM named after its stem.

    An empty input directory is a success with zero outputs.
    """
    out_root = Path(out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for path in list_images(in_dir):
        gray = _load_gray(path)
        if keep_gray:
            values = gray
        else:
            values = np.where(gray > _THRESHOLD, 255, 0).astype(np.uint8)
        target = out_root / (path.stem + ".pgm")
        _write_pgm(target, values)
        written.append(target)
    return written
