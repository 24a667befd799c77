"""Input-side image handling: discovery, decoding, resizing.

Backbones consume square float32 batches in [0, 1]; this module is the only
place pixels are touched on the way in.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .errors import BadConfig, UnreadableImage

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".pgm"}


def list_images(directory: str | Path) -> list[Path]:
    """Image files under ``directory``, sorted by filename stem."""
    root = Path(directory)
    if not root.is_dir():
        raise BadConfig(f"not a directory: {root}")
    found = [
        p for p in root.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES and not p.name.startswith(".")
    ]
    return sorted(found, key=lambda p: (p.stem, p.name))


def load_image(path: str | Path, resize: int) -> torch.Tensor:
    """Decode ``path`` into a (3, resize, resize) float32 tensor in [0, 1]."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB").resize((resize, resize), Image.Resampling.BILINEAR)
    except (OSError, ValueError) as exc:
        raise UnreadableImage(f"{path}: {exc}") from None
    arr = np.asarray(rgb, dtype=np.float32) / 255.0
    return torch.from_numpy(arr).permute(2, 0, 1).contiguous()
