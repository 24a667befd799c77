"""Folder-to-FVEC1 extraction: one feature row per image, ids from stems."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .backbones import build_backbone
from .config import ExtractorConfig
from .errors import DuplicateStem, InconsistentWidth, NoImages
from .fvec import write_fvec
from .images import list_images, load_image

# Equal-shaped batches give bitwise-identical rows for identical inputs;
# that is what lands duplicate images at distance 0 downstream.
_BATCH = 16


def extract(config: ExtractorConfig) -> Path:
    """Run the configured backbone over every image and write one FVEC1 file.

    Rows follow sorted filename stems and each row's id is its image's stem,
    so ids stay joinable with prediction and mask directories named the same
    way. The file is written once, at the end.
    """
    config.validate()
    backbone = build_backbone(config)
    paths = list_images(config.input_dir)
    if not paths:
        raise NoImages(f"no images under {config.input_dir}")
    stems = [p.stem for p in paths]
    seen: dict[str, Path] = {}
    for path in paths:
        if path.stem in seen:
            raise DuplicateStem(f"{seen[path.stem].name} and {path.name} share a stem")
        seen[path.stem] = path
    blocks: list[np.ndarray] = []
    width: int | None = None
    for start in range(0, len(paths), _BATCH):
        chunk = paths[start:start + _BATCH]
        batch = torch.stack([load_image(p, config.resize) for p in chunk])
        rows = backbone.embed(batch)
        if rows.ndim != 2 or rows.shape[0] != len(chunk):
            raise InconsistentWidth(
                f"{backbone.name} returned shape {rows.shape} for a batch of {len(chunk)}"
            )
        if width is None:
            width = rows.shape[1]
        elif rows.shape[1] != width:
            raise InconsistentWidth(f"row width changed from {width} to {rows.shape[1]}")
        blocks.append(rows)
    dataset_id = config.dataset_id or Path(config.input_dir).name
    output = Path(config.output)
    write_fvec(output, dataset_id, stems, np.vstack(blocks))
    return output
