"""Feature-extraction sidecar: image folders in, FVEC1 matrices and PGM masks out."""

from .backbones import Backbone, build_backbone
from .config import (
    BACKBONE_CHOICES,
    DEFAULT_PROMPT,
    DEFAULT_RESIZE,
    PROMPT_BACKBONE,
    ExtractorConfig,
    build_config,
    load_config_file,
)
from .errors import (
    BadConfig,
    DuplicateStem,
    ExtractError,
    InconsistentWidth,
    MissingWeights,
    NoImages,
    UnreadableImage,
)
from .extract import extract
from .fvec import read_fvec, write_fvec
from .images import list_images, load_image
from .masks import convert_masks

__version__ = "0.1.0"

__all__ = [
    "BACKBONE_CHOICES",
    "Backbone",
    "BadConfig",
    "DEFAULT_PROMPT",
    "DEFAULT_RESIZE",
    "DuplicateStem",
    "ExtractError",
    "ExtractorConfig",
    "InconsistentWidth",
    "MissingWeights",
    "NoImages",
    "PROMPT_BACKBONE",
    "UnreadableImage",
    "build_backbone",
    "build_config",
    "convert_masks",
    "extract",
    "list_images",
    "load_config_file",
    "load_image",
    "read_fvec",
    "write_fvec",
]
