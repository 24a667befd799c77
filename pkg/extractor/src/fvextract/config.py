"""Extractor configuration: defaults, key=value files, and flag overrides.

A run is described by at most three layers, later ones winning: built-in
defaults, a ``key = value`` config file, and command-line flags. The merged
result becomes one frozen :class:`ExtractorConfig` that the rest of the
package treats as read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import BadConfig

BACKBONE_CHOICES = (
    "seg-foundation",
    "prompt-decoder",
    "classifier-penultimate",
    "crack-encoder-concat",
    "nested-skips",
    "adapted-foundation",
)
PROMPT_BACKBONE = "prompt-decoder"

DEFAULT_RESIZE = 448
DEFAULT_PROMPT = "line structures"


@dataclass(frozen=True)
class ExtractorConfig:
    """Everything one extraction run needs.

    ``prompt`` only matters for the prompt-conditioned backbone; the other
    backbones ignore it. ``untrained`` asks for seeded random weights, the
    offline substitute for a local checkpoint passed via ``weights``.
    """

    backbone: str | None = None
    input_dir: Path | None = None
    output: Path | None = None
    resize: int = DEFAULT_RESIZE
    prompt: str = DEFAULT_PROMPT
    seed: int = 0
    untrained: bool = False
    weights: Path | None = None
    dataset_id: str | None = None

    def validate(self) -> None:
        if self.backbone is None:
            raise BadConfig("no backbone selected")
        if self.backbone not in BACKBONE_CHOICES:
            raise BadConfig(f"unknown backbone {self.backbone!r}; choices: {', '.join(BACKBONE_CHOICES)}")
        if self.input_dir is None:
            raise BadConfig("no input directory")
        if self.output is None:
            raise BadConfig("no output path")
        if self.resize < 1:
            raise BadConfig(f"resize must be positive, got {self.resize}")
        if self.seed < 0:
            raise BadConfig(f"seed must be nonnegative, got {self.seed}")
        if self.backbone == PROMPT_BACKBONE and not self.prompt:
            raise BadConfig(f"{PROMPT_BACKBONE} needs a nonempty prompt")


_FIELD_BY_KEY = {
    "backbone": "backbone",
    "input": "input_dir",
    "out": "output",
    "resize": "resize",
    "prompt": "prompt",
    "seed": "seed",
    "untrained": "untrained",
    "weights": "weights",
    "id": "dataset_id",
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(key: str, raw: str) -> object:
    if key in ("resize", "seed"):
        try:
            return int(raw)
        except ValueError:
            raise BadConfig(f"{key} wants an integer, got {raw!r}") from None
    if key == "untrained":
        try:
            return _BOOL_WORDS[raw.lower()]
        except KeyError:
            raise BadConfig(f"untrained wants true/false, got {raw!r}") from None
    if key in ("input", "out", "weights"):
        return Path(raw)
    return raw


def load_config_file(path: str | Path) -> dict[str, object]:
    """Parse a ``key = value`` file into field settings.

    Blank lines and ``#`` comment lines are skipped; unknown keys are
    rejected rather than ignored so typos fail loudly.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BadConfig(f"{path}: {exc}") from None
    settings: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise BadConfig(f"{path}:{lineno}: expected key = value, got {stripped!r}")
        key = key.strip()
        if key not in _FIELD_BY_KEY:
            raise BadConfig(f"{path}:{lineno}: unknown key {key!r}")
        settings[_FIELD_BY_KEY[key]] = _coerce(key, raw.strip())
    return settings


def build_config(*layers: dict[str, object]) -> ExtractorConfig:
    """Merge setting layers (later wins) into a validated config."""
    merged: dict[str, object] = {}
    for layer in layers:
        merged.update(layer)
    config = ExtractorConfig(**merged)
    config.validate()
    return config
