"""Vision backbones that turn an image batch into one feature row per image.

Six named choices cover the extraction styles in common use: a plain and an
adapter-tuned foundation encoder, a prompt-conditioned decoder whose hidden
states are concatenated, a classifier's penultimate layer, and two
crack-oriented conv encoders whose stage or skip outputs are concatenated.

Weights come from a local checkpoint file or, with ``untrained``, from
seeded random initialization; nothing here ever reaches the network. Row
width is whatever the chosen module emits. It is recorded in the output
header and no other code is allowed to assume a number.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn
from torchvision.models import resnet18, vit_b_16, vit_b_32

from .config import PROMPT_BACKBONE, ExtractorConfig
from .errors import BadConfig, MissingWeights


def _gap(t: torch.Tensor) -> torch.Tensor:
    """Global average pool (b, c, h, w) down to (b, c)."""
    return t.mean(dim=(2, 3))


class _Stage(nn.Sequential):
    """Two 3x3 convs with ReLUs, the building block of the conv backbones."""

    def __init__(self, cin: int, cout: int):
        super().__init__(
            nn.Conv2d(cin, cout, 3, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(cout, cout, 3, padding=1),
            nn.ReLU(inplace=True),
        )


class CrackEncoder(nn.Module):
    """Staged conv encoder; the feature row concatenates every stage's pooled output."""

    def __init__(self):
        super().__init__()
        self.stages = nn.ModuleList([_Stage(3, 32), _Stage(32, 64), _Stage(64, 128)])
        self.pool = nn.MaxPool2d(2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        pooled = []
        h = x
        for stage in self.stages:
            h = stage(h)
            pooled.append(_gap(h))
            h = self.pool(h)
        return torch.cat(pooled, dim=1)


class NestedEncoder(nn.Module):
    """Encoder whose nested skip refinements are pooled and concatenated."""

    def __init__(self):
        super().__init__()
        self.x00 = _Stage(3, 32)
        self.x10 = _Stage(32, 64)
        self.x20 = _Stage(64, 128)
        self.x01 = _Stage(32 + 64, 32)
        self.x11 = _Stage(64 + 128, 64)
        self.x02 = _Stage(32 + 32 + 64, 32)
        self.pool = nn.MaxPool2d(2)
        self.up = nn.Upsample(scale_factor=2, mode="nearest")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        a = self.x00(x)
        b = self.x10(self.pool(a))
        c = self.x20(self.pool(b))
        s01 = self.x01(torch.cat([a, self.up(b)], dim=1))
        s11 = self.x11(torch.cat([b, self.up(c)], dim=1))
        s02 = self.x02(torch.cat([a, s01, self.up(s11)], dim=1))
        return torch.cat([_gap(s01), _gap(s11), _gap(s02)], dim=1)


def _prompt_vector(text: str) -> torch.Tensor:
    """Normalized bag-of-bytes histogram; one prompt always conditions one way."""
    hist = torch.zeros(64)
    data = text.encode("utf-8")
    for byte in data:
        hist[byte % 64] += 1.0
    return hist / max(len(data), 1)


class PromptedDecoder(nn.Module):
    """Conv encoder-decoder with a prompt-conditioned bottleneck.

    The prompt histogram is mapped to a feature-wise scale and shift applied
    at the bottleneck; the feature row concatenates the pooled conditioned
    bottleneck and both decoder states.
    """

    def __init__(self):
        super().__init__()
        self.enc1 = _Stage(3, 32)
        self.enc2 = _Stage(32, 64)
        self.mid = _Stage(64, 64)
        self.film = nn.Linear(64, 128)
        self.dec1 = _Stage(64, 32)
        self.dec2 = _Stage(32, 16)
        self.pool = nn.MaxPool2d(2)
        self.up = nn.Upsample(scale_factor=2, mode="nearest")

    def forward(self, x: torch.Tensor, prompt: str) -> torch.Tensor:
        h = self.enc2(self.pool(self.enc1(x)))
        m = self.mid(self.pool(h))
        gamma, beta = self.film(_prompt_vector(prompt)).chunk(2)
        m = m * (1.0 + gamma[None, :, None, None]) + beta[None, :, None, None]
        d1 = self.dec1(self.up(m))
        d2 = self.dec2(self.up(d1))
        return torch.cat([_gap(m), _gap(d1), _gap(d2)], dim=1)


def _vit_tokens(vit: nn.Module, x: torch.Tensor) -> torch.Tensor:
    # _process_input patchifies and projects; reimplementing it would just
    # duplicate torchvision.
    t = vit._process_input(x)
    cls = vit.class_token.expand(x.shape[0], -1, -1)
    return vit.encoder(torch.cat([cls, t], dim=1))


class FoundationEncoder(nn.Module):
    """Transformer encoder; the feature row is the mean over patch tokens."""

    def __init__(self, resize: int):
        super().__init__()
        self.vit = vit_b_16(weights=None, image_size=resize)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return _vit_tokens(self.vit, x)[:, 1:].mean(dim=1)


class AdaptedEncoder(nn.Module):
    """Foundation encoder with a residual adapter on the token stream."""

    def __init__(self, resize: int):
        super().__init__()
        self.vit = vit_b_32(weights=None, image_size=resize)
        dim = self.vit.hidden_dim
        self.adapter = nn.Sequential(nn.Linear(dim, 64), nn.GELU(), nn.Linear(64, dim))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        t = _vit_tokens(self.vit, x)
        t = t + self.adapter(t)
        return t[:, 1:].mean(dim=1)


class PenultimateClassifier(nn.Module):
    """Classification network cut just before its final linear layer."""

    def __init__(self):
        super().__init__()
        net = resnet18(weights=None)
        self.body = nn.Sequential(*list(net.children())[:-1])

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.flatten(self.body(x), 1)


# resize must tile evenly into patches for the transformer encoders
_PATCH_MULTIPLE = {"seg-foundation": 16, "adapted-foundation": 32}

_FACTORIES = {
    "seg-foundation": lambda config: FoundationEncoder(config.resize),
    "prompt-decoder": lambda config: PromptedDecoder(),
    "classifier-penultimate": lambda config: PenultimateClassifier(),
    "crack-encoder-concat": lambda config: CrackEncoder(),
    "nested-skips": lambda config: NestedEncoder(),
    "adapted-foundation": lambda config: AdaptedEncoder(config.resize),
}


class Backbone:
    """A ready-to-run backbone with a uniform batch-to-rows call."""

    def __init__(self, name: str, module: nn.Module, prompt: str | None = None):
        self.name = name
        self._module = module
        self._prompt = prompt

    def embed(self, batch: torch.Tensor) -> np.ndarray:
        """Map a (b, 3, s, s) batch to a float64 (b, width) row block."""
        with torch.no_grad():
            if self._prompt is not None:
                out = self._module(batch, self._prompt)
            else:
                out = self._module(batch)
        return out.cpu().numpy().astype(np.float64)


def build_backbone(config: ExtractorConfig) -> Backbone:
    """Construct, weight, and freeze the configured backbone."""
    name = config.backbone
    if name not in _FACTORIES:
        raise BadConfig(f"unknown backbone {name!r}")
    multiple = _PATCH_MULTIPLE.get(name)
    if multiple is not None and config.resize % multiple != 0:
        raise BadConfig(f"{name} needs resize divisible by {multiple}, got {config.resize}")
    torch.manual_seed(config.seed)
    module = _FACTORIES[name](config)
    if config.weights is not None:
        try:
            state = torch.load(config.weights, map_location="cpu")
            module.load_state_dict(state)
        except Exception as exc:
            raise MissingWeights(f"{config.weights}: {exc}") from None
    elif not config.untrained:
        raise MissingWeights(
            f"no local weights for {name}; pass weights=PATH or untrained=true"
        )
    module.eval()
    prompt = config.prompt if name == PROMPT_BACKBONE else None
    return Backbone(name, module, prompt=prompt)
