"""Command-line front end: extract features, convert masks, list backbones."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import BACKBONE_CHOICES, build_config, load_config_file
from .errors import ExtractError
from .extract import extract
from .masks import convert_masks

# argparse defaults are None so only flags the user actually passed
# override the config file
_FLAG_FIELDS = {
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


_PATH_FLAGS = {"input", "out", "weights"}


def cmd_extract(args: argparse.Namespace) -> None:
    file_settings = load_config_file(args.config) if args.config else {}
    flag_settings = {}
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is None:
            continue
        flag_settings[field] = Path(value) if flag in _PATH_FLAGS else value
    config = build_config(file_settings, flag_settings)
    path = extract(config)
    print(f"wrote {path}")


def cmd_convert_masks(args: argparse.Namespace) -> None:
    written = convert_masks(args.input, args.out, keep_gray=args.keep_gray)
    print(f"wrote {len(written)} files to {args.out}")


def cmd_backbones(args: argparse.Namespace) -> None:
    for name in BACKBONE_CHOICES:
        print(name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvextract", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run a backbone over an image folder")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--backbone", choices=BACKBONE_CHOICES)
    p.add_argument("--input", help="image directory")
    p.add_argument("--out", help="output FVEC1 path")
    p.add_argument("--resize", type=int, help="square input side (default 448)")
    p.add_argument("--prompt", help="text prompt for the prompt-conditioned backbone")
    p.add_argument("--seed", type=int, help="initialization seed")
    p.add_argument("--untrained", action="store_true", default=None,
                   help="use seeded random weights instead of a checkpoint")
    p.add_argument("--weights", help="local checkpoint file")
    p.add_argument("--id", help="dataset id to stamp (default: input directory name)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("convert-masks", help="rewrite masks as binary P5 PGM")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keep-gray", action="store_true",
                   help="keep 8-bit levels (for probability maps)")
    p.set_defaults(func=cmd_convert_masks)

    p = sub.add_parser("backbones", help="list backbone names")
    p.set_defaults(func=cmd_backbones)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ExtractError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
