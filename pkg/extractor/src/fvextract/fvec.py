"""Reader and writer for the FVEC1 feature-matrix interchange format.

Layout: a 20-byte little-endian header (magic ``SIMFV1``, version byte,
reserved byte, row count, column count, id-block length), then an id block
of newline-terminated UTF-8 lines (``#`` plus the dataset id first, one
image id per row after), then the float64 row-major payload. This module
is the sidecar's half of the contract; the engine reads what it writes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ExtractError

_MAGIC = b"SIMFV1"
_HEADER = struct.Struct("<6sBBIII")
_VERSION = 1


def _checked(dataset_id: str, image_ids: list[str], values: np.ndarray) -> np.ndarray:
    if "\n" in dataset_id or not dataset_id:
        raise ExtractError(f"bad dataset id: {dataset_id!r}")
    out = np.ascontiguousarray(values, dtype=np.float64)
    if out.ndim != 2:
        raise ExtractError(f"feature matrix must be 2-d, got shape {out.shape}")
    if out.shape[0] != len(image_ids):
        raise ExtractError(f"{out.shape[0]} rows but {len(image_ids)} image ids")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ExtractError(f"empty feature matrix: shape {out.shape}")
    if not np.isfinite(out).all():
        raise ExtractError("feature matrix contains NaN or infinity")
    seen = set()
    for image_id in image_ids:
        if "\n" in image_id or not image_id:
            raise ExtractError(f"bad image id: {image_id!r}")
        if image_id in seen:
            raise ExtractError(f"duplicate image id: {image_id!r}")
        seen.add(image_id)
    return out


def write_fvec(path: str | Path, dataset_id: str, image_ids: list[str], values: np.ndarray) -> None:
    """Write one feature matrix to ``path`` in FVEC1 layout."""
    out = _checked(dataset_id, list(image_ids), values)
    lines = ["#" + dataset_id] + list(image_ids)
    id_block = ("\n".join(lines) + "\n").encode("utf-8")
    header = _HEADER.pack(_MAGIC, _VERSION, 0, out.shape[0], out.shape[1], len(id_block))
    Path(path).write_bytes(header + id_block + out.tobytes(order="C"))


def read_fvec(path: str | Path) -> tuple[str, list[str], np.ndarray]:
    """Read an FVEC1 file back as ``(dataset_id, image_ids, values)``."""
    data = Path(path).read_bytes()
    if data[:6] != _MAGIC:
        raise ExtractError(f"{path}: not an FVEC1 file")
    if len(data) < _HEADER.size:
        raise ExtractError(f"{path}: truncated header")
    _, version, reserved, rows, cols, id_block_len = _HEADER.unpack_from(data)
    if version != _VERSION or reserved != 0:
        raise ExtractError(f"{path}: unsupported version {version}")
    id_end = _HEADER.size + id_block_len
    payload_end = id_end + rows * cols * 8
    if len(data) < payload_end:
        raise ExtractError(f"{path}: truncated payload")
    lines = data[_HEADER.size:id_end].decode("utf-8").split("\n")
    if lines[-1] != "" or not lines[0].startswith("#"):
        raise ExtractError(f"{path}: malformed id block")
    dataset_id, image_ids = lines[0][1:], lines[1:-1]
    if len(image_ids) != rows:
        raise ExtractError(f"{path}: {len(image_ids)} ids for {rows} rows")
    values = np.frombuffer(data[id_end:payload_end], dtype="<f8").reshape(rows, cols).copy()
    return dataset_id, image_ids, values
