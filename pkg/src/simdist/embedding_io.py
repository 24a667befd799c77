"""Feature-matrix containers and FVEC1 / CSV readers and writers.

FVEC1 layout (little-endian):

    magic   6 bytes   "SIMFV1"
    version u8        1
    reserved u8       0
    rows    u32
    cols    u32
    id_len  u32       byte length of the id block
    ids     id_len bytes, UTF-8: "#<dataset_id>\\n" then one id per line
    data    rows*cols float64, row-major

The CSV fallback is plain RFC-4180 with '.' as the decimal separator; an
optional header whose first column is named "id" carries image ids.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagic,
    DimensionZero,
    IoFailure,
    NonFinite,
    ParseFailure,
    RaggedRows,
    TruncatedFile,
)

_MAGIC = b"SIMFV1"
_VERSION = 1
_HEADER = struct.Struct("<6sBBIII")


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """An n x q block of per-image feature vectors with stable row ids."""

    dataset_id: str
    image_ids: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ParseFailure(f"expected a 2-d matrix, got ndim={values.ndim}")
        n, q = values.shape
        if n < 1 or q < 1:
            raise DimensionZero(f"matrix must be at least 1x1, got {n}x{q}")
        if not np.isfinite(values).all():
            raise NonFinite("matrix contains NaN or Inf")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        ids = tuple(self.image_ids)
        object.__setattr__(self, "image_ids", ids)
        if len(ids) != n:
            raise ParseFailure(f"{len(ids)} image ids for {n} rows")
        if len(set(ids)) != len(ids):
            raise ParseFailure("image ids are not unique")
        for label in (self.dataset_id, *ids):
            if "\n" in label or "\r" in label:
                raise ParseFailure("ids must not contain newlines")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.dataset_id == other.dataset_id
            and self.image_ids == other.image_ids
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
        )

    __hash__ = None


def _build_id_block(matrix: FeatureMatrix) -> bytes:
    lines = ["#" + matrix.dataset_id, *matrix.image_ids]
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_fvec(matrix: FeatureMatrix, path) -> None:
    """Write `matrix` in FVEC1 form; read_fvec restores it bit-for-bit."""
    ids = _build_id_block(matrix)
    header = _HEADER.pack(_MAGIC, _VERSION, 0, matrix.n, matrix.q, len(ids))
    payload = matrix.values.astype("<f8", copy=False).tobytes(order="C")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(ids)
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_fvec(path) -> FeatureMatrix:
    """Read one FVEC1 file, rejecting anything that deviates from the format."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if blob[:6] != _MAGIC:
        raise BadMagic(f"{path}: not an FVEC1 file")
    if len(blob) < _HEADER.size:
        raise TruncatedFile(f"{path}: header cut short")
    _, version, reserved, rows, cols, id_len = _HEADER.unpack_from(blob)
    if version != _VERSION:
        raise ParseFailure(f"{path}: unsupported version {version}")
    if reserved != 0:
        raise ParseFailure(f"{path}: reserved byte is {reserved}, expected 0")
    if rows == 0 or cols == 0:
        raise DimensionZero(f"{path}: declares a {rows}x{cols} matrix")
    id_end = _HEADER.size + id_len
    if len(blob) < id_end:
        raise TruncatedFile(f"{path}: id block cut short")
    try:
        id_text = blob[_HEADER.size:id_end].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseFailure(f"{path}: id block is not UTF-8") from exc
    if not id_text.endswith("\n"):
        raise ParseFailure(f"{path}: id block must end with a newline")
    lines = id_text[:-1].split("\n")
    if not lines or not lines[0].startswith("#"):
        raise ParseFailure(f"{path}: id block must start with '#<dataset_id>'")
    dataset_id, image_ids = lines[0][1:], lines[1:]
    if len(image_ids) != rows:
        raise ParseFailure(
            f"{path}: {len(image_ids)} ids for {rows} declared rows"
        )
    expected = rows * cols * 8
    payload = blob[id_end:]
    if len(payload) < expected:
        raise TruncatedFile(
            f"{path}: payload holds {len(payload) // 8} floats, "
            f"header declares {rows * cols}"
        )
    if len(payload) > expected:
        raise ParseFailure(f"{path}: {len(payload) - expected} trailing bytes")
    values = np.frombuffer(payload, dtype="<f8").reshape(rows, cols)
    if not np.isfinite(values).all():
        raise NonFinite(f"{path}: payload contains NaN or Inf")
    return FeatureMatrix(dataset_id, tuple(image_ids), values)


def read_csv(path, has_header: bool = False, dataset_id: str | None = None) -> FeatureMatrix:
    """Read a rectangular numeric CSV.

    With `has_header` and a first column named "id", that column supplies
    image ids; otherwise ids are synthesized as row0, row1, ...
    """
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    id_column = False
    if has_header:
        if not rows:
            raise DimensionZero(f"{path}: no rows")
        header, rows = rows[0], rows[1:]
        id_column = bool(header) and header[0] == "id"
    if not rows:
        raise DimensionZero(f"{path}: no data rows")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise RaggedRows(f"{path}: row widths {sorted(widths)}")
    image_ids: list[str] = []
    numeric: list[list[float]] = []
    for index, row in enumerate(rows):
        if id_column:
            image_ids.append(row[0])
            row = row[1:]
        else:
            image_ids.append(f"row{index}")
        parsed = []
        for cell in row:
            try:
                value = float(cell)
            except ValueError as exc:
                raise ParseFailure(f"{path}: non-numeric cell {cell!r}") from exc
            if not math.isfinite(value):
                raise NonFinite(f"{path}: cell {cell!r} is not finite")
            parsed.append(value)
        numeric.append(parsed)
    if not numeric[0]:
        raise DimensionZero(f"{path}: rows have no feature columns")
    if dataset_id is None:
        dataset_id = "csv"
    return FeatureMatrix(dataset_id, tuple(image_ids), np.array(numeric))


def write_csv(matrix: FeatureMatrix, path, include_header: bool = True) -> None:
    """Write the CSV fallback form, floats at full round-trip precision."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            if include_header:
                writer.writerow(["id"] + [f"f{j}" for j in range(matrix.q)])
            for image_id, row in zip(matrix.image_ids, matrix.values):
                writer.writerow([image_id] + [format(v, ".17g") for v in row])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
