"""Binary PGM parsing and threshold-swept F-score evaluation.

A prediction pixel counts as positive when its value is at or above the
threshold; mask pixels are positive above 0.5. The dataset-level score
picks the threshold maximizing F computed from counts aggregated over
every image, preferring the smallest threshold on ties. F is defined as
0 whenever there are no true positives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadHeader,
    DimensionMismatch,
    EmptyInput,
    IoFailure,
    ParseFailure,
    SimdistError,
    TruncatedPayload,
    UnsupportedMaxval,
)


@dataclass(frozen=True)
class PixelGrid:
    """Row-major pixel values in [0, 1]."""

    width: int
    height: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if self.width < 1 or self.height < 1:
            raise SimdistError(f"bad grid dimensions {self.width}x{self.height}")
        if values.size != self.width * self.height:
            raise DimensionMismatch(
                f"{values.size} values for {self.width}x{self.height} grid"
            )
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise SimdistError("pixel values must lie in [0, 1]")


def _next_token(blob: bytes, pos: int) -> tuple[bytes, int]:
    # skips PGM whitespace and '#' comments between header tokens
    n = len(blob)
    while pos < n:
        byte = blob[pos:pos + 1]
        if byte.isspace():
            pos += 1
        elif byte == b"#":
            while pos < n and blob[pos:pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and not blob[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise BadHeader("header ended early")
    return blob[start:pos], pos


def read_pgm(path) -> PixelGrid:
    """Read a binary (P5) PGM with maxval at most 255."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        magic, pos = _next_token(blob, 0)
        if magic != b"P5":
            raise BadHeader(f"magic {magic!r}, only binary P5 supported")
        fields = []
        for _ in range(3):
            token, pos = _next_token(blob, pos)
            if not token.isdigit():
                raise BadHeader(f"non-numeric header token {token!r}")
            fields.append(int(token))
    except BadHeader as exc:
        raise BadHeader(f"{path}: {exc}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise BadHeader(f"{path}: {width}x{height} image")
    if maxval < 1 or maxval > 255:
        raise UnsupportedMaxval(f"{path}: maxval {maxval}, need 1..255")
    # exactly one whitespace byte separates maxval from the payload
    pos += 1
    payload = blob[pos:pos + width * height]
    if len(payload) < width * height:
        raise TruncatedPayload(
            f"{path}: {len(payload)} payload bytes for {width}x{height}"
        )
    raw = np.frombuffer(payload, dtype=np.uint8)
    if raw.size and raw.max() > maxval:
        raise ParseFailure(f"{path}: pixel above declared maxval {maxval}")
    return PixelGrid(width=width, height=height, values=raw / maxval)


def write_pgm(grid: PixelGrid, path, maxval: int = 255) -> None:
    """Write values scaled to [0, maxval] as binary P5."""
    if not 1 <= maxval <= 255:
        raise UnsupportedMaxval(f"maxval {maxval}, need 1..255")
    pixels = np.rint(grid.values * maxval).astype(np.uint8)
    header = f"P5\n{grid.width} {grid.height}\n{maxval}\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class Counts:
    tp: int
    fp: int
    fn: int
    tn: int


def confusion_counts(prediction: PixelGrid, mask: PixelGrid, threshold: float) -> Counts:
    """Pixel counts with prediction >= threshold vs mask > 0.5."""
    if (prediction.width, prediction.height) != (mask.width, mask.height):
        raise DimensionMismatch(
            f"prediction {prediction.width}x{prediction.height} "
            f"vs mask {mask.width}x{mask.height}"
        )
    predicted = prediction.values >= threshold
    actual = mask.values > 0.5
    tp = int(np.count_nonzero(predicted & actual))
    fp = int(np.count_nonzero(predicted & ~actual))
    fn = int(np.count_nonzero(~predicted & actual))
    tn = prediction.values.size - tp - fp - fn
    return Counts(tp=tp, fp=fp, fn=fn, tn=tn)


def _f_score(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    if tp == 0:
        return 0.0, 0.0, 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return precision, recall, 2.0 * precision * recall / (precision + recall)


def default_thresholds() -> tuple[float, ...]:
    """The k/100 grid for k = 1..99."""
    return tuple(k / 100 for k in range(1, 100))


@dataclass(frozen=True)
class OdsResult:
    """Best single threshold over the whole dataset and its scores."""

    best_threshold: float
    precision: float
    recall: float
    f_score: float
    tp: int
    fp: int
    fn: int


def _check_pairs(predictions, masks):
    predictions = list(predictions)
    masks = list(masks)
    if len(predictions) != len(masks):
        raise DimensionMismatch(
            f"{len(predictions)} predictions vs {len(masks)} masks"
        )
    if not predictions:
        raise EmptyInput("no images to evaluate")
    for prediction, mask in zip(predictions, masks):
        if (prediction.width, prediction.height) != (mask.width, mask.height):
            raise DimensionMismatch(
                f"prediction {prediction.width}x{prediction.height} "
                f"vs mask {mask.width}x{mask.height}"
            )
    return predictions, masks


def ods(predictions, masks, thresholds=None) -> OdsResult:
    """Aggregate counts over all images per threshold; keep the best F.

    Ties go to the smallest threshold. Counting uses binary search over
    the sorted prediction values, split by mask polarity.
    """
    predictions, masks = _check_pairs(predictions, masks)
    if thresholds is None:
        thresholds = default_thresholds()
    grid = np.asarray(sorted(float(t) for t in thresholds))
    if grid.size == 0:
        raise EmptyInput("no thresholds to sweep")
    if grid[0] <= 0.0 or grid[-1] >= 1.0:
        raise SimdistError("thresholds must lie strictly inside (0, 1)")
    positive = np.sort(np.concatenate([
        p.values[m.values > 0.5] for p, m in zip(predictions, masks)
    ]))
    negative = np.sort(np.concatenate([
        p.values[m.values <= 0.5] for p, m in zip(predictions, masks)
    ]))
    # values below t, so size minus the insertion point counts values >= t
    tp = positive.size - np.searchsorted(positive, grid, side="left")
    fp = negative.size - np.searchsorted(negative, grid, side="left")
    fn = positive.size - tp
    best_index = 0
    best = (-1.0, 0.0, 0.0)
    for i in range(grid.size):
        precision, recall, f = _f_score(int(tp[i]), int(fp[i]), int(fn[i]))
        if f > best[0]:
            best = (f, precision, recall)
            best_index = i
    return OdsResult(
        best_threshold=float(grid[best_index]),
        precision=best[1],
        recall=best[2],
        f_score=max(best[0], 0.0),
        tp=int(tp[best_index]),
        fp=int(fp[best_index]),
        fn=int(fn[best_index]),
    )


def per_image_fscores(
    predictions,
    masks,
    threshold: float | None = None,
    best_per_image: bool = False,
    thresholds=None,
) -> np.ndarray:
    """F per image, by default at one shared threshold.

    With `best_per_image` each image instead reports its own maximum F
    over the grid; that mode is for sensitivity checks, not the headline
    score.
    """
    predictions, masks = _check_pairs(predictions, masks)
    out = np.empty(len(predictions))
    if best_per_image:
        for i, (prediction, mask) in enumerate(zip(predictions, masks)):
            result = ods([prediction], [mask], thresholds)
            out[i] = result.f_score
        return out
    if threshold is None:
        raise SimdistError("threshold required unless best_per_image is set")
    for i, (prediction, mask) in enumerate(zip(predictions, masks)):
        counts = confusion_counts(prediction, mask, threshold)
        out[i] = _f_score(counts.tp, counts.fp, counts.fn)[2]
    return out


def load_pair_dirs(
    prediction_dir, mask_dir
) -> tuple[tuple[str, ...], list[PixelGrid], list[PixelGrid]]:
    """Load <stem>.pgm pairs from two directories, sorted by stem."""
    prediction_dir = Path(prediction_dir)
    mask_dir = Path(mask_dir)
    pred_stems = {p.stem for p in prediction_dir.glob("*.pgm")}
    mask_stems = {p.stem for p in mask_dir.glob("*.pgm")}
    if not pred_stems:
        raise EmptyInput(f"no .pgm files in {prediction_dir}")
    if pred_stems != mask_stems:
        missing = sorted(pred_stems ^ mask_stems)
        raise ParseFailure(f"unpaired stems: {missing}")
    stems = tuple(sorted(pred_stems))
    predictions = [read_pgm(prediction_dir / f"{s}.pgm") for s in stems]
    masks = [read_pgm(mask_dir / f"{s}.pgm") for s in stems]
    return stems, predictions, masks
