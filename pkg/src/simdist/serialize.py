"""Byte-stable JSON and CSV emission plus atomic file writes.

Floats print with 17 significant digits so values survive a round trip
bit-for-bit; keys keep their insertion order. Rerunning a command on the
same inputs therefore rewrites byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .analysis import DistributionSummary, ScaledSeries, SplitPart, SplitReport
from .distance import DistanceReport, DistanceTable, PcSweep, Ranking
from .errors import IoFailure, NonFinite, ParseFailure
from .performance import OdsResult


def float_repr(value) -> str:
    value = float(value)
    if not math.isfinite(value):
        raise NonFinite(f"cannot serialize {value}")
    return format(value, ".17g")


def _emit(obj, out: list[str], level: int) -> None:
    pad = "  " * level
    inner = "  " * (level + 1)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(float_repr(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for index, (key, value) in enumerate(obj.items()):
            out.append(f"{inner}{json.dumps(str(key), ensure_ascii=False)}: ")
            _emit(value, out, level + 1)
            out.append(",\n" if index < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for index, value in enumerate(items):
            out.append(inner)
            _emit(value, out, level + 1)
            out.append(",\n" if index < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise ParseFailure(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Deterministic pretty JSON with a trailing newline."""
    out: list[str] = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


def atomic_write_text(path, text: str) -> None:
    """Write via a sibling temp file and rename, so failures leave nothing."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(
            dir=path.parent or Path("."), prefix=f".{path.name}."
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            # mkstemp files are 0600; restore the usual umask-derived mode
            mask = os.umask(0)
            os.umask(mask)
            os.chmod(tmp, 0o666 & ~mask)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_json(path, obj) -> None:
    atomic_write_text(path, canonical_json(obj))


# --- payload schemas -------------------------------------------------------

def report_payload(report: DistanceReport) -> dict:
    payload = {
        "primary_id": report.primary_id,
        "secondary_id": report.secondary_id,
    }
    if report.n_primary is not None:
        payload["n_primary"] = report.n_primary
    payload["o_dist"] = report.dataset_distance
    payload["i_dist"] = [
        {"image_id": image_id, "value": float(value)}
        for image_id, value in zip(report.image_ids, report.image_distances)
    ]
    return payload


def parse_report(payload: dict) -> DistanceReport:
    """Rebuild a report (without its matrix) from report_payload output."""
    try:
        entries = payload["i_dist"]
        return DistanceReport(
            primary_id=payload["primary_id"],
            secondary_id=payload["secondary_id"],
            image_ids=tuple(entry["image_id"] for entry in entries),
            image_distances=np.array(
                [float(entry["value"]) for entry in entries]
            ),
            dataset_distance=float(payload["o_dist"]),
            n_primary=payload.get("n_primary"),
        )
    except (KeyError, TypeError) as exc:
        raise ParseFailure(f"malformed distance report: {exc}") from exc


def load_report(path) -> DistanceReport:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"{path}: {exc}") from exc
    return parse_report(payload)


def report_csv(report: DistanceReport) -> str:
    lines = ["image_id,i_dist"]
    for image_id, value in zip(report.image_ids, report.image_distances):
        lines.append(f"{image_id},{float_repr(value)}")
    return "\n".join(lines) + "\n"


def table_payload(table: DistanceTable) -> dict:
    return {
        "row_labels": list(table.row_labels),
        "column_labels": list(table.column_labels),
        "raw": [list(map(float, row)) for row in table.raw],
        "normalized": [list(map(float, row)) for row in table.normalized],
        "zero_rows": list(table.zero_rows),
    }


def table_csv(table: DistanceTable, which: str = "normalized") -> str:
    grid = getattr(table, which)
    lines = ["," + ",".join(table.column_labels)]
    for label, row in zip(table.row_labels, grid):
        lines.append(label + "," + ",".join(float_repr(v) for v in row))
    return "\n".join(lines) + "\n"


def sweep_payload(sweep: PcSweep) -> dict:
    return {
        "z_values": list(sweep.z_values),
        "o_dist": list(sweep.o_dist),
        "deltas": list(sweep.deltas),
    }


def _part_payload(part: SplitPart) -> dict:
    return {
        "start": part.start,
        "stop": part.stop,
        "mean": part.mean,
        "std": part.std,
        "f_score": part.f_score,
    }


def split_payload(report: SplitReport) -> dict:
    return {
        "k": report.k,
        "scaled": report.scaled,
        "parts": [_part_payload(part) for part in report.parts],
    }


def ods_payload(result: OdsResult) -> dict:
    return {
        "best_threshold": result.best_threshold,
        "precision": result.precision,
        "recall": result.recall,
        "f_score": result.f_score,
        "tp": result.tp,
        "fp": result.fp,
        "fn": result.fn,
    }


def ranking_payload(ranking: Ranking) -> dict:
    return {
        "primary_id": ranking.primary_id,
        "order": [
            {"secondary_id": label, "o_dist": value}
            for label, value in ranking.order
        ],
    }


def scaled_payload(series: ScaledSeries) -> dict:
    return {
        "values": [float(v) for v in series.values],
        "degenerate": series.degenerate,
        "source_min": series.source_min,
        "source_max": series.source_max,
    }


def summary_payload(summary: DistributionSummary) -> dict:
    return {
        "min": summary.minimum,
        "q1": summary.q1,
        "median": summary.median,
        "q3": summary.q3,
        "max": summary.maximum,
        "mean": summary.mean,
        "std": summary.std,
        "values": [float(v) for v in summary.values],
    }
