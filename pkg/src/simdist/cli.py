"""Command-line surface: one subcommand per pipeline stage plus `report`.

Exit codes: 0 success, 1 typed data error (class name on stderr), 2 usage
error. Outputs are written atomically and deterministically, so repeated
runs on the same inputs produce byte-identical files regardless of the
thread count.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import analysis, distance, performance, projection, serialize, synth
from .embedding_io import (
    FeatureMatrix,
    read_csv,
    read_fvec,
    write_csv,
    write_fvec,
)
from .errors import RaggedRows, SimdistError, UsageError

ENV_THREADS = "SIMDIST_THREADS"


def _default_threads() -> int:
    raw = os.environ.get(ENV_THREADS)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{ENV_THREADS}={raw!r} is not an integer") from exc
    if value < 1:
        raise UsageError(f"{ENV_THREADS} must be >= 1, got {value}")
    return value


def _atomic_fvec(matrix: FeatureMatrix, path) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    os.close(fd)
    try:
        write_fvec(matrix, tmp)
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_matrix(path, has_header: bool, dataset_id: str | None, fmt: str | None):
    if fmt is None:
        fmt = "csv" if str(path).endswith(".csv") else "fvec"
    if fmt == "csv":
        matrix = read_csv(path, has_header=has_header, dataset_id=dataset_id)
    else:
        matrix = read_fvec(path)
    if dataset_id is not None and matrix.dataset_id != dataset_id:
        matrix = FeatureMatrix(dataset_id, matrix.image_ids, matrix.values)
    return matrix


def _thresholds(grid: int) -> tuple[float, ...]:
    if grid < 2:
        raise UsageError(f"--grid must be >= 2, got {grid}")
    return tuple(k / grid for k in range(1, grid))


def _parse_shift(text: str):
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"--shift must be a float or comma list, got {text!r}") from exc
    return values[0] if len(values) == 1 else tuple(values)


# --- subcommand handlers ---------------------------------------------------

def cmd_convert(args) -> int:
    matrix = _read_matrix(args.input, args.has_header, args.id, args.in_format)
    out_format = args.out_format
    if out_format is None:
        out_format = "csv" if str(args.out).endswith(".csv") else "fvec"
    if out_format == "csv":
        write_csv(matrix, args.out)
    else:
        _atomic_fvec(matrix, args.out)
    return 0


def cmd_project(args) -> int:
    primary = read_fvec(args.primary)
    secondary = read_fvec(args.secondary)
    result = projection.project_pair(primary, secondary, args.components)
    _atomic_fvec(
        FeatureMatrix(primary.dataset_id, primary.image_ids, result.projected_primary),
        args.out_primary,
    )
    _atomic_fvec(
        FeatureMatrix(secondary.dataset_id, secondary.image_ids, result.projected_secondary),
        args.out_secondary,
    )
    if args.out_components:
        ids = tuple(f"pc{i}" for i in range(result.z))
        _atomic_fvec(
            FeatureMatrix("components", ids, result.components.T),
            args.out_components,
        )
    if args.out_meta:
        serialize.write_json(args.out_meta, {
            "z": result.z,
            "rank": result.rank,
            "explained_variance": list(result.explained_variance),
            "mean": list(result.mean),
        })
    return 0


def cmd_distance(args) -> int:
    primary = read_fvec(args.primary)
    secondary = read_fvec(args.secondary)
    report = distance.distance_report(
        primary, secondary, args.components, args.threads, keep_matrix=False
    )
    serialize.write_json(args.out, serialize.report_payload(report))
    if args.csv:
        serialize.atomic_write_text(args.csv, serialize.report_csv(report))
    return 0


def _table_from_cells(cells) -> distance.DistanceTable:
    rows: list[str] = []
    columns: list[str] = []
    values: dict[tuple[str, str], float] = {}
    for cell in cells:
        if "=" not in cell:
            raise UsageError(f"--cell needs MODEL=report.json, got {cell!r}")
        label, path = cell.split("=", 1)
        report = serialize.load_report(path)
        if label not in rows:
            rows.append(label)
        if report.secondary_id not in columns:
            columns.append(report.secondary_id)
        key = (label, report.secondary_id)
        if key in values:
            raise UsageError(f"duplicate cell for {label}/{report.secondary_id}")
        values[key] = report.dataset_distance
    raw = np.empty((len(rows), len(columns)))
    for i, row in enumerate(rows):
        for j, column in enumerate(columns):
            if (row, column) not in values:
                raise UsageError(f"missing cell for {row}/{column}")
            raw[i, j] = values[(row, column)]
    return distance.build_table(rows, columns, raw)


def _table_from_csv(path) -> distance.DistanceTable:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        grid = [row for row in csv.reader(fh) if row]
    if len(grid) < 2 or len(grid[0]) < 2:
        raise UsageError(f"{path}: need a header row and at least one data row")
    columns = grid[0][1:]
    labels = []
    raw = []
    for row in grid[1:]:
        if len(row) != len(grid[0]):
            raise RaggedRows(f"{path}: row widths differ")
        labels.append(row[0])
        raw.append([float(cell) for cell in row[1:]])
    return distance.build_table(labels, columns, np.array(raw))


def cmd_table(args) -> int:
    if bool(args.cell) == bool(args.raw):
        raise UsageError("pass exactly one of --cell or --raw")
    table = _table_from_cells(args.cell) if args.cell else _table_from_csv(args.raw)
    serialize.write_json(args.out, serialize.table_payload(table))
    if args.csv:
        serialize.atomic_write_text(args.csv, serialize.table_csv(table))
    return 0


def cmd_sweep(args) -> int:
    primary = read_fvec(args.primary)
    secondary = read_fvec(args.secondary)
    result = distance.pc_sweep(primary, secondary, args.components, args.threads)
    serialize.write_json(args.out, serialize.sweep_payload(result))
    return 0


def _load_scores(path) -> dict[str, float]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or len(rows[0]) < 2:
        raise UsageError(f"{path}: need header and two columns (image_id, score)")
    return {row[0]: float(row[1]) for row in rows[1:]}


def cmd_splits(args) -> int:
    if args.parts not in (2, 3) and not args.allow_any_k:
        raise UsageError(
            f"--parts {args.parts} is unusual; pass --allow-any-k to override"
        )
    report = serialize.load_report(args.report)
    order = analysis.sort_by_distance(report)
    sorted_distances = report.image_distances[order]
    sorted_ids = [report.image_ids[i] for i in order]
    per_image = None
    if args.scores:
        lookup = _load_scores(args.scores)
        missing = [i for i in sorted_ids if i not in lookup]
        if missing:
            raise UsageError(f"{args.scores}: no score for {missing[:3]}")
        per_image = np.array([lookup[i] for i in sorted_ids])
    result = analysis.split_stats(
        sorted_distances,
        per_image_scores=per_image,
        k=args.parts,
        scale=not args.no_scale,
        allow_any_k=args.allow_any_k,
    )
    payload = serialize.split_payload(result)
    payload["image_order"] = sorted_ids
    serialize.write_json(args.out, payload)
    return 0


def cmd_ods(args) -> int:
    stems, predictions, masks = performance.load_pair_dirs(args.pred_dir, args.gt_dir)
    result = performance.ods(predictions, masks, _thresholds(args.grid))
    serialize.write_json(args.out, serialize.ods_payload(result))
    if args.per_image:
        scores = performance.per_image_fscores(
            predictions, masks, result.best_threshold
        )
        lines = ["image_id,f_score"]
        lines += [
            f"{stem},{serialize.float_repr(score)}"
            for stem, score in zip(stems, scores)
        ]
        serialize.atomic_write_text(args.per_image, "\n".join(lines) + "\n")
    return 0


def _curve_payload(report, stems, predictions, masks, args) -> dict:
    order = analysis.sort_by_distance(report)
    sorted_ids = [report.image_ids[i] for i in order]
    index = {stem: i for i, stem in enumerate(stems)}
    missing = [i for i in sorted_ids if i not in index]
    if missing:
        raise UsageError(f"no prediction/mask pair for {missing[:3]}")
    sorted_predictions = [predictions[index[i]] for i in sorted_ids]
    sorted_masks = [masks[index[i]] for i in sorted_ids]
    thresholds = _thresholds(args.grid)
    overall = performance.ods(sorted_predictions, sorted_masks, thresholds)
    if args.best_per_image:
        scores = performance.per_image_fscores(
            sorted_predictions, sorted_masks,
            best_per_image=True, thresholds=thresholds,
        )
    else:
        scores = performance.per_image_fscores(
            sorted_predictions, sorted_masks, overall.best_threshold
        )
    scaled = analysis.min_max_scale(report.image_distances[order])
    window = args.window if args.window else max(1, len(sorted_ids) // 10)
    smoothed = analysis.moving_average(scores, window)
    return {
        "image_id": sorted_ids,
        "scaled_distance": [float(v) for v in scaled.values],
        "f_score": [float(v) for v in scores],
        "smoothed_f": [float(v) for v in smoothed],
        "window": window,
        "best_threshold": overall.best_threshold,
        "per_image_best": bool(args.best_per_image),
    }


def cmd_curves(args) -> int:
    report = serialize.load_report(args.report)
    stems, predictions, masks = performance.load_pair_dirs(args.pred_dir, args.gt_dir)
    serialize.write_json(
        args.out, _curve_payload(report, stems, predictions, masks, args)
    )
    return 0


def cmd_select(args) -> int:
    low, high = args.band
    if not 0.0 <= low < high <= 1.0:
        raise UsageError(f"--band must satisfy 0 <= low < high <= 1, got {low} {high}")
    report = serialize.load_report(args.report)
    scaled = analysis.min_max_scale(report.image_distances)
    picks = analysis.select_for_adaptation(
        scaled, args.count, low, high, args.seed
    )
    serialize.write_json(args.out, {
        "primary_id": report.primary_id,
        "secondary_id": report.secondary_id,
        "band": [low, high],
        "seed": args.seed,
        "count": args.count,
        "selected": [
            {"image_id": report.image_ids[i], "scaled_distance": float(scaled.values[i])}
            for i in picks
        ],
    })
    return 0


def cmd_rank(args) -> int:
    reports = [serialize.load_report(path) for path in args.reports]
    ranking = distance.rank_datasets(reports)
    payload = serialize.ranking_payload(ranking)
    if args.top:
        payload["closest"] = list(ranking.closest(args.top))
        payload["farthest"] = list(ranking.farthest(args.top))
    serialize.write_json(args.out, payload)
    return 0


def cmd_synth(args) -> int:
    spec = synth.SynthSpec(
        n=args.n,
        q=args.q,
        kind=args.kind,
        shift=_parse_shift(args.shift),
        rank=args.rank,
        noise=args.noise,
        seed=args.seed,
    )
    _atomic_fvec(synth.generate(spec, args.id), args.out)
    return 0


def cmd_report(args) -> int:
    primary = read_fvec(args.primary)
    secondaries = [read_fvec(path) for path in args.secondary]
    have_maps = bool(args.pred_dir) and bool(args.gt_dir)
    if bool(args.pred_dir) != bool(args.gt_dir):
        raise UsageError("--pred-dir and --gt-dir go together")
    if have_maps:
        stems, predictions, masks = performance.load_pair_dirs(
            args.pred_dir, args.gt_dir
        )
        index = {stem: i for i, stem in enumerate(stems)}
    reports = []
    sections = []
    for secondary in secondaries:
        rep = distance.distance_report(
            primary, secondary, args.components, args.threads, keep_matrix=False
        )
        reports.append(rep)
        section = serialize.report_payload(rep)
        order = analysis.sort_by_distance(rep)
        sorted_ids = [rep.image_ids[i] for i in order]
        sorted_distances = rep.image_distances[order]
        part_scores = None
        if have_maps:
            missing = [i for i in sorted_ids if i not in index]
            if missing:
                raise UsageError(f"no prediction/mask pair for {missing[:3]}")
            sorted_predictions = [predictions[index[i]] for i in sorted_ids]
            sorted_masks = [masks[index[i]] for i in sorted_ids]
            thresholds = _thresholds(args.grid)
            overall = performance.ods(sorted_predictions, sorted_masks, thresholds)
            scores = performance.per_image_fscores(
                sorted_predictions, sorted_masks, overall.best_threshold
            )
            m = len(sorted_ids)
            bounds = [i * m // args.parts for i in range(args.parts + 1)]
            part_scores = [
                performance.ods(
                    sorted_predictions[lo:hi], sorted_masks[lo:hi], thresholds
                ).f_score
                for lo, hi in zip(bounds, bounds[1:])
            ]
            section["ods"] = serialize.ods_payload(overall)
            section["per_image_f"] = [
                {"image_id": image_id, "f_score": float(score)}
                for image_id, score in zip(sorted_ids, scores)
            ]
            section["curve"] = _curve_payload(
                rep, stems, predictions, masks, args
            )
        splits = analysis.split_stats(
            sorted_distances,
            k=args.parts,
            scale=True,
            part_scores=part_scores,
        )
        split_section = serialize.split_payload(splits)
        split_section["image_order"] = sorted_ids
        section["splits"] = split_section
        section["distribution"] = serialize.summary_payload(
            analysis.distribution_summary(rep)
        )
        sections.append(section)
    serialize.write_json(args.out, {
        "primary_id": primary.dataset_id,
        "z": args.components,
        "parts": args.parts,
        "secondaries": sections,
        "ranking": serialize.ranking_payload(distance.rank_datasets(reports)),
    })
    return 0


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simdist",
        description="Dataset similarity from feature vectors: projection, "
        "distances, split statistics, ODS scoring, and selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("convert", cmd_convert, "convert between FVEC1 and CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--in-format", choices=["fvec", "csv"])
    p.add_argument("--out-format", choices=["fvec", "csv"])
    p.add_argument("--has-header", action="store_true",
                   help="CSV input starts with a header row")
    p.add_argument("--id", help="dataset id to stamp on the output")

    p = add("project", cmd_project, "jointly project two matrices to z components")
    p.add_argument("--primary", required=True)
    p.add_argument("--secondary", required=True)
    p.add_argument("--components", "-z", type=int, default=projection.DEFAULT_COMPONENTS)
    p.add_argument("--out-primary", required=True)
    p.add_argument("--out-secondary", required=True)
    p.add_argument("--out-components")
    p.add_argument("--out-meta")

    p = add("distance", cmd_distance, "distance report for one secondary")
    p.add_argument("--primary", required=True)
    p.add_argument("--secondary", required=True)
    p.add_argument("--components", "-z", type=int, default=projection.DEFAULT_COMPONENTS)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write per-image distances as CSV")

    p = add("table", cmd_table, "row-normalized cross-dataset table")
    p.add_argument("--cell", action="append", default=[],
                   metavar="MODEL=REPORT.json")
    p.add_argument("--raw", help="CSV of raw scores, row labels in column 1")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write the normalized table as CSV")

    p = add("sweep", cmd_sweep, "dataset distance across component counts")
    p.add_argument("--primary", required=True)
    p.add_argument("--secondary", required=True)
    p.add_argument("--components", "-z", type=int, nargs="+", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)

    p = add("splits", cmd_splits, "distance-sorted split statistics")
    p.add_argument("--report", required=True, help="distance report JSON")
    p.add_argument("--parts", "-k", type=int, default=2)
    p.add_argument("--no-scale", action="store_true",
                   help="skip min-max scaling before the statistics")
    p.add_argument("--allow-any-k", action="store_true")
    p.add_argument("--scores", help="CSV of per-image scores to average per part")
    p.add_argument("--out", required=True)

    p = add("ods", cmd_ods, "best single threshold over a prediction set")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--grid", type=int, default=100,
                   help="thresholds k/GRID for k in 1..GRID-1")
    p.add_argument("--out", required=True)
    p.add_argument("--per-image", help="also write per-image F-scores as CSV")

    p = add("curves", cmd_curves, "scaled distance vs smoothed F-score series")
    p.add_argument("--report", required=True)
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--best-per-image", action="store_true",
                   help="per-image best threshold instead of the shared one")
    p.add_argument("--out", required=True)

    p = add("select", cmd_select, "pick adaptation candidates in a scaled band")
    p.add_argument("--report", required=True)
    p.add_argument("--count", "-q", type=int, required=True)
    p.add_argument("--band", type=float, nargs=2,
                   default=[analysis.SELECTION_LOW, analysis.SELECTION_HIGH])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = add("rank", cmd_rank, "order secondaries by dataset distance")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--top", type=int, default=None,
                   help="also list the closest/farthest TOP ids")
    p.add_argument("--out", required=True)

    p = add("synth", cmd_synth, "write a seeded synthetic FVEC1 matrix")
    p.add_argument("--kind", choices=list(synth.KINDS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--shift", default="0",
                   help="scalar or comma-separated q-vector")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--id", help="dataset id for the output")
    p.add_argument("--out", required=True)

    p = add("report", cmd_report, "full pipeline bundle for one primary")
    p.add_argument("--primary", required=True)
    p.add_argument("--secondary", nargs="+", required=True)
    p.add_argument("--pred-dir")
    p.add_argument("--gt-dir")
    p.add_argument("--components", "-z", type=int, default=projection.DEFAULT_COMPONENTS)
    p.add_argument("--parts", "-k", type=int, default=2)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--best-per-image", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", None) is None and hasattr(args, "threads"):
            args.threads = _default_threads()
        return args.handler(args)
    except UsageError as exc:
        print(f"UsageError: {exc}", file=sys.stderr)
        return 2
    except SimdistError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
