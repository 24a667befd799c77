"""Acceptance gate: one test per release criterion, each timed and printed.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion. Tolerances are pinned here and must not be loosened without a
recorded decision.
"""

import subprocess
import sys
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from support import FIXTURES, grid_from
from oracles import (
    mean_oracle,
    ods_oracle,
    pairwise_oracle,
    pca_oracle,
    row_sums_oracle,
)
from simdist.analysis import min_max_scale, select_for_adaptation, split_stats
from simdist.distance import (
    DistanceReport,
    build_table,
    dataset_distance,
    distance_report,
    image_distances,
    pairwise,
    pc_sweep,
    rank_datasets,
)
from simdist.embedding_io import FeatureMatrix
from simdist.errors import InsufficientCandidates
from simdist.performance import default_thresholds, ods
from simdist.projection import center_concat, fit_pca, project_pair
from simdist.rng import uniforms
from simdist.synth import SynthSpec, generate

UNETPP_ROW = (0.056, 0.069, 0.063, 0.054, 0.465, 0.293)
SECONDARY_LABELS = ("S1", "S2", "S3", "S4", "S5", "S6")


@contextmanager
def criterion(name: str, budget_seconds: float):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.perf_counter() - started
    if elapsed > budget_seconds:
        print(f"ACCEPTANCE {name}: FAIL (took {elapsed:.2f}s > {budget_seconds}s)")
        pytest.fail(f"{name} exceeded its {budget_seconds}s budget: {elapsed:.2f}s")
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s)")


def column_sign_match(actual, expected, tol):
    for column in range(actual.shape[1]):
        direct = np.abs(actual[:, column] - expected[:, column]).max()
        flipped = np.abs(actual[:, column] + expected[:, column]).max()
        if min(direct, flipped) > tol:
            return False
    return True


def test_pca_oracle_equivalence():
    with criterion("pca-oracle-equivalence", 5.0):
        rng = np.random.default_rng(1001)
        for _ in range(50):
            rows = int(rng.integers(2, 21))
            cols = int(rng.integers(1, 11))
            z = int(rng.integers(1, min(rows, cols) + 1))
            centered = rng.normal(size=(rows, cols))
            centered -= centered.mean(axis=0)
            result = fit_pca(centered, z)
            expected, _ = pca_oracle(centered, z)
            assert column_sign_match(result.projected_primary, expected, 1e-8)


def test_full_rank_isometry():
    with criterion("full-rank-isometry", 5.0):
        rng = np.random.default_rng(1002)
        for _ in range(25):
            n = int(rng.integers(2, 12))
            m = int(rng.integers(1, 10))
            q = int(rng.integers(2, 9))
            primary = FeatureMatrix(
                "P", tuple(f"p{i}" for i in range(n)), rng.normal(size=(n, q))
            )
            secondary = FeatureMatrix(
                "S", tuple(f"s{i}" for i in range(m)), rng.normal(size=(m, q))
            )
            z = min(n + m, q)
            centered, _ = center_concat(primary, secondary)
            result = project_pair(primary, secondary, z)
            projected = np.vstack(
                [result.projected_primary, result.projected_secondary]
            )
            before = pairwise(centered, centered)
            after = pairwise(projected, projected)
            scale = max(float(before.max()), 1.0)
            assert np.abs(before - after).max() <= 1e-9 * scale


def test_distance_oracle():
    with criterion("distance-oracle", 5.0):
        rng = np.random.default_rng(1003)
        for _ in range(5):
            m = int(rng.integers(1, 51))
            n = int(rng.integers(1, 51))
            z = int(rng.integers(1, 31))
            secondary = rng.normal(size=(m, z))
            primary = rng.normal(size=(n, z))
            matrix = pairwise(secondary, primary)
            expected = pairwise_oracle(secondary, primary)
            assert np.abs(matrix - expected).max() <= 1e-9
            sums = image_distances(matrix)
            assert np.abs(sums - row_sums_oracle(expected)).max() <= 1e-9 * max(
                1.0, float(np.abs(sums).max())
            )
            overall = dataset_distance(sums)
            assert abs(overall - mean_oracle(row_sums_oracle(expected))) <= 1e-9
            assert overall == float(np.mean(sums))


def distance_report_like(label, values):
    return DistanceReport(
        primary_id="P",
        secondary_id=label,
        image_ids=tuple(f"img{i}" for i in range(values.size)),
        image_distances=values,
        dataset_distance=float(np.mean(values)),
    )


def test_table_semantics():
    with criterion("table-2-semantics", 1.0):
        rng = np.random.default_rng(1004)
        raw = rng.uniform(0.01, 2.0, size=(5, 6))
        table = build_table(
            tuple(f"model{i}" for i in range(5)), SECONDARY_LABELS, raw
        )
        assert np.abs(table.normalized.sum(axis=1) - 1.0).max() <= 1e-12

        reports = [
            distance_report_like(label, np.array([value]))
            for label, value in zip(SECONDARY_LABELS, UNETPP_ROW)
        ]
        ranking = rank_datasets(reports)
        assert set(ranking.farthest(2)) == {"S5", "S6"}


def test_stabilization_on_low_rank_data():
    with criterion("pc-sweep-stabilization", 10.0):
        rank = 10
        joint = generate(
            SynthSpec(n=120, q=60, kind="low-rank", rank=rank, seed=77)
        )
        primary = FeatureMatrix("P", joint.image_ids[:60], joint.values[:60])
        secondary = FeatureMatrix(
            "S",
            tuple(f"s{i}" for i in range(60)),
            joint.values[60:],
        )
        z_values = [5, 10, 15, 20, 25]
        sweep = pc_sweep(primary, secondary, z_values)
        at_rank = sweep.o_dist[1]
        for z, value in zip(z_values, sweep.o_dist):
            if z >= rank:
                assert abs(value - at_rank) <= 1e-9 * max(at_rank, 1.0)
        after_rank = sweep.deltas[1:]
        for earlier, later in zip(after_rank, after_rank[1:]):
            assert later <= earlier + 1e-12


def test_shift_ordering():
    with criterion("shift-ordering", 30.0):
        wins = 0
        for seed in range(100):
            primary = generate(
                SynthSpec(n=100, q=50, kind="gaussian-shifted", seed=3 * seed),
                "P",
            )
            near = generate(
                SynthSpec(
                    n=100, q=50, kind="gaussian-shifted", shift=0.5,
                    seed=3 * seed + 1,
                ),
                "near",
            )
            far = generate(
                SynthSpec(
                    n=100, q=50, kind="gaussian-shifted", shift=5.0,
                    seed=3 * seed + 2,
                ),
                "far",
            )
            near_distance = distance_report(
                primary, near, z=25, keep_matrix=False
            ).dataset_distance
            far_distance = distance_report(
                primary, far, z=25, keep_matrix=False
            ).dataset_distance
            wins += far_distance > near_distance
        assert wins >= 99


def test_split_statistics():
    with criterion("split-statistics", 1.0):
        report = split_stats([1.0, 2.0, 3.0, 4.0], k=2, scale=False)
        assert [p.mean for p in report.parts] == [1.5, 3.5]
        assert [p.std for p in report.parts] == [0.5, 0.5]

        rng = np.random.default_rng(1005)
        for _ in range(100):
            size = int(rng.integers(3, 60))
            values = np.sort(rng.uniform(-10.0, 10.0, size=size))
            for k in (2, 3):
                if size < k:
                    continue
                result = split_stats(values, k=k)
                means = [p.mean for p in result.parts]
                assert all(a <= b + 1e-12 for a, b in zip(means, means[1:]))


def test_ods_oracle_equivalence():
    with criterion("ods-oracle", 5.0):
        worked = ods(
            [grid_from([[0.2, 0.8], [0.6, 0.4]])],
            [grid_from([[0.0, 1.0], [1.0, 0.0]])],
        )
        assert worked.best_threshold == 0.41
        assert worked.f_score == 1.0

        rng = np.random.default_rng(1006)
        grid = default_thresholds()
        for _ in range(20):
            count = int(rng.integers(1, 6))
            shape = (int(rng.integers(1, 9)), int(rng.integers(1, 9)))
            predictions = [rng.uniform(size=shape) for _ in range(count)]
            masks = [
                (rng.uniform(size=shape) > 0.6).astype(float)
                for _ in range(count)
            ]
            result = ods(
                [grid_from(p) for p in predictions],
                [grid_from(m) for m in masks],
                grid,
            )
            threshold, f, tp, fp, fn = ods_oracle(predictions, masks, grid)
            assert result.best_threshold == threshold
            assert abs(result.f_score - f) <= 1e-12
            assert (result.tp, result.fp, result.fn) == (tp, fp, fn)


def test_selection_contract():
    with criterion("selection-contract", 1.0):
        for trial in range(100):
            values = uniforms(5000 + trial, 30)
            series = min_max_scale(values)
            in_band = [
                i for i, v in enumerate(series.values) if 0.6 <= v <= 1.0
            ]
            if len(in_band) >= 3:
                first = select_for_adaptation(series, 3, seed=trial)
                second = select_for_adaptation(series, 3, seed=trial)
                assert first == second
                for index in first:
                    assert 0.6 <= series.values[index] <= 1.0
            with pytest.raises(InsufficientCandidates) as excinfo:
                select_for_adaptation(series, len(in_band) + 1, seed=trial)
            assert excinfo.value.candidates == len(in_band)


def test_cli_golden_report():
    with criterion("cli-golden-report", 10.0):
        golden = (FIXTURES / "golden_report.json").read_bytes()
        with tempfile.TemporaryDirectory() as tmp:
            for threads in ("1", "4", "8"):
                out = Path(tmp) / f"report{threads}.json"
                completed = subprocess.run(
                    [
                        sys.executable, "-m", "simdist", "report",
                        "--primary", str(FIXTURES / "primary.fv"),
                        "--secondary", str(FIXTURES / "secondary.fv"),
                        "--pred-dir", str(FIXTURES / "preds"),
                        "--gt-dir", str(FIXTURES / "masks"),
                        "--components", "10",
                        "--parts", "2",
                        "--threads", threads,
                        "--out", str(out),
                    ],
                    capture_output=True,
                    text=True,
                )
                assert completed.returncode == 0, completed.stderr
                assert out.read_bytes() == golden, f"threads={threads}"
            rerun = Path(tmp) / "rerun.json"
            completed = subprocess.run(
                [
                    sys.executable, "-m", "simdist", "report",
                    "--primary", str(FIXTURES / "primary.fv"),
                    "--secondary", str(FIXTURES / "secondary.fv"),
                    "--pred-dir", str(FIXTURES / "preds"),
                    "--gt-dir", str(FIXTURES / "masks"),
                    "--components", "10",
                    "--parts", "2",
                    "--threads", "1",
                    "--out", str(rerun),
                ],
                capture_output=True,
                text=True,
            )
            assert completed.returncode == 0, completed.stderr
            assert rerun.read_bytes() == golden
