import json

import numpy as np
import pytest

from simdist.analysis import distribution_summary, min_max_scale, split_stats
from simdist.distance import (
    DistanceReport,
    PcSweep,
    Ranking,
    build_table,
)
from simdist.errors import IoFailure, NonFinite, ParseFailure
from simdist.performance import OdsResult
from simdist.serialize import (
    atomic_write_text,
    canonical_json,
    float_repr,
    load_report,
    ods_payload,
    parse_report,
    ranking_payload,
    report_csv,
    report_payload,
    scaled_payload,
    split_payload,
    summary_payload,
    sweep_payload,
    table_csv,
    table_payload,
    write_json,
)


def sample_report():
    values = np.array([0.1, 2.5, 1.0 / 3.0])
    return DistanceReport(
        primary_id="P",
        secondary_id="S",
        image_ids=("a", "b", "c"),
        image_distances=values,
        dataset_distance=float(np.mean(values)),
        n_primary=7,
    )


class TestFloatRepr:
    def test_seventeen_digits_round_trip(self):
        for value in (0.1, 1.0 / 3.0, np.pi, 1e-300, 123456789.123456789):
            assert float(float_repr(value)) == value

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFinite):
            float_repr(float("inf"))


class TestCanonicalJson:
    def test_repeatable_bytes(self):
        payload = {"b": [1, 2.5], "a": {"x": None, "y": True}}
        assert canonical_json(payload) == canonical_json(payload)

    def test_parses_as_json(self):
        payload = {"values": [0.1, 2, None, False], "name": "x"}
        assert json.loads(canonical_json(payload)) == payload

    def test_preserves_insertion_order(self):
        text = canonical_json({"z": 1, "a": 2})
        assert text.index('"z"') < text.index('"a"')

    def test_numpy_scalars_accepted(self):
        text = canonical_json({"v": np.float64(0.5), "n": np.int64(3)})
        assert json.loads(text) == {"v": 0.5, "n": 3}

    def test_unknown_type_rejected(self):
        with pytest.raises(ParseFailure):
            canonical_json({"v": object()})

    def test_ends_with_newline(self):
        assert canonical_json([]).endswith("\n")


class TestAtomicWrite:
    def test_writes_text(self, tmp_path):
        path = tmp_path / "out.json"
        atomic_write_text(path, "hello\n")
        assert path.read_text() == "hello\n"

    def test_overwrites_atomically(self, tmp_path):
        path = tmp_path / "out.json"
        path.write_text("old")
        atomic_write_text(path, "new")
        assert path.read_text() == "new"
        assert list(tmp_path.iterdir()) == [path]

    def test_missing_directory_is_io_failure(self, tmp_path):
        with pytest.raises(IoFailure):
            atomic_write_text(tmp_path / "missing" / "out.json", "x")


class TestReportPayload:
    def test_schema_keys(self):
        payload = report_payload(sample_report())
        assert list(payload) == ["primary_id", "secondary_id", "n_primary", "o_dist", "i_dist"]
        assert payload["i_dist"][0] == {"image_id": "a", "value": 0.1}

    def test_round_trip_preserves_values(self):
        report = sample_report()
        restored = parse_report(json.loads(canonical_json(report_payload(report))))
        assert restored.image_ids == report.image_ids
        assert np.array_equal(restored.image_distances, report.image_distances)
        assert restored.dataset_distance == report.dataset_distance
        assert restored.n_primary == 7
        assert restored.matrix is None

    def test_load_report_from_file(self, tmp_path):
        report = sample_report()
        path = tmp_path / "r.json"
        write_json(path, report_payload(report))
        assert load_report(path).dataset_distance == report.dataset_distance

    def test_malformed_payload_rejected(self):
        with pytest.raises(ParseFailure):
            parse_report({"primary_id": "P"})

    def test_csv_form(self):
        text = report_csv(sample_report())
        lines = text.strip().split("\n")
        assert lines[0] == "image_id,i_dist"
        assert lines[1].startswith("a,0.1")


class TestOtherPayloads:
    def test_table(self):
        table = build_table(("m",), ("a", "b"), np.array([[1.0, 3.0]]))
        payload = table_payload(table)
        assert payload["normalized"] == [[0.25, 0.75]]
        assert payload["zero_rows"] == [False]
        csv_text = table_csv(table)
        assert csv_text.startswith(",a,b\n")

    def test_sweep(self):
        payload = sweep_payload(PcSweep((1, 2), (0.5, 0.25), (0.25,)))
        assert payload == {"z_values": [1, 2], "o_dist": [0.5, 0.25], "deltas": [0.25]}

    def test_split(self):
        payload = split_payload(split_stats([1.0, 2.0, 3.0, 4.0], k=2, scale=False))
        assert payload["k"] == 2
        assert payload["parts"][0]["mean"] == 1.5
        assert payload["parts"][0]["f_score"] is None

    def test_ods(self):
        payload = ods_payload(OdsResult(0.41, 1.0, 1.0, 1.0, 2, 0, 0))
        assert payload["best_threshold"] == 0.41
        assert payload["tp"] == 2

    def test_ranking(self):
        payload = ranking_payload(Ranking("P", (("S2", 0.1), ("S1", 0.9))))
        assert payload["order"][0] == {"secondary_id": "S2", "o_dist": 0.1}

    def test_scaled(self):
        payload = scaled_payload(min_max_scale([1.0, 3.0]))
        assert payload["values"] == [0.0, 1.0]
        assert payload["degenerate"] is False

    def test_summary(self):
        payload = summary_payload(distribution_summary(sample_report()))
        assert list(payload) == [
            "min", "q1", "median", "q3", "max", "mean", "std", "values",
        ]
