import json
import os

from src.experiment import VarianceReport
from src.report import CSV_COLUMNS, RunManifest, append_csv, csv_row, render_svg, write_json, write_manifest


def _report(**overrides):
    fields = dict(
        n=5, d=2, D=2, loss="fidelity", mode="haar_split", delta=None,
        mean_grad=-1.5e-4, var_grad=0.0125, std_error=3e-4, mean_std_error=1e-4,
        samples_used=20000, converged=True, directions=1,
        tail_fractions={0.05: 0.25, 0.01: 0.75}, bound_value=0.025,
    )
    fields.update(overrides)
    return VarianceReport(**fields)


def test_csv_row_formatting():
    row = csv_row("abc123", _report())
    assert len(row) == len(CSV_COLUMNS)
    assert row[6] == ""
    assert row[8] == "0.0125"
    assert row[11] == "true"
    assert row[12] == "0.025"


def test_append_csv_writes_header_once(tmp_path):
    path = str(tmp_path / "results.csv")
    append_csv(path, [csv_row("a", _report())])
    append_csv(path, [csv_row("b", _report(converged=False))])
    lines = open(path).read().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert lines[2].split(",")[11] == "false"


def test_report_json_excludes_timing():
    report = _report(wall_time=12.5)
    payload = report.to_dict()
    assert "wall_time" not in payload
    assert list(payload["tail_fractions"]) == ["0.01", "0.05"]
    assert report.to_dict(include_timing=True)["wall_time"] == 12.5


def test_manifest_written_under_run_id(tmp_path):
    manifest = RunManifest("0123456789ab", "run", {"n": 5}, "0123456789ab" + "0" * 52, "2024-01-01 00:00:00")
    path = write_manifest(str(tmp_path), manifest)
    assert os.path.basename(path) == "0123456789ab.manifest.json"
    stored = json.load(open(path))
    assert stored["command"] == "run"
    assert stored["finished_at"] is None


def test_write_json_is_sorted(tmp_path):
    path = write_json(str(tmp_path / "x.json"), {"b": 1, "a": 2})
    assert open(path).read() == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_svg_is_deterministic():
    xs = [5, 6, 7, 8]
    ys = [0.02, 0.01, 0.004, 0.0021]
    bound = [0.025, 0.0125, 0.00625, 0.003125]
    first = render_svg(xs, ys, [1e-3] * 4, title="fidelity", bound=bound)
    second = render_svg(xs, ys, [1e-3] * 4, title="fidelity", bound=bound)
    assert first == second
    assert first.startswith("<svg")
    assert "polyline" in first
    assert "1e-3" in first


def test_svg_skips_non_positive_points():
    svg = render_svg([1, 2, 3], [0.1, 0.0, 0.01])
    assert svg.count("<circle") == 2
