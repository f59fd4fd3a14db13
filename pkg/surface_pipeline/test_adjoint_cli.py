import importlib
import json

import pytest

import adjoint_cli
import verify_examples
from adjoint_cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, main, parse_args
from utils import config_utils

RECTANGLE = '{"vertices": [[0, 0], [5, 0], [5, 3], [0, 3]]}'
TRIANGLE = '{"vertices": [[0, 0], [6, 0], [0, 6]]}'
QUADRIC_25 = '{"model": "quadric", "D": [2, 5]}'


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_polygon_level(capsys):
    code, report = run_json(capsys, ["level", "--polygon", RECTANGLE])
    assert code == EXIT_OK
    assert report == {"level": "3/2", "keel": "2"}


def test_polygon_keel_reports_optimal_face(capsys):
    code, report = run_json(capsys, ["keel", "--polygon", RECTANGLE])
    assert code == EXIT_OK
    assert report["keel"] == "2"
    assert report["optimal_face"] == [["3/2", "3/2"], ["7/2", "3/2"]]
    assert report["denominator"] == 2


def test_polygon_chain(capsys):
    code, report = run_json(capsys, ["chain", "--polygon", TRIANGLE])
    assert code == EXIT_OK
    assert report["a"] == 2
    assert report["endpoint"] == "ZeroClass"
    assert [m["shape"] for m in report["members"]][-1] == "Point"


def test_polygon_with_oracle(capsys):
    code, report = run_json(capsys, ["level", "--polygon", TRIANGLE, "--oracle"])
    assert code == EXIT_OK
    assert report["oracle"]["level"] == "pass"
    assert report["oracle"]["searched_level"] == "2"


def test_surface_level(capsys):
    code, report = run_json(capsys, ["level", "--surface", QUADRIC_25])
    assert code == EXIT_OK
    assert report == {"level": "1", "keel": "3"}


def test_plane_blowup_reads_degree_and_multiplicities(capsys):
    surface = '{"model": "plane_blowup", "r": 6, "D": [3, 1, 1, 1, 1, 1, 1]}'
    code, report = run_json(capsys, ["bounds", "--surface", surface])
    assert code == EXIT_OK
    assert (report["level"], report["keel"], report["constructive_upper"]) == ("1", "0", "3")
    assert report["endpoint_surface"] == "plane"


def test_surface_bounds(capsys):
    code, report = run_json(capsys, ["bounds", "--surface", QUADRIC_25])
    assert code == EXIT_OK
    assert report["lower"] == "6"
    assert report["lower_int"] == 6
    assert report["upper"] == "12"
    assert report["constructive_upper"] == "7"
    assert report["endpoint_surface"] == "ruled"
    assert set(report["checks"].values()) == {"pass"}


def test_surface_chain_lists_steps(capsys):
    surface = '{"model": "plane_blowup", "r": 2, "D": [3, 1, 1]}'
    code, report = run_json(capsys, ["chain", "--surface", surface])
    assert code == EXIT_OK
    assert report["a"] == 1
    assert report["steps"][0]["D"] == [3, 1, 1]
    assert report["steps"][-1]["model"] == "plane_blowup(0)"
    assert set(report["invariants"].values()) == {"pass"}


def test_surface_with_oracle(capsys):
    surface = '{"model": "plane_blowup", "r": 2, "D": [3, 1, 1]}'
    code, report = run_json(capsys, ["level", "--surface", surface, "--oracle", "--seed", "5"])
    assert code == EXIT_OK
    assert report["oracle"]["seed"] == 5
    assert report["oracle"]["effectivity_oracle"] == "pass"
    assert report["oracle"]["level_by_search"] == "pass"


def test_custom_surface(capsys):
    surface = json.dumps({"gram": [[0, 1], [1, 0]], "K": [-2, -2],
                          "effective_generators": [[1, 0], [0, 1]], "D": [3, 5]})
    code, report = run_json(capsys, ["level", "--surface", surface])
    assert code == EXIT_OK
    assert report == {"level": "3/2", "keel": "2"}


def test_example_high(capsys):
    code, report = run_json(capsys, ["example-high", "--n", "5"])
    assert code == EXIT_OK
    assert (report["level"], report["keel"], report["lower"]) == ("11/2", "5", "43/2")
    assert report["param_degree"] == 26
    assert report["sandwich"] == "ok"
    assert report["residual_multiplicities"] == [
        {"multiplicity": 15, "residual": "19/2"}, {"multiplicity": 10, "residual": "9/2"},
    ]


def test_text_format(capsys):
    assert main(["level", "--polygon", RECTANGLE, "--format", "text"]) == EXIT_OK
    assert capsys.readouterr().out == "level: 3/2\nkeel: 2\n"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "level.json"
    assert main(["level", "--polygon", RECTANGLE, "--output", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text(encoding="utf-8")) == {"level": "3/2", "keel": "2"}


def test_polygon_from_file(tmp_path, capsys):
    path = tmp_path / "triangle.json"
    path.write_text(TRIANGLE, encoding="utf-8")
    code, report = run_json(capsys, ["level", "--polygon", str(path)])
    assert code == EXIT_OK
    assert report["level"] == "2"


def test_svg_is_byte_stable(capsys):
    assert main(["chain", "--polygon", TRIANGLE, "--format", "svg"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["chain", "--polygon", TRIANGLE, "--format", "svg"]) == EXIT_OK
    second = capsys.readouterr().out
    assert "<svg" in first
    assert first == second


@pytest.mark.parametrize("argv,field", [
    (["level", "--polygon", '{"vertices": [[0, 0], [2, 0]]}'], "vertices"),
    (["level", "--polygon", '{"points": []}'], "vertices"),
    (["level", "--polygon", '{"vertices": [[0, 0], [1.5, 0], [0, 1]]}'], "vertices[1]"),
    (["level", "--polygon", "{not json"], "--polygon"),
    (["level", "--surface", '{"model": "quadric"}'], "D"),
    (["level", "--surface", '{"model": "cubic", "D": [1]}'], "model"),
    (["level", "--surface", '{"model": "plane_blowup", "D": [1]}'], "r"),
    (["level", "--surface", '{"model": "quadric", "D": [1, 2, 3]}'], "D"),
    (["level", "--surface", '{"model": "plane_blowup", "r": 1, "D": [2, -1]}'], "D"),
    (["level", "--surface", '{"model": "quadric", "D": [0, 3]}'], "D"),
    (["example-high", "--n", "4"], "--n"),
    (["example-high"], "--n"),
    (["level"], "--polygon"),
    (["level", "--surface", QUADRIC_25, "--format", "svg"], "--format"),
])
def test_input_errors_name_the_field(capsys, argv, field):
    assert main(argv) == EXIT_INPUT
    captured = capsys.readouterr()
    assert captured.out == ""
    assert f"error: {field}:" in captured.err


def test_batch(capsys):
    batch = json.dumps([
        {"polygon": json.loads(RECTANGLE)},
        {"surface": json.loads(QUADRIC_25)},
    ])
    code, reports = run_json(capsys, ["level", "--batch", batch])
    assert code == EXIT_OK
    assert reports == [{"level": "3/2", "keel": "2"}, {"level": "1", "keel": "3"}]


def test_batch_in_worker_processes(capsys):
    batch = json.dumps([{"polygon": {"vertices": [[0, 0], [n, 0], [0, n]]}} for n in range(1, 7)])
    code, reports = run_json(capsys, ["level", "--batch", batch, "--jobs", "2"])
    assert code == EXIT_OK
    assert [r["level"] for r in reports] == ["1/3", "2/3", "1", "4/3", "5/3", "2"]


def test_batch_reports_bad_items(capsys):
    batch = json.dumps([{"polygon": json.loads(RECTANGLE)}, {"shape": 1}])
    code, reports = run_json(capsys, ["level", "--batch", batch])
    assert code == EXIT_INPUT
    assert reports[0] == {"level": "3/2", "keel": "2"}
    assert reports[1]["error"]["field"] == "batch"


@pytest.mark.slow
def test_check_command_passes(capsys):
    code, report = run_json(capsys, ["check"])
    assert report["failures"] == 0
    assert code == EXIT_OK


def test_failed_invariant_exits_with_two(capsys, monkeypatch):
    monkeypatch.setattr(adjoint_cli, "check_chain_invariants", lambda result: {"nef_and_effective": False})
    code, report = run_json(capsys, ["level", "--surface", QUADRIC_25, "--oracle"])
    assert code == EXIT_INVARIANT
    assert report["oracle"]["nef_and_effective"] == "fail"


def test_failed_check_row_exits_with_two(capsys, monkeypatch):
    rows = [{"name": "triangle(3)", "expected": "1", "got": "2", "ok": False}]
    monkeypatch.setattr(verify_examples, "run_checks", lambda seed: rows)
    code, report = run_json(capsys, ["check"])
    assert code == EXIT_INVARIANT
    assert report["failures"] == 1
    assert report["checks"][0]["status"] == "fail"


def test_seed_setting_overrides_default(monkeypatch):
    try:
        monkeypatch.setenv("ADJOINT_KEEL_SEED", "77")
        importlib.reload(config_utils)
        assert parse_args(["level", "--polygon", RECTANGLE]).seed == 77
        assert parse_args(["level", "--polygon", RECTANGLE, "--seed", "5"]).seed == 5

        monkeypatch.setenv("ADJOINT_KEEL_SEED", "lucky")
        importlib.reload(config_utils)
        assert parse_args(["level", "--polygon", RECTANGLE]).seed == 20040517
    finally:
        monkeypatch.delenv("ADJOINT_KEEL_SEED", raising=False)
        importlib.reload(config_utils)
