import io
import json
import math

import pytest

from app.cli import main
from app.services import sampling


def _rows(text):
    return sampling.read_csv(io.StringIO(text))


def test_roots_csv(capsys):
    assert main(["roots", "--model", "kdv", "--omega0", "0.375"]) == 0
    out = capsys.readouterr().out
    roots_block, facts_block = out.split("\n\n")
    assert roots_block.splitlines()[0] == "index,re,im,multiplicity,location,radiating,group_velocity"
    assert len(roots_block.splitlines()) == 4
    assert "k0_re,0.5" in facts_block.splitlines()


def test_roots_json(capsys):
    assert main(["roots", "--model", "bbm", "--omega0", "0.4", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["k0"] == pytest.approx([0.5, 0.0])
    assert report["critical_frequencies"]["omega_cr_plus"] == pytest.approx(0.5)


@pytest.mark.parametrize(
    "argv",
    [
        ["roots", "--model", "kdv", "--omega0", "-1"],
        ["roots", "--model", "kdv"],
        ["dnmap", "--model", "general", "--coefficients", "0.5,0,-1,0,-1", "--omega0", "0.2"],
        ["phase-diagram", "--model", "general", "--coefficients", "0.5,0,-1,0,-1"],
        ["oracle", "--model", "bbm", "--omega0", "0.4"],
        ["compare", "--model", "bbm", "--omega0", "0.4", "--t", "5"],
    ],
)
def test_bad_input_exits_with_2(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_dnmap_series(capsys):
    assert main(["dnmap", "--model", "kdv", "--omega0", "0.375", "--t", "0,2", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert [h["n"] for h in report["harmonics"]] == [-1, 1]
    assert report["series"][0]["re"] == pytest.approx(0.5)
    assert report["series"][1]["re"] == pytest.approx(0.5 * math.cos(0.75))


def test_evaluate_asymptotic_sample(capsys):
    assert main(["evaluate", "--model", "kdv", "--omega0", "0.375", "--method", "asym", "--x", "3", "--t", "400"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1
    assert rows[0].value == pytest.approx(math.sin(1.5 - 150.0), abs=1e-12)
    assert rows[0].region == "I"


def test_evaluate_on_rays(capsys):
    argv = ["evaluate", "--model", "bbm", "--omega0", "0.4", "--method", "series", "--xi", "0:1:3", "--t", "10,20"]
    assert main(argv) == 0
    rows = _rows(capsys.readouterr().out)
    assert [(r.x, r.t) for r in rows] == [(0.0, 10.0), (5.0, 10.0), (10.0, 10.0), (0.0, 20.0), (10.0, 20.0), (20.0, 20.0)]


def test_evaluate_exits_1_when_every_row_fails(capsys):
    argv = ["evaluate", "--model", "general", "--coefficients", "0.5,0,-1,0,-1", "--omega0", "0.2", "--x", "1", "--t", "1"]
    assert main(argv) == 1
    rows = _rows(capsys.readouterr().out)
    assert rows[0].status == "uncovered_family"


def test_evaluate_without_samples_prints_only_the_header(capsys):
    assert main(["evaluate", "--model", "kdv", "--omega0", "0.375", "--method", "asym"]) == 0
    assert capsys.readouterr().out == ",".join(sampling.CSV_HEADER) + "\n"


def test_run_file_with_flag_overrides(tmp_path, capsys):
    run_file = tmp_path / "run.yaml"
    run_file.write_text(
        "model: kdv\n"
        "omega0: 0.375\n"
        "method: exact\n"
        "samples:\n"
        "  x: {values: [3.0]}\n"
        "  t: {values: [10.0]}\n",
        encoding="utf-8",
    )
    assert main(["evaluate", "--config", str(run_file), "--method", "asym", "--t", "400"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0].method == "Asymptotic"
    assert rows[0].t == 400.0


def test_missing_run_file_is_bad_input(tmp_path, capsys):
    assert main(["roots", "--config", str(tmp_path / "absent.yaml"), "--omega0", "0.3"]) == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    assert main(["evaluate", "--model", "kdv", "--omega0", "0.375", "--method", "modulation",
                 "--x", "3", "--t", "400", "--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    rows = sampling.read_csv(io.StringIO(target.read_text(encoding="utf-8")))
    assert rows[0].region == "plateau"


def test_phase_diagram_csv(capsys):
    assert main(["phase-diagram", "--model", "bbm", "--resolution", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "kind,curve,omega0,xi,label"
    assert sum(1 for line in lines if line.startswith("label,")) == 9
    assert any(line.startswith("curve,group_velocity,") for line in lines)


def test_oracle_snapshots(capsys):
    argv = ["oracle", "--model", "bbm", "--omega0", "0.4", "--t-final", "4", "--x-max", "20", "--nx", "100", "--snapshots", "3"]
    assert main(argv) == 0
    rows = _rows(capsys.readouterr().out)
    assert sorted({r.t for r in rows}) == [0.0, 2.0, 4.0]
    assert all(r.method == "Oracle" for r in rows)


def test_oracle_front_exit_is_a_numerical_failure(capsys):
    argv = ["oracle", "--model", "bbm", "--omega0", "0.4", "--t-final", "100", "--x-max", "20", "--nx", "100"]
    assert main(argv) == 1
    assert "front_exited_domain" in capsys.readouterr().err


@pytest.mark.parametrize("limit,code", [("1e-2", 0), ("1e-15", 1)])
def test_compare_gate(limit, code, capsys):
    argv = ["compare", "--model", "bbm", "--omega0", "0.4", "--t", "5", "--x", "1,2,3",
            "--x-max", "20", "--nx", "200", "--max-rel-error", limit]
    assert main(argv) == code
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 15


def test_compare_runs_every_case_of_the_run_file(tmp_path, capsys):
    run_file = tmp_path / "check.yaml"
    run_file.write_text(
        "command: compare\n"
        "cases:\n"
        "  - {model: kdv, omega0: 0.375}\n"
        "  - {model: bbm, omega0: 0.4}\n"
        "t_final: 5.0\n"
        "samples: {x: {values: [1.0, 2.0, 3.0]}}\n"
        "oracle: {x_max: 20.0, nx: 200}\n"
        "max_rel_error: 5.0e-2\n"
    )
    assert main(["compare", "--config", str(run_file)]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 30
    assert {(r.model, r.omega0) for r in rows} == {("kdv", 0.375), ("bbm", 0.4)}


def test_compare_gate_fails_if_any_case_fails(tmp_path, capsys):
    run_file = tmp_path / "check.yaml"
    run_file.write_text(
        "command: compare\n"
        "cases: [{model: bbm, omega0: 0.4}, {model: bbm, omega0: 0.8}]\n"
        "t_final: 5.0\n"
        "samples: {x: {values: [1.0, 2.0]}}\n"
        "oracle: {x_max: 20.0, nx: 200}\n"
        "max_rel_error: 1.0e-15\n"
    )
    assert main(["compare", "--config", str(run_file)]) == 1
