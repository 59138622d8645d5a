import csv
import io
import json

import pytest

from blowup_csc import __version__
from blowup_csc.catalog import example_catalog
from blowup_csc.cli import main, render
from blowup_csc.io import configuration_to_dict, dumps


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_example1(capsys):
    code, out, _ = run(capsys, "check", "--example", "1")
    report = json.loads(out)
    assert code == 0
    assert report["schema"] == 1 and report["version"] == __version__
    assert report["report"]["verdict"] == "admissible"
    assert report["config"]["example"] == 1


def test_check_fixture_file(capsys, tmp_path):
    cfg = configuration_to_dict(example_catalog(1, n=3).configuration)
    path = tmp_path / "ex1.json"
    path.write_text(dumps(cfg))
    code, out, _ = run(capsys, "check", "--config", str(path))
    assert code == 0 and json.loads(out)["report"]["c1"] == 3


def test_check_m_equals_d_random(capsys):
    code, out, err = run(capsys, "check", "--n", "1", "--random", "3")
    report = json.loads(out)["report"]
    assert code == 1
    assert report["kernel_dim"] == 0 and report["c2"] is False
    assert "not admissible" in err


def test_check_with_group_representatives(capsys, tmp_path):
    path = tmp_path / "eq.json"
    path.write_text(json.dumps({
        "manifold": {"factors": [{"P": 1}]},
        "group": {"generators": [{"perm": [0, 1], "phase": [[1, 0], [-1, 0]]}]},
        "representatives": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
    }))
    code, out, _ = run(capsys, "check", "--config", str(path))
    report = json.loads(out)
    assert code == 0 and report["consistent"] and report["report"]["d"] == 1


def test_ledger_failing_inequality(capsys):
    code, out, err = run(capsys, "ledger", "--n", "2", "--delta", "9/10")
    assert code == 1
    assert "ii" in err
    rows = json.loads(out)["rows"]
    assert [r["name"] for r in rows if r["verdict"] == "fail"] == ["ii"]


def test_ledger_default_midpoint_passes(capsys):
    code, out, _ = run(capsys, "ledger", "--n", "4")
    assert code == 0 and json.loads(out)["delta"] == "-7/2"


def test_ledger_table(capsys):
    code, out, _ = run(capsys, "ledger", "--n", "3", "--format", "table")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split()[:5] == ["name", "lhs_exponent", "rhs_exponent", "gap", "verdict"]
    assert len(lines) == 2 + 7


def test_match_csv(capsys):
    code, out, _ = run(capsys, "match", "--n", "2", "3", "--gamma-max", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 10
    assert all(abs(float(r["det"])) > 1e-8 for r in rows)
    assert rows[0]["restricted"] == "True"


def test_ode_with_samples(capsys, tmp_path):
    samples = tmp_path / "zeta.csv"
    code, out, _ = run(capsys, "ode", "--n", "3", "--smax", "200", "--samples", str(samples))
    report = json.loads(out)
    assert code == 0 and report["lambda"] == pytest.approx(2.365094270741688, abs=1e-7)
    rows = list(csv.reader(samples.open()))
    assert rows[0] == ["s", "zeta", "f"] and len(rows) > 100


def test_ode_n2(capsys):
    code, out, _ = run(capsys, "ode", "--n", "2")
    report = json.loads(out)
    assert code == 0 and report["c"] == 0.0 and report["sup_zeta_minus_1"] < 1e-10


def test_catalog_table(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "table")
    assert code == 0
    assert out.count("discrepancy-documented") == 2


def test_search_cover_writes_out(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    code, out, _ = run(capsys, "search", "--n", "1", "--out", str(path))
    assert code == 0 and out == ""
    report = json.loads(path.read_text())
    assert report["configuration"]["report"]["verdict"] == "admissible"


def test_search_partial_cover_exit(capsys):
    code, out, _ = run(capsys, "search", "--n", "2", "--budget", "50")
    assert code == 1 and "error" in json.loads(out)


def test_config_supplies_flag_defaults(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 2, "delta": "9/10"}))
    code, _, _ = run(capsys, "ledger", "--config", str(path))
    assert code == 1
    code, _, _ = run(capsys, "ledger", "--config", str(path), "--delta", "1/3")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["ledger", "--delta", "abc"],
    ["ledger", "--n", "1"],
    ["check", "--n", "2"],
    ["check", "--config", "/nonexistent/file.json"],
    ["catalog", "--example", "2", "--alpha", "0.5", "--beta", "0.5"],
    ["ode", "--n", "3", "--rtol", "1e-4"],
    ["match", "--n", "1"],
    ["check", "--seed", "-4", "--n", "1", "--random", "4"],
    ["frobnicate"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_render_formats():
    rows = [{"a": 1, "b": [1, 2]}, {"a": 2, "c": None}]
    assert render("csv", {}, rows).splitlines() == ["a,b,c", '1,"[1, 2]",', "2,,"]
    table = render("table", {}, rows).splitlines()
    assert table[0].split() == ["a", "b", "c"]


def test_summary_suite_deterministic_and_csv(capsys):
    code1, out1, _ = run(capsys, "paper-suite")
    code2, out2, _ = run(capsys, "paper-suite")
    assert code1 == code2 == 0
    assert out1 == out2
    rows = json.loads(out1)["rows"]
    statuses = {r["key"]: r["status"] for r in rows}
    assert {k for k, v in statuses.items() if v == "discrepancy-documented"} == {"5", "6", "7-leading"}
    assert all(v in ("pass", "discrepancy-documented") for v in statuses.values())
    code3, out3, _ = run(capsys, "paper-suite", "--format", "csv")
    parsed = list(csv.DictReader(io.StringIO(out3)))
    assert code3 == 0 and [r["key"] for r in parsed] == [r["key"] for r in rows]
