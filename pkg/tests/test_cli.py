import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from timdof.bounds import analyze
from timdof.cli import UnknownFormat, emit_dot, emit_reduced_dot, emit_report, run_cli
from timdof.graphs import build_bundle
from timdof.topology import NetworkTopology, fixture_text, load_fixture

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def fixture_dir(tmp_path):
    for name in ("hexnet6", "paper7", "square8", "iconflict3"):
        (tmp_path / f"{name}.tim").write_text(fixture_text(name))
    return tmp_path


def test_analyze_json(fixture_dir):
    code, out, _ = run("analyze", fixture_dir / "hexnet6.tim", "--json")
    assert code == 0
    assert json.loads(out)["theorem1_bound"] == {"num": 4, "den": 9}


def test_exit_codes(fixture_dir, tmp_path):
    assert run("analyze", tmp_path / "missing.tim")[0] == 2
    assert run("analyze", fixture_dir / "hexnet6.tim", "--bogus")[0] == 1
    assert run()[0] == 1
    assert run("frobnicate")[0] == 1
    bad = tmp_path / "bad.tim"
    bad.write_text("users 2\nrx 1: 2\nrx 2: 2\n")
    assert run("analyze", bad)[0] == 3
    bad.write_text("users two\n")
    assert run("analyze", bad)[0] == 2


def test_dot_output(fixture_dir, tmp_path):
    out = tmp_path / "dot"
    assert run("analyze", fixture_dir / "paper7.tim", "--dot", out)[0] == 0
    assert {p.name for p in out.iterdir()} == {"graphs.dot", "reduced.dot", "cycle.dot"}
    cycle = (out / "cycle.dot").read_text()
    assert cycle.count("style=dashed") == 3


def test_dot_counts():
    dot = emit_dot(build_bundle(load_fixture("hexnet6")))
    assert dot.count("style=solid color=black") == 3
    assert dot.count("style=dashed color=red") == 6
    empty = emit_dot(build_bundle(NetworkTopology.from_interferers(4, {})))
    assert empty.count("--") == 0 and all(f"W{k};" in empty for k in range(1, 5))
    assert emit_reduced_dot(build_bundle(load_fixture("hexnet6"))).count("--") == 3


def test_emit_report():
    assert "4/9" in emit_report(analyze(load_fixture("hexnet6")), "text")
    assert json.loads(emit_report(analyze(load_fixture("square8")), "json"))["half_dof"]["feasible"] is True
    with pytest.raises(UnknownFormat):
        emit_report(analyze(load_fixture("square8")), "yaml")


@pytest.mark.parametrize("name", ["hexnet6", "paper7", "square8", "iconflict3"])
def test_golden_reports(name, fixture_dir):
    assert run("analyze", fixture_dir / f"{name}.tim", "--json")[1] == (GOLDEN / f"{name}.json").read_text()
    assert run("analyze", fixture_dir / f"{name}.tim")[1] == (GOLDEN / f"{name}.txt").read_text()


def test_scheme_command(fixture_dir):
    code, out, _ = run("scheme", fixture_dir / "paper7.tim", "--json")
    assert code == 0 and json.loads(out)["scheme"]["nominal_dof"] == {"num": 4, "den": 9}
    code, out, _ = run("scheme", fixture_dir / "iconflict3.tim")
    assert code == 0 and "infeasible" in out


def test_simulate_csv(fixture_dir, tmp_path):
    csv_path = tmp_path / "out.csv"
    code, _, _ = run("simulate", fixture_dir / "paper7.tim", "--pbar", 100000, "--trials", 100, "--seed", 7,
                     "--csv", csv_path)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 2 and lines[0].startswith("pbar,qc,trials,seed,scheme")


def test_simulate_reproducible_across_threads(fixture_dir):
    args = ["simulate", fixture_dir / "paper7.tim", "--pbar", 1000, 10000, "--trials", 80, "--seed", 3, "--json"]
    a = run(*args, "--threads", 1)[1]
    b = run(*args, "--threads", 8)[1]
    assert a == b == run(*args, "--threads", 1)[1]


def test_oracle_command(tmp_path):
    csv_path = tmp_path / "o.csv"
    code, out, _ = run("oracle", "--samples", 200, "--pairs", 5, "--triples", 10, "--interval-max", 4,
                       "--step", 1e-5, "--csv", csv_path)
    assert code == 0 and out.count("pass") == 4
    assert csv_path.read_text().splitlines()[0] == "check,params,measured,bound,margin"


def test_fixtures_command(tmp_path):
    code, out, _ = run("fixtures")
    assert code == 0 and out.split() == ["hexnet6", "paper7", "square8", "iconflict3"]
    assert run("fixtures", "hexnet6")[1] == fixture_text("hexnet6")
    assert run("fixtures", "nosuch")[0] == 1
    assert run("fixtures", "--write", tmp_path / "fx")[0] == 0
    assert (tmp_path / "fx" / "square8.tim").read_text() == fixture_text("square8")


def test_module_entry_point(fixture_dir):
    proc = subprocess.run([sys.executable, "-m", "timdof", "analyze", str(fixture_dir / "square8.tim")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1/2 DoF feasible           yes" in proc.stdout
