"""End-to-end command line behaviour."""

from __future__ import annotations

from fractions import Fraction as Q

import pytest

from mdpmon.cli import main
from mdpmon.modelio import CSV_HEADER

from conftest import MODELS


@pytest.fixture()
def airport_files(tmp_path):
    world = MODELS / "airport_world.mdp"
    sensor = MODELS / "airport_sensor.mdp"
    joint = tmp_path / "airport.mdp"
    assert main(["generate", "--family", "airport", "--params", "3,3,A",
                 "--out", str(joint)]) == 0
    return joint


def test_generate_emits_parseable_joint(airport_files, tmp_path):
    from mdpmon.modelio import parse_model

    joint = parse_model(airport_files.read_text())
    assert joint.num_states == 9


def test_simulate_then_monitor_filter(airport_files, tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    assert main(["simulate", "--model", str(airport_files), "--seed", "0",
                 "--length", "6", "--out", str(trace)]) == 0
    tokens = trace.read_text().split()
    assert len(tokens) == 6
    out_csv = tmp_path / "out.csv"
    assert main(["monitor", "--model", str(airport_files), "--trace", str(trace),
                 "--method", "filter", "--risk", "reach-max(crash,8)",
                 "--out", str(out_csv)]) == 0
    lines = out_csv.read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 7


def test_monitor_unroll_agrees_with_filter(airport_files, tmp_path):
    trace = tmp_path / "trace.txt"
    main(["simulate", "--model", str(airport_files), "--seed", "3",
          "--length", "5", "--out", str(trace)])
    f_csv = tmp_path / "f.csv"
    u_csv = tmp_path / "u.csv"
    main(["monitor", "--model", str(airport_files), "--trace", str(trace),
          "--method", "filter", "--risk", "reach-max(crash,8)",
          "--emit", "rational", "--out", str(f_csv)])
    main(["monitor", "--model", str(airport_files), "--trace", str(trace),
          "--method", "unroll", "--engine", "epi", "--risk", "reach-max(crash,8)",
          "--emit", "rational", "--out", str(u_csv)])
    f_risks = [line.split(",")[-1] for line in f_csv.read_text().strip().split("\n")[1:]]
    u_risks = [line.split(",")[-1] for line in u_csv.read_text().strip().split("\n")[1:]]
    assert f_risks == u_risks


def test_oracle_command(airport_files, tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    trace.write_text("R_o M_o\n")
    assert main(["oracle", "--model", str(airport_files), "--trace", str(trace),
                 "--risk", "reach-max(crash,8)"]) == 0
    out = capsys.readouterr().out.strip()
    assert "/" in out and "(" in out


def test_impossible_trace_exit_code(airport_files, tmp_path):
    trace = tmp_path / "trace.txt"
    trace.write_text("L_o\n")
    code = main(["monitor", "--model", str(airport_files), "--trace", str(trace),
                 "--method", "filter", "--risk", "reach-max(crash,8)",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_risk_file_flow(tmp_path):
    model = MODELS / "belief_fork.mdp"
    riskfile = tmp_path / "r.risk"
    riskfile.write_text("risk s2 1\nrisk s4 1\n")
    trace = tmp_path / "t.txt"
    trace.write_text("z0 z0 z1\n")
    out = tmp_path / "out.csv"
    assert main(["monitor", "--model", str(model), "--trace", str(trace),
                 "--method", "filter", "--risk-file", str(riskfile),
                 "--emit", "rational", "--out", str(out)]) == 0
    last = out.read_text().strip().split("\n")[-1]
    assert last.endswith(",1")


def test_generate_blowup_and_bench_help():
    assert main(["generate", "--family", "blowup", "--params", "2",
                 "--out", "/dev/null"]) == 0
    with pytest.raises(SystemExit):
        main(["bench", "--suite", "nope"])
