"""CLI surface: subcommands, exit codes, deterministic output."""

import json

import pytest
from click.testing import CliRunner

from orbitlab.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_classify_holomorphic(runner):
    res = runner.invoke(main, ["classify", "--n1", "2", "--n3", "2",
                               "--chamber", "D1"])
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["schema"] == 1
    assert data["class"] == "Holo"
    assert data["p1"]["proper"] and data["p"]["proper"]


def test_classify_neither(runner):
    res = runner.invoke(main, ["classify", "--n1", "3", "--n2", "1",
                               "--chamber", "D3"])
    data = json.loads(res.output)
    assert data["class"] == "Neither"
    assert not data["p1"]["weakly_proper"]
    assert data["p"]["weakly_proper"] and not data["p"]["proper"]


def test_classify_invalid_exit_2(runner):
    res = runner.invoke(main, ["classify", "--n1", "0", "--n3", "1",
                               "--chamber", "D1"])
    assert res.exit_code == 2


def test_branch_table(runner):
    res = runner.invoke(main, ["branch", "--f0h", "2", "--f0z", "-6",
                               "--target", "B"])
    data = json.loads(res.output)
    assert [e["m"] for e in data["entries"]] == [6, 3]
    audit = data["in_image_audit"]
    assert len(audit) == 6
    assert sum(a["selected"] for a in audit) == 2


def test_branch_neither_families(runner):
    res = runner.invoke(main, ["branch", "--f0h", "3", "--f0z", "1",
                               "--target", "B", "--n-max", "3"])
    data = json.loads(res.output)
    ms = sorted(e["m"] for e in data["entries"])
    assert ms == [-11, -8, -5, 4, 7, 10]
    assert {f["step"] for f in data["infinite_families"]} == {3, -3}


def test_branch_b1_not_admissible(runner):
    res = runner.invoke(main, ["branch", "--f0h", "3", "--f0z", "1",
                               "--target", "B1", "--format", "pretty"])
    assert "not admissible: infinite multiplicities" in res.output


def test_branch_invalid_exit_2(runner):
    res = runner.invoke(main, ["branch", "--f0h", "2", "--f0z", "-3"])
    assert res.exit_code == 2


def test_ode_dim_reference_row(runner):
    res = runner.invoke(main, ["ode-dim", "--f0h", "2", "--f0z", "0",
                               "--m", "0..4", "--sign", "+"])
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert [r["dim"] for r in data["results"]] == [0, 0, 1, 1, 1]


def test_ode_dim_window_invariance(runner):
    res = runner.invoke(main, ["ode-dim", "--f0h", "2", "--f0z", "0",
                               "--m", "1..3", "--sign", "-",
                               "--z0", "0.05", "--z1", "8"])
    data = json.loads(res.output)
    assert [r["dim"] for r in data["results"]] == [0, 1, 1]


def test_volume(runner):
    res = runner.invoke(main, ["volume", "--f0h", "2", "--f0z", "-6"])
    data = json.loads(res.output)
    assert abs(data["volume"] - 2.0) < 1e-8
    res = runner.invoke(main, ["volume", "--f0h", "3", "--f0z", "1"])
    assert res.exit_code == 2


def test_ode_system_dump(runner):
    res = runner.invoke(main, ["ode-system", "--f0h", "2", "--f0z", "0",
                               "--m", "1", "--sign", "-", "--format", "csv"])
    lines = res.output.strip().splitlines()
    assert lines[0] == "matrix,row,col,re,im"
    assert len(lines) == 1 + 3 * 9
    assert "np." not in res.output


def test_json_deterministic(runner):
    args = ["ode-dim", "--f0h", "3", "--f0z", "1", "--m", "0..3", "--sign", "-"]
    out1 = runner.invoke(main, args).output
    out2 = runner.invoke(main, args).output
    assert out1 == out2


def test_check_single_criterion(runner):
    res = runner.invoke(main, ["check", "--criterion", "2"])
    assert res.exit_code == 0
    assert "PASS" in res.output
