import json
import os
import subprocess
import sys

import pytest

from lpackets.cli import ConfigError, RunConfig, load_config, run, validate_config

UL3 = ["--family", "ul", "--n", "3", "--p", "2", "--r", "1"]


def _run(argv, tmp_path):
    out = tmp_path / "report.json"
    code, report = run(argv + ["--out", str(out)])
    if report is not None:
        assert json.loads(out.read_text()) == json.loads(json.dumps(report, default=str, sort_keys=True))
    return code, report


def test_chartable_example(tmp_path):
    code, rep = _run(["chartable"] + UL3, tmp_path)
    assert code == 0
    assert rep["results"]["degrees"] == [1, 1, 1, 1, 2]
    assert rep["schema"] == "lpackets.report/1" and rep["command"] == "chartable"
    assert rep["verdict"]["ok"] is True and rep["timing"]["seconds"] >= 0
    assert rep["config"]["family"] == "ul" and rep["config"]["n"] == 3


def test_verify_higman_example(tmp_path):
    code, rep = _run(["verify-higman", "--family", "ul", "--n", "3", "--p", "3"], tmp_path)
    assert code == 0
    assert rep["results"]["all_powers_of_q"] and rep["results"]["non_powers"] == []


def test_verify_higman_with_witnesses(tmp_path):
    code, rep = _run(["verify-higman", "--witnesses"] + UL3, tmp_path)
    assert code == 0 and rep["results"]["all_witnesses_certified"]
    assert len(rep["results"]["witnesses"]) == 5


def test_fakeheis_needs_odd_p(capsys):
    code, rep = run(["chartable", "--family", "fakeheis", "--p", "2"])
    assert code == 2 and rep is None
    assert "fake Heisenberg requires p > 2" in capsys.readouterr().err


def test_r_zero_rejected(capsys):
    code, _ = run(["chartable", "--family", "ul", "--n", "2", "--r", "0"])
    assert code == 2
    assert "r must be >= 1" in capsys.readouterr().err


def test_errors_are_collected():
    with pytest.raises(ConfigError) as exc:
        validate_config({"p": 4, "r": 0, "family": "nope"})
    assert len(exc.value.errors) == 3


def test_unknown_key_and_bad_type():
    with pytest.raises(ConfigError, match="unknown keys: colour"):
        validate_config({"colour": 1})
    with pytest.raises(ConfigError, match="p must be an integer"):
        validate_config({"p": "2"})


def test_missing_n(capsys):
    code, _ = run(["chartable", "--family", "ul"])
    assert code == 2 and "needs --n" in capsys.readouterr().err


def test_group_cap_exceeded(capsys):
    code, _ = run(["chartable", "--family", "ul", "--n", "3", "--p", "3", "--group-cap", "10"])
    assert code == 2


def test_bad_command():
    code, rep = run(["frobnicate"])
    assert code == 2 and rep is None


def test_load_config_defaults_and_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"model": {"family": "ul", "n": 3, "p": 2}}))
    cfg = load_config(str(path))
    assert cfg.M == 4 and cfg.r == 1 and cfg.m == 1 and cfg.mode == "finite"
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    with pytest.raises(ConfigError, match="parse error at line 1"):
        load_config(str(bad))
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.json"))
    arr = tmp_path / "arr.json"
    arr.write_text("[]")
    with pytest.raises(ConfigError, match="top level"):
        load_config(str(arr))


def test_flags_override_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"family": "ul", "n": 3, "p": 3}))
    code, rep = _run(["chartable", "--config", str(path), "--p", "2"], tmp_path)
    assert code == 0 and rep["config"]["p"] == 2 and rep["results"]["order"] == 8


@pytest.mark.parametrize("argv", [
    ["admissible"] + UL3,
    ["admissible", "--mode", "geometric"] + UL3,
    ["lpackets"] + UL3,
    ["heisenberg", "--family", "ul", "--n", "3", "--p", "3"],
    ["lagrangian", "--p", "3", "--n", "2", "--count", "5"],
    ["linearize", "--p", "2", "--r", "2"],
    ["isotropic", "--p", "3", "--r", "2", "--count", "3", "--N", "2", "--m-max", "4"],
    ["phiconj", "--family", "vector", "--n", "1", "--p", "2", "--m", "2"],
    ["phiconj", "--inner", "3"] + UL3,
    ["induce", "--family", "ul", "--n", "3", "--p", "2", "--m", "2"],
    ["induce", "--subgroup", "commutator", "--family", "ul", "--n", "3", "--p", "2", "--m", "2"],
])
def test_every_command_runs(argv, tmp_path):
    code, rep = _run(argv, tmp_path)
    assert code == 0, rep and rep["results"]
    assert rep["command"] == argv[0] and rep["verdict"]["ok"]


def test_lpackets_partition(tmp_path):
    code, rep = _run(["lpackets"] + UL3, tmp_path)
    assert code == 0 and rep["results"]["M"] == 4


def test_induce_unknown_subgroup(capsys):
    code, _ = run(["induce", "--subgroup", "nope"] + UL3)
    assert code == 2 and "unknown subgroup" in capsys.readouterr().err


@pytest.mark.parametrize("command", ["chartable", "admissible", "lpackets", "verify-higman"])
def test_csv_written(command, tmp_path):
    path = tmp_path / "out.csv"
    code, _ = _run([command, "--csv", str(path)] + UL3, tmp_path)
    assert code == 0
    lines = path.read_text().splitlines()
    assert len(lines) > 1 and "," in lines[0]


def test_stdout_when_no_out(capsys):
    code, rep = run(["linearize", "--p", "2"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["command"] == "linearize"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lpackets.cli", "chartable"] + UL3,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["num_classes"] == 5


def test_caps_do_not_leak(monkeypatch):
    monkeypatch.delenv("LPACKETS_GROUP_CAP", raising=False)
    run(["chartable", "--group-cap", "10"] + UL3)
    assert "LPACKETS_GROUP_CAP" not in os.environ
