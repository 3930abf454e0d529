import json
import math
import subprocess
import sys

import pytest

from dissipative_ssh import cli, topology
from dissipative_ssh.errors import GapClosure


def run(*args):
    return subprocess.run([sys.executable, "-m", "dissipative_ssh.cli", *args],
                          capture_output=True, text=True)


@pytest.mark.parametrize("text,value", [
    ("0.4pi", 0.4 * math.pi), ("pi", math.pi), ("pi/2", math.pi / 2), ("1.25", 1.25),
    ("0.5*pi", 0.5 * math.pi), ("-pi/4", -math.pi / 4),
])
def test_parse_angle(text, value):
    assert cli.parse_angle(text) == pytest.approx(value)


def test_parse_errors():
    for bad in ("abc", "pi/", ""):
        with pytest.raises(cli.UsageError):
            cli.parse_angle(bad)
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0:1")
    assert cli.parse_n_grid("10:14:2") == [10, 12, 14]
    assert cli.parse_n_grid("3,5") == [3, 5]
    assert cli.parse_onsite("uniform:0.5").kind == "uniform_loss"


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nphi = 0.3pi\nkpoints = 5\ngamma2 = 0.5\n")
    out = tmp_path / "a.csv"
    assert cli.main(["dispersion", "--config", str(cfg), "--kpoints", "7", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# config.phi: 0.3pi" in text
    assert "# config.gamma2: 0.5" in text
    assert "# config.kpoints: 7" in text
    assert len([l for l in text.splitlines() if not l.startswith("#")]) == 8


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    assert cli.main(["dispersion", "--config", str(tmp_path / "missing.cfg")]) == 1
    assert cli.main(["dispersion", "--config", str(cfg)]) == 1


def test_usage_errors_exit_1():
    assert run("dispersion", "--bogus").returncode == 1
    assert run("dispersion", "--phi", "x").returncode == 1
    r = run("dispersion", "--onsite", "uniform:1", "--kpoints", "5")
    assert r.returncode == 1 and "on-site" in r.stderr


def test_numerical_error_exits_2(monkeypatch, capsys):
    def boom(*a, **k):
        raise GapClosure("gap closed")
    monkeypatch.setattr(topology, "dispersion", boom)
    assert cli.main(["dispersion"]) == 2
    assert "GapClosure" in capsys.readouterr().err


def test_json_output(tmp_path):
    out = tmp_path / "o.json"
    assert cli.main(["oscillation", "--phi-grid", "0.2pi:0.3pi:3", "--n", "8",
                     "--gamma1", "1", "--gamma2", "1", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["header"]["command"] == "oscillation"
    assert len(doc["rows"]) == 3 and len(doc["columns"]) == len(doc["rows"][0])


def test_selftest_passes(capsys):
    assert cli.main(["selftest", "--samples", "5"]) == 0
    assert capsys.readouterr().out.count("PASS") == 3


def test_dynamics_notes(tmp_path):
    out = tmp_path / "d.csv"
    assert cli.main(["dynamics", "--n", "2", "--phi", "0.2pi", "--t-max", "50",
                     "--t-points", "101", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# adiabatic_beat_period:" in text and "# fitted_beat_period:" in text


def test_repeated_runs_are_byte_identical(tmp_path):
    args = ["spectrum", "--n", "4", "--phi-grid", "0:0.4pi:5", "--gamma1", "0.3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*args, "--out", str(a)).returncode == 0
    assert run(*args, "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
