"""CLI contract tests: exit codes, outputs, determinism."""

import json
import os

import numpy as np
import pytest

from pathtrans.cli import main
from pathtrans.errors import ConfigError
from pathtrans.scenarios import parse_scenario

LOOP_INI = """\
[scenario]
grid_t = 32

[paths]
path = square-loop:0.5
"""


def _read(path):
    with open(path) as fh:
        return fh.read()


class TestRun:
    def test_lift_outputs(self, tmp_path):
        out = str(tmp_path / "o")
        rc = main(["run", "lift", "--grid-t", "41", "--out", out])
        assert rc == 0
        assert os.path.exists(os.path.join(out, "trajectory_lift.csv"))
        rep = json.loads(_read(os.path.join(out, "report.json")))
        assert rep["passed"] is True
        assert rep["residuals"]["group_constraint"] < 1e-10

    def test_transport_outputs(self, tmp_path):
        out = str(tmp_path / "o")
        rc = main(["run", "transport", "--grid-t", "41", "--grid-s", "41",
                   "--out", out])
        assert rc == 0
        assert os.path.exists(os.path.join(out, "trajectory_transport.csv"))
        assert os.path.exists(os.path.join(out, "trajectory_a_s.csv"))

    def test_holonomy_requires_loop(self, tmp_path):
        out = str(tmp_path / "o")
        rc = main(["run", "holonomy", "--grid-t", "41", "--out", out])
        assert rc == 3  # the default path preset is not a loop

    def test_holonomy_with_loop_scenario(self, tmp_path):
        ini = tmp_path / "loop.ini"
        ini.write_text(LOOP_INI)
        out = str(tmp_path / "o")
        rc = main(["run", "holonomy", "--scenario", str(ini), "--out", out])
        assert rc == 0
        rep = json.loads(_read(os.path.join(out, "report.json")))
        assert "holonomy_entries" in rep["residuals"]

    def test_csv_determinism(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = str(tmp_path / name)
            assert main(["run", "transport", "--grid-t", "41", "--grid-s",
                         "41", "--out", out]) == 0
            outs.append(_read(os.path.join(out, "trajectory_transport.csv")))
        assert outs[0] == outs[1]  # byte-identical


class TestVerify:
    def test_verify_lie_passes(self, tmp_path, capsys):
        out = str(tmp_path / "o")
        rc = main(["verify", "lie", "--out", out])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines and all(l.startswith("PASS") for l in lines)

    def test_verify_writes_report(self, tmp_path):
        out = str(tmp_path / "o")
        main(["verify", "lie", "--out", out])
        rep = json.loads(_read(os.path.join(out, "report.json")))
        assert rep["kernel"] in ("cython", "pure")


class TestConverge:
    def test_converge_abelian(self, tmp_path, capsys):
        out = str(tmp_path / "o")
        rc = main(["converge", "abelian", "--refinements", "3",
                   "--out", out])
        assert rc == 0
        rep = json.loads(_read(os.path.join(out, "report.json")))
        assert rep["slope"] is None or rep["slope"] >= 2.0 \
            or rep["floor_reached"]

    def test_threads_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PATHTRANS_THREADS", "2")
        out = str(tmp_path / "o")
        assert main(["converge", "abelian", "--refinements", "3",
                     "--out", out]) == 0


class TestConfig:
    def test_missing_scenario_file(self, tmp_path):
        rc = main(["verify", "lie", "--scenario",
                   str(tmp_path / "nope.ini"), "--out",
                   str(tmp_path / "o")])
        assert rc == 2

    def test_bad_field_names_offender(self, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[scenario]\nintegrator = dormand\n")
        with pytest.raises(ConfigError) as err:
            parse_scenario(str(ini))
        assert "integrator" in str(err.value)

    def test_grid_floor(self, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[scenario]\ngrid_t = 5\n")
        with pytest.raises(ConfigError):
            parse_scenario(str(ini))

    def test_cli_overrides_apply(self):
        sc = parse_scenario(None, {"grid_t": 77, "integrator": "euler"})
        assert sc.grid_t == 77
        assert sc.integrator == "euler"
