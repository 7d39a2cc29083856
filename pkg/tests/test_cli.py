import os
import subprocess
import sys

import pytest

from fiscalshock.cli import EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL, exit_code, main
from fiscalshock.exceptions import ConvergenceError, DataError, PipelineError


def test_stage_commands(synth_dir, tmp_path, capsys):
    cfg = str(synth_dir / "pipeline.cfg")
    assert main(["ingest", "--config", cfg, "--out", str(tmp_path / "i")]) == 0
    assert os.path.isfile(tmp_path / "i" / "series" / "y.csv")
    assert not os.path.exists(tmp_path / "i" / "tables")
    assert main(["cointegrate", "--config", cfg, "--out", str(tmp_path / "c"), "--run-unit-root", "no"]) == 0
    assert os.path.isfile(tmp_path / "c" / "tables" / "cointegration.csv")
    assert main(["extract-shocks", "--config", cfg, "--out", str(tmp_path / "e"),
                 "--run-unit-root", "no"]) == 0
    assert os.path.isfile(tmp_path / "e" / "series" / "SRN.csv")
    capsys.readouterr()
    assert main(["asymmetry", "--config", cfg, "--out", str(tmp_path / "a"), "--spec", "four_lag",
                 "--run-unit-root", "no"]) == 0
    out = capsys.readouterr().out
    assert "SGP(-4)" in out and "jointly zero" in out


def test_report(vecm_run, capsys):
    out, _ = vecm_run
    assert main(["report", "--run-dir", str(out), "--kind", "contemporaneous"]) == 0
    text = capsys.readouterr().out
    assert text == (out / "tables" / "contemporaneous.txt").read_text()
    assert main(["report", "--run-dir", str(out), "--kind", "unit_root", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("Series")
    assert main(["report", "--run-dir", str(out), "--kind", "lagged"]) == EXIT_DATA


def test_synth_options(tmp_path):
    assert main(["synth", "--out", str(tmp_path), "--seed", "3", "--T", "80", "--beta", "0.1,0.1,0,0"]) == 0
    assert sorted(os.listdir(tmp_path))[:3] == ["divisia_mzm.csv", "gcec.csv", "gnp.csv"]
    assert main(["synth", "--out", str(tmp_path), "--beta", "a,b"]) == EXIT_CONFIG


def test_exit_codes(synth_dir, tmp_path, capsys):
    cfg = str(synth_dir / "pipeline.cfg")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "r"), "--gnp", str(tmp_path / "no.csv")]) \
        == EXIT_DATA
    assert "no.csv" in capsys.readouterr().err
    assert (tmp_path / "r" / "FAILED_AT").read_text().strip() == "ingest"
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "r2"), "--lags", "0"]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == EXIT_CONFIG


def test_exit_code_mapping():
    assert exit_code(PipelineError("shocks", ConvergenceError("x"))) == EXIT_NUMERICAL
    assert exit_code(PipelineError("ingest", DataError("x"))) == EXIT_DATA
    assert exit_code(ZeroDivisionError()) == EXIT_NUMERICAL


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "fiscalshock.cli", "synth", "--out", str(tmp_path), "--T", "60"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "pipeline.cfg" in r.stdout
