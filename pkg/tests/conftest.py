import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fiscalshock import _core  # noqa: E402
from fiscalshock.series import QuarterlySeries  # noqa: E402


@pytest.fixture(params=sorted(_core.backends()))
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = _core.backends()[request.param]
    for name in ("hp_trend", "hp_bands", "smo_solve"):
        monkeypatch.setattr(_core, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def qs(values, name="x", start=(1967, 1)):
    return QuarterlySeries(start, np.asarray(values, dtype=float), name)


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    """Synthetic data set (seed 0, default DGP) with a matching config file."""
    from fiscalshock.cli import main

    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(d), "--seed", "0"]) == 0
    return d


@pytest.fixture(scope="session")
def vecm_run(synth_dir, tmp_path_factory):
    from fiscalshock.pipeline import PipelineConfig, run_pipeline

    out = tmp_path_factory.mktemp("vecm_run")
    res = run_pipeline(PipelineConfig.from_file(synth_dir / "pipeline.cfg"), out)
    return out, res


@pytest.fixture(scope="session")
def svr_run(synth_dir, tmp_path_factory):
    from fiscalshock.pipeline import PipelineConfig, run_pipeline

    out = tmp_path_factory.mktemp("svr_run")
    res = run_pipeline(PipelineConfig.from_file(synth_dir / "pipeline.cfg", {"engine": "svr"}), out)
    return out, res


def pytest_terminal_summary(terminalreporter, config):
    from test_acceptance import ACCEPTANCE_KEY

    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s[1:3])):
            terminalreporter.write_line(line)
