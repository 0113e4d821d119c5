import re

import numpy as np
import pytest

from screenmin import AltModel, HypothesisMix
from screenmin.io import load_navy

ALPHA = 0.05
ONE_NONNULL_MIX = HypothesisMix(0.0, 1.0, 0.0)
# three-type mix used for the threshold curves
CURVE_MIX = HypothesisMix(0.70, 0.25, 0.05)

_acceptance = {}


@pytest.fixture
def ten_pair():
    return dict(c=0.005, alpha=ALPHA, mix=ONE_NONNULL_MIX, model=AltModel(2.0), m=10)


@pytest.fixture(scope="session")
def ten_pair_sim():
    """Fixed-threshold (c = alpha/m = 0.005) and adaptive ScreenMin, 10^5 replications."""
    from screenmin.simulation import SimConfig, run_simulation

    cfg = SimConfig(m=10, mix=ONE_NONNULL_MIX, snr1=2.0, n_reps=100_000, seed=2,
                    procedures=("default", "adafilter"))
    return run_simulation(cfg)


@pytest.fixture(scope="session")
def navy():
    return load_navy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if m and (report.when == "call" or report.outcome != "passed"):
        key = int(m.group(1))
        if report.outcome != "passed" or key not in _acceptance:
            _acceptance[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance):
        verdict = "PASS" if _acceptance[key] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {key}: {verdict}")
