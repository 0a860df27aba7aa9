import sys

import numpy as np
import pytest

from tunnelmem import ModelParams, SolverConfig, Variant, Waveform


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def original():
    return ModelParams(variant=Variant.ORIGINAL)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Coarser grid for tests that only need a plausible trajectory.
FAST = SolverConfig(dt=2e-4, substeps=5)


def off_half_drive(t_end=3.0):
    """Positive lobe of the reconstructed cycle: 0 -> 1.58 V -> 0 over 3 s."""
    return Waveform("triangular", 1.58, 0.92, 6.0, t_end)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
