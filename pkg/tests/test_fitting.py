import math
import warnings

import numpy as np
import pytest

from tunnelmem import (
    BudgetExhausted, FitProblem, InvariantViolation, ModelParams, ReferenceTrace, SolverConfig,
    Waveform, fit_parameters, simulate, trace_error,
)
from tunnelmem.fitting import INITIAL_STEP

# Short, coarse problem: a fraction of a second of OFF drive.
CFG = SolverConfig(dt=1e-3, substeps=2)
DRIVE = Waveform("triangular", 1.58, 0.92, 6.0, 1.2)


@pytest.fixture(scope="module")
def reference():
    return ReferenceTrace.from_trace(simulate(DRIVE, ModelParams(), CFG))


def problem(reference, budget, **kw):
    return FitProblem({"i_off": (30e-6, 460e-6)}, reference, DRIVE, "off", budget, **kw)


def test_budget_one_returns_start(reference):
    start = ModelParams(i_off=150e-6)
    with pytest.warns(BudgetExhausted):
        res = fit_parameters(problem(reference, 1), start, CFG)
    assert res.params == start
    assert res.evaluations == 1 and res.exhausted
    sim = simulate(DRIVE, start, CFG)
    assert res.error == trace_error(sim, reference, "off")


def test_history_monotone_and_never_worse(reference):
    start = ModelParams(i_off=150e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetExhausted)
        res = fit_parameters(problem(reference, 12), start, CFG)
    h = np.array(res.history)
    assert len(h) == res.evaluations <= 12
    assert np.all(np.diff(h) <= 0)
    assert res.error == h[-1] <= h[0]
    assert abs(res.params.i_off - 115e-6) < abs(150e-6 - 115e-6)


def test_deterministic(reference):
    start = ModelParams(i_off=150e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetExhausted)
        a = fit_parameters(problem(reference, 6), start, CFG)
        b = fit_parameters(problem(reference, 6), start, CFG)
    assert a.params == b.params and a.history == b.history


def test_failed_candidates_score_inf(reference):
    # the start point itself cannot be simulated (stress drive, 215 ohm)
    drive = Waveform("ramphold", 9.0, 0.0, 1.0, 1.0)
    p = FitProblem({"i_off": (30e-6, 460e-6)}, reference, drive, "off", 2)
    with pytest.warns(BudgetExhausted):
        res = fit_parameters(p, ModelParams(), CFG)
    assert res.error == math.inf and res.history == [math.inf, math.inf]


def test_start_outside_bounds(reference):
    with pytest.raises(InvariantViolation):
        fit_parameters(problem(reference, 5), ModelParams(i_off=1e-3), CFG)


@pytest.mark.parametrize("free, budget", [
    ({}, 5),
    ({"variant": (0, 1)}, 5),
    ({"i_off": (2e-4, 1e-4)}, 5),
    ({"i_off": (1e-5, 1e-3)}, 0),
])
def test_problem_invariants(reference, free, budget):
    with pytest.raises(InvariantViolation):
        FitProblem(free, reference, DRIVE, "off", budget)


def test_initial_step_constant():
    assert INITIAL_STEP == 0.05
