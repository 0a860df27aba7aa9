"""Derivative-free fitting of model parameters against a reference I-V trace.

Box-constrained Nelder-Mead: trial points are clipped to the bounds
coordinate by coordinate.  The initial simplex and all coefficients are
fixed, so a fit is fully reproducible.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvariantViolation, TunnelmemError
from .metrics import Region, ReferenceTrace, trace_error
from .model import ModelParams
from .solver import SolverConfig
from .transient import DEFAULT_W0, Waveform, simulate

log = logging.getLogger(__name__)

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
INITIAL_STEP = 0.05  # fraction of each bound range

FITTABLE = {f.name for f in fields(ModelParams)} - {"variant"}


class BudgetExhausted(UserWarning):
    """The evaluation budget ran out before the simplex converged."""


@dataclass
class FitProblem:
    free: dict  # name -> (lower, upper)
    reference: ReferenceTrace
    drive: Waveform
    region: Region = Region.FULL
    budget: int = 200
    w0: float = DEFAULT_W0
    xatol: float = 1e-4  # fraction of bound range
    fatol: float = 1e-6

    def __post_init__(self):
        self.region = Region(self.region)
        if not self.free:
            raise InvariantViolation("free", "at least one free parameter is required")
        for name, (lo, hi) in self.free.items():
            if name not in FITTABLE:
                raise InvariantViolation(name, "not a fittable model parameter")
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InvariantViolation(name, f"bounds ({lo}, {hi}) must be finite and ordered")
        if int(self.budget) != self.budget or self.budget < 1:
            raise InvariantViolation("budget", "must be an integer >= 1")


@dataclass
class FitResult:
    params: ModelParams
    error: float
    evaluations: int
    exhausted: bool
    history: list = field(default_factory=list)  # best-so-far objective after each evaluation


def fit_parameters(problem: FitProblem, base: ModelParams,
                   cfg: SolverConfig | None = None) -> FitResult:
    """Minimise the relative RMS error over ``problem.free`` starting from ``base``.

    Candidates whose simulation fails are scored ``inf`` so the simplex
    steers away from them.  Emits a BudgetExhausted warning (and sets
    ``exhausted``) when the budget ends the search.
    """
    cfg = cfg or SolverConfig()
    names = list(problem.free)
    lo = np.array([problem.free[n][0] for n in names], dtype=float)
    hi = np.array([problem.free[n][1] for n in names], dtype=float)
    span = hi - lo
    x0 = np.array([getattr(base, n) for n in names], dtype=float)
    for n, x, a, b in zip(names, x0, lo, hi):
        if not a <= x <= b:
            raise InvariantViolation(n, f"start value {x} outside bounds ({a}, {b})")

    history = []
    best = [math.inf, x0]

    def candidate(x):
        return base.replace(**{n: float(v) for n, v in zip(names, x)})

    def objective(x):
        try:
            trace = simulate(problem.drive, candidate(x), cfg, problem.w0)
            f = trace_error(trace, problem.reference, problem.region)
        except TunnelmemError as exc:
            log.debug("candidate %s rejected: %s", x, exc)
            f = math.inf
        if not math.isfinite(f):
            f = math.inf
        if f < best[0]:
            best[0], best[1] = f, x.copy()
        history.append(best[0])
        return f

    def clip(x):
        return np.clip(x, lo, hi)

    def spent():
        return len(history) >= problem.budget

    n = len(names)
    simplex = [x0.copy()]
    values = [objective(x0)]
    for j in range(n):
        if spent():
            break
        x = x0.copy()
        x[j] += INITIAL_STEP * span[j]
        if x[j] > hi[j]:
            x[j] = x0[j] - INITIAL_STEP * span[j]
        x = clip(x)
        simplex.append(x)
        values.append(objective(x))

    converged = False
    while len(simplex) == n + 1 and not spent():
        order = np.argsort(values, kind="stable")
        simplex = [simplex[k] for k in order]
        values = [values[k] for k in order]
        xs = np.array(simplex)
        if (np.max(np.abs(xs[1:] - xs[0]) / span) <= problem.xatol
                and max(abs(f - values[0]) for f in values[1:]) <= problem.fatol):
            converged = True
            break
        centroid = xs[:-1].mean(axis=0)
        worst = xs[-1]
        xr = clip(centroid + REFLECT * (centroid - worst))
        fr = objective(xr)
        if fr < values[0]:
            if spent():
                simplex[-1], values[-1] = xr, fr
                break
            xe = clip(centroid + EXPAND * (xr - centroid))
            fe = objective(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if spent():
            break
        if fr < values[-1]:
            xc = clip(centroid + CONTRACT * (xr - centroid))
            fc = objective(xc)
            accept = fc <= fr
        else:
            xc = clip(centroid + CONTRACT * (worst - centroid))
            fc = objective(xc)
            accept = fc < values[-1]
        if accept:
            simplex[-1], values[-1] = xc, fc
            continue
        for k in range(1, n + 1):
            if spent():
                break
            simplex[k] = clip(xs[0] + SHRINK * (xs[k] - xs[0]))
            values[k] = objective(simplex[k])

    exhausted = not converged and spent()
    if exhausted:
        warnings.warn(
            f"fit stopped after {len(history)} evaluations; returning best so far",
            BudgetExhausted, stacklevel=2)
    return FitResult(candidate(best[1]), best[0], len(history), exhausted, history)
