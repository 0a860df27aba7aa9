"""Drive waveforms and transient simulation of the source + memristor circuit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    EmptyTrace,
    InvariantViolation,
    NoConvergence,
    OutOfRange,
    SimulationError,
    ModelDomainError,
)
from .model import DeviceState, ModelParams, clamp_width
from .solver import SolverConfig, advance_state, solve_operating_point

TRACE_COLUMNS = ("t", "v", "v_g", "i", "w_eff", "w_raw")
DEFAULT_W0 = 1.2  # nm


class WaveKind(str, Enum):
    TRIANGULAR = "triangular"
    SINE = "sine"
    RAMP_HOLD = "ramphold"
    PIECEWISE_LINEAR = "pwl"


@dataclass(frozen=True)
class Waveform:
    """Applied source voltage as a function of time.

    ``amplitude_pos`` is signed for ``RAMP_HOLD`` (a ramp to -3 V uses
    ``amplitude_pos=-3``).  ``amplitude_neg`` is the magnitude of the
    negative lobe of a triangular wave.
    """

    kind: WaveKind
    amplitude_pos: float = 0.0
    amplitude_neg: float = 0.0
    period: float = 1.0
    t_end: float = 1.0
    breakpoints: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not isinstance(self.kind, WaveKind):
            try:
                object.__setattr__(self, "kind", WaveKind(str(self.kind).lower()))
            except ValueError:
                raise InvariantViolation("kind", f"unknown waveform kind {self.kind!r}") from None
        object.__setattr__(self, "breakpoints",
                           tuple((float(t), float(v)) for t, v in self.breakpoints))
        if not self.t_end > 0:
            raise InvariantViolation("t_end", "must be > 0")
        if self.kind is WaveKind.PIECEWISE_LINEAR:
            ts = [t for t, _ in self.breakpoints]
            if not ts:
                raise InvariantViolation("breakpoints", "piecewise-linear drive needs breakpoints")
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise InvariantViolation("breakpoints", "times must be strictly increasing")
        elif not self.period > 0:
            raise InvariantViolation("period", "must be > 0")

    def describe(self) -> dict:
        d = {"kind": self.kind.value, "t_end": self.t_end}
        if self.kind is WaveKind.PIECEWISE_LINEAR:
            d["breakpoints"] = list(self.breakpoints)
        else:
            d.update(amplitude_pos=self.amplitude_pos, period=self.period)
            if self.kind is WaveKind.TRIANGULAR:
                d["amplitude_neg"] = self.amplitude_neg
        return d


def sample_waveform(wf: Waveform, t: float) -> float:
    """Source voltage at time ``t`` (V)."""
    if not (0.0 <= t <= wf.t_end * (1.0 + 1e-12)):
        raise OutOfRange(f"t={t} outside [0, {wf.t_end}]")
    kind = wf.kind
    if kind is WaveKind.TRIANGULAR:
        q = wf.period / 4.0
        phase = math.fmod(t, wf.period)
        seg, frac = divmod(phase, q)
        frac /= q
        if seg == 0:
            return wf.amplitude_pos * frac
        if seg == 1:
            return wf.amplitude_pos * (1.0 - frac)
        if seg == 2:
            return -wf.amplitude_neg * frac
        return -wf.amplitude_neg * (1.0 - frac)
    if kind is WaveKind.SINE:
        return wf.amplitude_pos * math.sin(2.0 * math.pi * t / wf.period)
    if kind is WaveKind.RAMP_HOLD:
        return wf.amplitude_pos * min(t / wf.period, 1.0)
    ts = [b[0] for b in wf.breakpoints]
    vs = [b[1] for b in wf.breakpoints]
    return float(np.interp(t, ts, vs))


@dataclass
class Trace:
    """Time-ordered samples of a transient run plus the inputs that produced it."""

    t: np.ndarray
    v: np.ndarray
    v_g: np.ndarray
    i: np.ndarray
    w_eff: np.ndarray
    w_raw: np.ndarray
    params: ModelParams | None = None
    config: SolverConfig | None = None
    waveform: Waveform | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def column(self, name):
        return getattr(self, name)

    @classmethod
    def from_rows(cls, rows, **kw) -> "Trace":
        arr = np.asarray(rows, dtype=float).reshape(-1, len(TRACE_COLUMNS))
        return cls(*(arr[:, k].copy() for k in range(len(TRACE_COLUMNS))), **kw)


def _time_grid(t_end, h):
    n = max(1, int(round(t_end / h)))
    return n


def simulate(wf: Waveform, params: ModelParams, cfg: SolverConfig | None = None,
             w0: float = DEFAULT_W0) -> Trace:
    """Run the drive ``wf`` through the memristor starting from width ``w0``.

    Output samples are spaced ``cfg.dt * cfg.substeps`` apart; each ODE step
    holds the source voltage sampled at its start.  Any model or solver
    failure is re-raised as SimulationError with the failing time and the
    partial trace.
    """
    cfg = cfg or SolverConfig()
    if not w0 > params.w1_const:
        raise InvariantViolation("w0", f"{w0} nm must exceed w1={params.w1_const} nm")
    if params.modified and not params.w_min <= w0 <= params.w_max:
        raise InvariantViolation("w0", f"{w0} nm outside [{params.w_min}, {params.w_max}]")

    h = cfg.dt * cfg.substeps
    n_out = _time_grid(wf.t_end, h)
    rows = []
    meta = dict(params=params, config=cfg, waveform=wf)
    state = DeviceState(w0, clamp_width(w0, params))
    i_prev = None
    t = 0.0
    try:
        for k in range(n_out + 1):
            t = min(k * h, wf.t_end)
            op = solve_operating_point(sample_waveform(wf, t), state.w_eff, params, cfg, i_prev)
            rows.append((t, op.v, op.v_g, op.i, state.w_eff, state.w_raw))
            if k == n_out:
                break
            for j in range(cfg.substeps):
                if j:
                    t = k * h + j * cfg.dt
                    op = solve_operating_point(sample_waveform(wf, t), state.w_eff,
                                               params, cfg, op.i)
                state = advance_state(state, op, cfg.dt, params, cfg)
                if not math.isfinite(state.w_raw):
                    raise NoConvergence(f"width diverged to {state.w_raw}")
            i_prev = op.i
    except (ModelDomainError, NoConvergence) as exc:
        partial = Trace.from_rows(rows, **meta) if rows else None
        raise SimulationError(t, exc, partial) from exc
    return Trace.from_rows(rows, **meta)


def hysteresis_curve(trace: Trace) -> np.ndarray:
    """(v, i) pairs in time order, shape (N, 2)."""
    if len(trace) == 0:
        raise EmptyTrace("trace has no samples")
    return np.column_stack([trace.v, trace.i])
