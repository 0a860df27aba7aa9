"""Tunnel-barrier memristor model with a bounded, damped state equation."""

from .errors import (
    ConfigError, DegenerateBarrier, DegenerateReference, EmptyTrace, InvariantViolation,
    LengthMismatch, ModelDomainError, NegativeBarrier, NoConvergence, NoOverlap, OutOfRange,
    ParseError, SimulationError, TunnelmemError, UnknownKey,
)
from .fitting import BudgetExhausted, FitProblem, FitResult, fit_parameters
from .metrics import Region, ReferenceTrace, align_traces, rel_rms_error, region_mask, trace_error
from .model import (
    BarrierGeometry, DeviceState, ModelParams, OperatingPoint, Variant, barrier_geometry,
    clamp_width, state_derivative, tunnel_current,
)
from .solver import OdeMethod, SolverConfig, advance_state, solve_operating_point
from .transient import Trace, WaveKind, Waveform, hysteresis_curve, sample_waveform, simulate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
