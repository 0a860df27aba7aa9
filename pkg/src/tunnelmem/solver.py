"""Operating-point solve and time stepping for one memristor behind ``r_s``.

The device current depends on the barrier voltage ``v_g = v - r_s*i``,
which in turn depends on the current, so every instant needs a scalar
root solve.  The state ODE is then advanced with explicit Euler or
classical RK4 under a zero-order hold on the applied voltage.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

from .errors import InvariantViolation, ModelDomainError, NoConvergence
from .model import (
    DeviceState,
    ModelParams,
    OperatingPoint,
    _geometry,
    clamp_width,
    state_derivative,
    tunnel_current,
)

# Initial-guess series load for a cold start, ohm.
_COLD_START_LOAD = 10e3
_FLOOR_CURRENT = 1e-9  # A


class OdeMethod(str, Enum):
    RK4 = "rk4"
    EULER = "euler"


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    bisect_span: float = 0.05  # A
    ode_method: OdeMethod = OdeMethod.RK4
    dt: float = 1e-4  # s
    substeps: int = 10

    def __post_init__(self):
        if not isinstance(self.ode_method, OdeMethod):
            try:
                object.__setattr__(self, "ode_method", OdeMethod(str(self.ode_method).lower()))
            except ValueError:
                raise InvariantViolation("ode_method", f"unknown method {self.ode_method!r}") from None
        if not self.newton_tol > 0:
            raise InvariantViolation("newton_tol", "must be > 0")
        if int(self.newton_max_iter) != self.newton_max_iter or self.newton_max_iter < 1:
            raise InvariantViolation("newton_max_iter", "must be an integer >= 1")
        if not self.bisect_span > 0:
            raise InvariantViolation("bisect_span", "must be > 0")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvariantViolation("dt", "must be > 0")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise InvariantViolation("substeps", "must be an integer >= 1")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ode_method"] = self.ode_method.value
        return d


def _is_valid(w, av, p):
    try:
        _geometry(w, av, p)
    except ModelDomainError:
        return False
    return True


class _Residual:
    """g(i) = i - I_t(a - r_s*i) for a non-negative applied voltage ``a``."""

    __slots__ = ("a", "w", "p", "r_s", "i_top")

    def __init__(self, a, w, p):
        self.a, self.w, self.p, self.r_s = a, w, p, p.r_s
        self.i_top = a / p.r_s  # all of the drive dropped across r_s

    def __call__(self, i):
        return i - tunnel_current(self.a - self.r_s * i, self.w, self.p)

    def safe(self, i):
        try:
            return i - tunnel_current(self.a - self.r_s * i, self.w, self.p)
        except ModelDomainError:
            return None


def _converged(r, i, tol):
    return abs(r) <= tol * max(abs(i), _FLOOR_CURRENT)


def _fd_slope(g, i):
    h = max(_FLOOR_CURRENT, 1e-6 * abs(i))
    gp, gm = g.safe(i + h), g.safe(i - h)
    if gp is None or gm is None:
        return None
    return (gp - gm) / (2.0 * h)


def _newton(g, i, cfg):
    tol = cfg.newton_tol
    r = g.safe(i)
    if r is None:
        return None
    for _ in range(cfg.newton_max_iter):
        if abs(r) <= tol * max(abs(i), _FLOOR_CURRENT):
            return i
        slope = _fd_slope(g, i)
        if not slope:
            return None
        step = -r / slope
        for _ in range(30):
            trial = i + step
            # passive roots only: 0 <= i <= a/r_s keeps 0 <= v_g <= a
            r_trial = g.safe(trial) if 0.0 <= trial <= g.i_top else None
            if r_trial is not None and abs(r_trial) < abs(r):
                break
            step *= 0.5
        else:
            return None
        i, r = trial, r_trial
    return i if _converged(r, i, tol) else None


def _validity_edge(w, a, p):
    # Largest barrier voltage in [0, a] for which the geometry is valid.
    if _is_valid(w, a, p):
        return a
    lo, hi = 0.0, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _is_valid(w, mid, p):
            lo = mid
        else:
            hi = mid
    return lo


def _bracket(g, cfg):
    """Find currents (lo, hi) with g(lo) < 0 < g(hi), both inside the barrier's valid domain."""
    a, w, p = g.a, g.w, g.p
    i_top = g.i_top
    span = min(i_top, cfg.bisect_span)
    # Cheap attempt first: g(0) = -I_t(a) < 0 when the full bias is valid.
    while True:
        g_lo = g.safe(0.0)
        g_hi = g.safe(span)
        if g_lo is not None and g_hi is not None and g_lo < 0.0 < g_hi:
            return 0.0, span
        if span >= i_top:
            break
        span = min(2.0 * span, i_top)
    # Scan barrier voltage up to the validity edge, refining towards the edge
    # where the current rises steeply.
    edge = _validity_edge(w, a, p)
    grid = [edge * k / 128.0 for k in range(128)]
    grid += [edge * (1.0 - 2.0 ** -j) for j in range(8, 53)]
    grid.append(edge)
    prev_i, prev_g = i_top, i_top  # v_g = 0: g = i_top > 0
    for vg in sorted(set(grid))[1:]:
        cur_i = (a - vg) / p.r_s
        cur_g = g.safe(cur_i)
        if cur_g is None:
            continue
        if cur_g <= 0.0 < prev_g:
            return cur_i, prev_i
        prev_i, prev_g = cur_i, cur_g
    return None


def _safeguarded(g, lo, hi, cfg):
    # Newton steps kept inside a shrinking sign bracket; bisection otherwise.
    g_lo = g(lo)
    if g_lo == 0.0:
        return lo
    x = 0.5 * (lo + hi)
    for _ in range(400):
        r = g(x)
        if _converged(r, x, cfg.newton_tol):
            return x
        if (r < 0.0) == (g_lo < 0.0):
            lo = x
        else:
            hi = x
        slope = _fd_slope(g, x)
        nxt = x - r / slope if slope else None
        if nxt is None or not (min(lo, hi) < nxt < max(lo, hi)):
            nxt = 0.5 * (lo + hi)
        if nxt == x:
            break
        x = nxt
    return None


def solve_operating_point(v: float, w_eff: float, params: ModelParams,
                          cfg: SolverConfig | None = None,
                          i_guess: float | None = None) -> OperatingPoint:
    """Self-consistent (v, i, v_g) for applied voltage ``v`` at width ``w_eff``.

    ``i_guess`` warm-starts Newton; without it the start is ``v/(r_s + 10k)``.
    The problem is odd in ``v``, so it is solved for ``|v|`` and mirrored.
    """
    cfg = cfg or SolverConfig()
    p = params
    _geometry(w_eff, 0.0, p)  # a width outside the model raises here, not as NoConvergence
    if v == 0.0:
        return OperatingPoint(0.0, 0.0, 0.0)
    if p.r_s == 0.0:
        i = tunnel_current(v, w_eff, p)
        if i * v < 0.0:
            raise NoConvergence(f"no passive operating point for v={v} V, w={w_eff} nm "
                                "(tunnel current reverses sign)")
        return OperatingPoint(v, i, v)

    sign = 1.0 if v > 0.0 else -1.0
    a = abs(v)
    g = _Residual(a, w_eff, p)
    if i_guess is None or not math.isfinite(i_guess) or i_guess * sign <= 0.0:
        start = a / (p.r_s + _COLD_START_LOAD)
    else:
        start = min(abs(i_guess), a / p.r_s)

    i = _newton(g, start, cfg)
    if i is None:
        br = _bracket(g, cfg)
        if br is None:
            raise NoConvergence(
                f"no operating point within barrier validity for v={v} V, w={w_eff} nm")
        i = _safeguarded(g, br[0], br[1], cfg)
        if i is None:
            raise NoConvergence(f"bracketed solve stalled for v={v} V, w={w_eff} nm")
    i *= sign
    return OperatingPoint(v, i, v - p.r_s * i)


def _rate(w_raw, v, i_guess, params, cfg):
    w = clamp_width(w_raw, params)
    op = solve_operating_point(v, w, params, cfg, i_guess)
    return state_derivative(w, op.i, op.v_g, params), op.i


def advance_state(state: DeviceState, op_point: OperatingPoint, dt: float,
                  params: ModelParams, cfg: SolverConfig | None = None) -> DeviceState:
    """One explicit step of the width ODE with the applied voltage held at ``op_point.v``.

    ``op_point`` must be the solved operating point at ``state.w_eff``.  RK4
    stages re-solve the operating point at the clamped stage width but do not
    touch the state; the limiter is applied once, after the full step.
    """
    cfg = cfg or SolverConfig()
    if not dt > 0:
        raise ValueError("dt must be > 0")
    v = op_point.v
    k1 = state_derivative(state.w_eff, op_point.i, op_point.v_g, params)
    if cfg.ode_method is OdeMethod.EULER:
        w_new = state.w_raw + dt * k1
    else:
        w0 = state.w_raw
        guess = op_point.i
        k2, guess2 = _rate(w0 + 0.5 * dt * k1, v, guess, params, cfg)
        k3, guess3 = _rate(w0 + 0.5 * dt * k2, v, guess2, params, cfg)
        k4, _ = _rate(w0 + dt * k3, v, guess3, params, cfg)
        w_new = w0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    w_eff = clamp_width(w_new, params)
    if params.modified:
        # anti-windup: the integrator never holds a width beyond the limits
        w_new = w_eff
    return DeviceState(w_new, w_eff)
