"""Tunnel-barrier memristor equations.

Everything here is a pure function of its arguments.  Units are fixed
across the package: energies in eV, lengths in nm, voltages in V (a bias
of ``v`` volts lowers the barrier by ``v`` eV), currents in A, time in s.
Physical constants never appear raw; they are folded into
``j_prefactor``, ``b_coeff`` and ``lm`` exactly as in the reference
PSPICE subcircuit.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum

from .errors import DegenerateBarrier, InvariantViolation, NegativeBarrier

_LOG_FLOAT_MAX = math.log(sys.float_info.max)
_LN2 = math.log(2.0)


class Variant(str, Enum):
    ORIGINAL = "original"
    MODIFIED = "modified"


@dataclass(frozen=True)
class ModelParams:
    """Fitted and physical constants of the device.

    ``variant`` selects between the original model (all damping factors
    forced to 1, no width limiter) and the modified one (configured
    damping factors, width clamped to ``[w_min, w_max]``).
    """

    phi0: float = 0.95  # eV
    lm: float = 0.0998  # eV*nm, lambda*w
    w1_const: float = 0.1261  # nm
    j_prefactor: float = 0.0617
    b_coeff: float = 10.246
    r_s: float = 215.0  # ohm
    f_off: float = 3.5e3  # nm/s
    f_on: float = 2.0e6  # nm/s
    i_off: float = 115e-6  # A
    i_on: float = 8.9e-6  # A
    a_off: float = 1.2  # nm
    a_on: float = 1.8  # nm
    w_c: float = 0.095  # nm
    b_cur: float = 600e-6  # A
    k_off1: float = 1.0
    k_off2: float = 0.5
    k_on1: float = 1.0
    k_on2: float = 1.0
    w_min: float = 1.0  # nm
    w_max: float = 2.0  # nm
    variant: Variant = Variant.MODIFIED

    def __post_init__(self):
        if not isinstance(self.variant, Variant):
            try:
                object.__setattr__(self, "variant", Variant(str(self.variant).lower()))
            except ValueError:
                raise InvariantViolation("variant", f"unknown variant {self.variant!r}") from None
        for f in fields(self):
            if f.name == "variant":
                continue
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvariantViolation(f.name, f"must be a finite number, got {value!r}")
        for name in ("phi0", "lm", "w_c", "b_cur", "i_off", "i_on", "f_off", "f_on"):
            if getattr(self, name) <= 0:
                raise InvariantViolation(name, "must be > 0")
        if self.r_s < 0:
            raise InvariantViolation("r_s", "must be >= 0")
        if self.w_min <= 0:
            raise InvariantViolation("w_min", "must be > 0")
        if self.w_min >= self.w_max:
            raise InvariantViolation("w_min", f"w_min={self.w_min} must be below w_max={self.w_max}")
        implied = 1.2 * self.lm / self.phi0
        if abs(implied - self.w1_const) > 1e-3:
            raise InvariantViolation(
                "w1_const",
                f"{self.w1_const} nm disagrees with 1.2*lm/phi0 = {implied:.5f} nm",
            )

    @property
    def modified(self) -> bool:
        return self.variant is Variant.MODIFIED

    def damping(self) -> tuple[float, float, float, float]:
        """Effective (k_off1, k_off2, k_on1, k_on2); all ones for the original model."""
        if self.modified:
            return self.k_off1, self.k_off2, self.k_on1, self.k_on2
        return 1.0, 1.0, 1.0, 1.0

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d


@dataclass(frozen=True)
class BarrierGeometry:
    lambda_: float
    w1: float
    w2: float
    dw: float
    phi_i: float
    b_exp: float


@dataclass(frozen=True)
class DeviceState:
    w_raw: float
    w_eff: float


@dataclass(frozen=True)
class OperatingPoint:
    v: float
    i: float
    v_g: float


def _geometry(w, av, p):
    # Tuple-returning core shared by barrier_geometry and tunnel_current.
    w1 = p.w1_const
    if not w > w1:
        raise DegenerateBarrier(f"width {w!r} nm is not above w1={w1} nm")
    lam = p.lm / w
    denom = 3.0 * p.phi0 + 4.0 * lam - 2.0 * av
    if not denom > 0.0:
        raise DegenerateBarrier(f"bias {av} V collapses the barrier at w={w} nm")
    w2 = w1 + w * (1.0 - 9.2 * lam / denom)
    if not w1 < w2 < w:
        raise DegenerateBarrier(f"w2={w2:.6g} nm outside ({w1}, {w}) at |v_g|={av} V")
    dw = w2 - w1
    ratio = w2 * (w - w1) / (w1 * (w - w2))
    phi = p.phi0 - av * (w1 + w2) / (2.0 * w) - 1.15 * lam * w / dw * math.log(ratio)
    if not phi > 0.0:
        raise NegativeBarrier(f"phi_I={phi:.6g} eV at w={w} nm, |v_g|={av} V")
    return lam, w1, w2, dw, phi, p.b_coeff * dw


def barrier_geometry(w_eff: float, v_g: float, params: ModelParams) -> BarrierGeometry:
    """Image-force-lowered barrier shape at width ``w_eff`` under bias ``v_g``.

    Raises DegenerateBarrier when the turning points leave ``(w1, w_eff)``
    and NegativeBarrier when the lowered barrier height is not positive.
    """
    return BarrierGeometry(*_geometry(w_eff, abs(v_g), params))


def tunnel_current(v_g: float, w_eff: float, params: ModelParams) -> float:
    """Tunneling current (A) through the barrier for internal voltage ``v_g``."""
    if v_g == 0.0:
        # still validate the width
        _geometry(w_eff, 0.0, params)
        return 0.0
    av = abs(v_g)
    _, _, _, dw, phi, b = _geometry(w_eff, av, params)
    # phi*exp(-B*sqrt(phi)) - (phi+av)*exp(-B*sqrt(phi+av)), rearranged so
    # the two nearly equal terms never get subtracted at small bias.
    s0 = math.sqrt(phi)
    d = av / (s0 + math.sqrt(phi + av))
    e_d = math.exp(-b * d)
    bracket = math.exp(-b * s0) * (-phi * math.expm1(-b * d) - av * e_d)
    mag = params.j_prefactor / (dw * dw) * bracket
    return mag if v_g > 0.0 else -mag


def _log_sinh(x):
    return x + math.log1p(-math.exp(-2.0 * x)) - _LN2


def _branch_rate(scale, ai, i_scale, k1, k2, window_arg, w_over_wc):
    x = ai / i_scale
    if x == 0.0:
        return 0.0
    inner = k2 * window_arg
    if inner > _LOG_FLOAT_MAX:
        return 0.0
    expo = -k1 * math.exp(inner) - w_over_wc
    if x < 700.0:
        # left-to-right, as the formula reads: with unit damping this is
        # bit-identical to the undamped expression
        rate = scale * math.sinh(x) * math.exp(expo)
        if math.isfinite(rate):
            return rate
    # sinh overflow: work in log space and saturate at the largest float.
    log_rate = math.log(scale) + _log_sinh(x) + expo
    return math.exp(min(log_rate, _LOG_FLOAT_MAX))


def state_derivative(w_eff: float, i: float, v_g: float, params: ModelParams) -> float:
    """Rate of change of the tunnel width, nm/s.

    The branch is chosen by the sign of ``v_g``: positive bias widens the
    barrier (OFF switching), negative bias narrows it (ON switching).
    """
    p = params
    if v_g == 0.0:
        return 0.0
    k_off1, k_off2, k_on1, k_on2 = p.damping()
    ai = abs(i)
    w_over_wc = w_eff / p.w_c
    if v_g > 0.0:
        window_arg = (w_eff - p.a_off) / p.w_c - ai / p.b_cur
        return _branch_rate(p.f_off, ai, p.i_off, k_off1, k_off2, window_arg, w_over_wc)
    window_arg = (p.a_on - w_eff) / p.w_c - ai / p.b_cur
    return -_branch_rate(p.f_on, ai, p.i_on, k_on1, k_on2, window_arg, w_over_wc)


def clamp_width(w_raw: float, params: ModelParams) -> float:
    """Hard limiter: pin the width to ``[w_min, w_max]`` (modified model only)."""
    if params.modified:
        return min(max(w_raw, params.w_min), params.w_max)
    return w_raw
