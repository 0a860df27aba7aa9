"""Relative RMS error between a model trace and a reference I-V trace."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateReference, EmptyTrace, LengthMismatch, NoOverlap


class Region(str, Enum):
    ON = "on"  # negative drive
    OFF = "off"  # positive drive
    FULL = "full"


@dataclass
class ReferenceTrace:
    """Reference (t, v, i) samples, e.g. digitized measurements."""

    t: np.ndarray
    v: np.ndarray
    i: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.i = np.asarray(self.i, dtype=float)
        if not (self.t.shape == self.v.shape == self.i.shape) or self.t.ndim != 1:
            raise LengthMismatch("t, v and i must be 1-D and equally long")
        if self.t.size == 0:
            raise EmptyTrace("reference trace has no samples")

    def __len__(self):
        return self.t.size

    @property
    def mean_v(self) -> float:
        return float(self.v.mean())

    @property
    def mean_i(self) -> float:
        return float(self.i.mean())

    @classmethod
    def from_trace(cls, trace) -> "ReferenceTrace":
        return cls(trace.t.copy(), trace.v.copy(), trace.i.copy())


def region_mask(v, region) -> np.ndarray:
    """Samples belonging to ``region``; v == 0 is in neither switching region."""
    region = Region(region)
    v = np.asarray(v)
    if region is Region.ON:
        return v < 0.0
    if region is Region.OFF:
        return v > 0.0
    return np.ones(v.shape, dtype=bool)


def align_traces(model, reference: ReferenceTrace):
    """Interpolate the model onto the reference timestamps inside the common time span.

    Returns ``(model_aligned, reference_aligned)`` as two ReferenceTrace
    objects sharing the same time grid.
    """
    t_lo = max(model.t[0], reference.t[0])
    t_hi = min(model.t[-1], reference.t[-1])
    keep = (reference.t >= t_lo) & (reference.t <= t_hi)
    if t_lo > t_hi or not keep.any():
        raise NoOverlap(
            f"model [{model.t[0]}, {model.t[-1]}] s and reference "
            f"[{reference.t[0]}, {reference.t[-1]}] s do not overlap")
    t = reference.t[keep]
    aligned = ReferenceTrace(t, np.interp(t, model.t, model.v), np.interp(t, model.t, model.i))
    return aligned, ReferenceTrace(t.copy(), reference.v[keep], reference.i[keep])


def rel_rms_error(model, reference: ReferenceTrace, region=Region.FULL) -> float:
    """Combined voltage/current RMS deviation normalised by the squared reference means.

    ``model`` and ``reference`` must already share one sample grid (see
    align_traces).  The region is selected on the reference voltage and the
    means are taken over the selected reference samples.
    """
    vm, im = np.asarray(model.v, dtype=float), np.asarray(model.i, dtype=float)
    if vm.shape != reference.v.shape or im.shape != reference.i.shape:
        raise LengthMismatch(f"model has {vm.size} samples, reference has {reference.v.size}")
    mask = region_mask(reference.v, region)
    n = int(mask.sum())
    if n == 0:
        raise DegenerateReference(f"no reference samples in region {Region(region).value!r}")
    vr, ir = reference.v[mask], reference.i[mask]
    mean_v, mean_i = vr.mean(), ir.mean()
    if mean_v == 0.0 or mean_i == 0.0:
        raise DegenerateReference(
            f"reference mean is zero in region {Region(region).value!r} "
            f"(mean v={mean_v}, mean i={mean_i})")
    dv = vm[mask] - vr
    di = im[mask] - ir
    total = np.dot(dv, dv) / mean_v**2 + np.dot(di, di) / mean_i**2
    return float(np.sqrt(total / n))


def trace_error(model, reference: ReferenceTrace, region=Region.FULL) -> float:
    """align_traces followed by rel_rms_error."""
    m, r = align_traces(model, reference)
    return rel_rms_error(m, r, region)
