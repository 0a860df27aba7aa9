import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunnelmem import (
    DegenerateReference, EmptyTrace, LengthMismatch, NoOverlap, ReferenceTrace, Region,
    align_traces, region_mask, rel_rms_error, trace_error,
)


def synthetic(n=100, phase=0.0):
    t = np.linspace(0.0, 6.0, n)
    v = 1.2 * np.sin(2 * np.pi * t / 6.0 + phase) + 0.3
    i = 1e-3 * np.sin(2 * np.pi * t / 6.0 + phase) ** 3 + 2e-4
    return ReferenceTrace(t, v, i)


def test_identical_is_zero():
    ref = synthetic()
    for region in Region:
        assert rel_rms_error(ref, ref, region) == 0.0


def test_three_sample_hand_value():
    # e = sqrt(((0.1^2)*3 / 2^2) / 3) = 0.05
    ref = ReferenceTrace([0, 1, 2], [1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
    model = ReferenceTrace([0, 1, 2], [1.1, 2.1, 3.1], [1.0, 1.0, 1.0])
    assert rel_rms_error(model, ref) == pytest.approx(0.05, rel=1e-14)


def test_uniform_offset():
    ref = synthetic()
    delta = 0.037
    model = ReferenceTrace(ref.t, ref.v + delta, ref.i)
    assert abs(rel_rms_error(model, ref) - abs(delta) / abs(ref.mean_v)) < 1e-12


def test_current_offset():
    ref = synthetic()
    model = ReferenceTrace(ref.t, ref.v, ref.i - 5e-5)
    assert rel_rms_error(model, ref) == pytest.approx(5e-5 / abs(ref.mean_i), rel=1e-12)


@settings(max_examples=50)
@given(st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3), st.floats(0.0, 3.0))
def test_scaling_invariance(c, phase):
    ref, model = synthetic(), synthetic(phase=phase * 0.1)
    scaled_ref = ReferenceTrace(ref.t, c * ref.v, c * ref.i)
    scaled_model = ReferenceTrace(model.t, c * model.v, c * model.i)
    e = rel_rms_error(model, ref)
    assert rel_rms_error(scaled_model, scaled_ref) == pytest.approx(e, rel=1e-12)


@settings(max_examples=50)
@given(st.floats(0.0, 3.0), st.sampled_from(list(Region)))
def test_nonnegative(phase, region):
    ref = synthetic()
    assert rel_rms_error(synthetic(phase=phase), ref, region) >= 0.0


def test_region_split():
    v = np.array([-1.0, 0.0, 1.0])
    assert region_mask(v, "on").tolist() == [True, False, False]
    assert region_mask(v, "off").tolist() == [False, False, True]
    assert region_mask(v, Region.FULL).all()


def test_region_uses_reference_voltage():
    ref = ReferenceTrace([0, 1, 2, 3], [1.0, 1.0, -1.0, -1.0], [1.0, 1.0, -1.0, -1.0])
    # model differs only where the reference is negative
    model = ReferenceTrace(ref.t, [1.0, 1.0, 5.0, 5.0], ref.i)
    assert rel_rms_error(model, ref, "off") == 0.0
    assert rel_rms_error(model, ref, "on") > 0.0


def test_align_identity():
    ref = synthetic()
    m, r = align_traces(ref, ref)
    assert np.array_equal(m.v, ref.v) and np.array_equal(r.t, ref.t)


def test_align_midpoints():
    t_model = np.linspace(0.0, 1.0, 21)
    model = ReferenceTrace(t_model, t_model ** 2, 2 * t_model)
    t_ref = t_model[:-1] + 0.025  # midpoints of the model grid
    ref = ReferenceTrace(t_ref, np.zeros_like(t_ref), np.zeros_like(t_ref))
    m, r = align_traces(model, ref)
    lo, hi = np.searchsorted(t_model, r.t) - 1, np.searchsorted(t_model, r.t)
    assert np.allclose(m.v, 0.5 * (model.v[lo] + model.v[hi]), rtol=0, atol=1e-15)
    assert np.allclose(m.i, 2 * r.t, rtol=0, atol=1e-14)


def test_align_drops_outside_overlap():
    model = ReferenceTrace([0.0, 1.0, 2.0], [0, 1, 2], [0, 1, 2])
    ref = ReferenceTrace([1.5, 2.0, 2.5, 3.0], [1, 1, 1, 1], [1, 1, 1, 1])
    m, r = align_traces(model, ref)
    assert r.t.tolist() == [1.5, 2.0]
    assert m.v.tolist() == [1.5, 2.0]


def test_disjoint_traces():
    a = ReferenceTrace([0.0, 1.0], [1, 1], [1, 1])
    b = ReferenceTrace([2.0, 3.0], [1, 1], [1, 1])
    with pytest.raises(NoOverlap):
        align_traces(a, b)
    with pytest.raises(NoOverlap):
        trace_error(a, b)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        rel_rms_error(synthetic(10), synthetic(11))
    with pytest.raises(LengthMismatch):
        ReferenceTrace([0, 1], [0], [0, 1])


def test_empty_reference():
    with pytest.raises(EmptyTrace):
        ReferenceTrace([], [], [])


def test_degenerate_reference():
    ref = ReferenceTrace([0, 1, 2], [1.0, -1.0, 0.0], [1.0, -1.0, 0.0])
    with pytest.raises(DegenerateReference):
        rel_rms_error(ref, ref, "full")  # zero mean voltage
    positive = ReferenceTrace([0, 1], [1.0, 2.0], [1.0, 1.0])
    with pytest.raises(DegenerateReference):
        rel_rms_error(positive, positive, "on")  # no samples
