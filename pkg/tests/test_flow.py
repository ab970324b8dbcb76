from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foxartin.analysis import classify_fixed_point
from foxartin.errors import OutsideCylinder
from foxartin.flow import (
    FlowParams,
    axis_speed,
    integrate,
    time_one_inverse,
    time_one_map,
    translation_map,
    vector_field,
)


def cylinder_points(n, rng, dim=3, axial=(-3, 3)):
    x = np.empty((n, dim))
    x[:, 0] = rng.uniform(*axial, n)
    g = rng.normal(size=(n, dim - 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    x[:, 1:] = g * (2 * np.sqrt(rng.uniform(0, 1, n)))[:, None]
    return x


def test_field_formula_against_hand_values():
    # on the axis at x1 = 0: r^2 = 0, speed 1 - 16/9, transverse part zero
    assert np.allclose(vector_field([0.0, 0, 0]), [1 - 16 / 9, 0, 0])
    # r^2 = 3 sits on the sine collar with rate (sin 0 - 1)/2
    x = np.array([0.0, math.sqrt(3), 0.0])
    v = vector_field(x)
    assert v[0] == pytest.approx(1 - 1 / 9)
    assert v[1] == pytest.approx(-0.5 * math.sqrt(3))
    # far away it is the unit translation
    assert np.array_equal(vector_field([5.0, 1.0, 0.0]), [1.0, 0.0, 0.0])


def test_single_point_path_matches_batch(rng):
    pts = cylinder_points(500, rng)
    batch = vector_field(pts)
    single = np.array([vector_field(p) for p in pts])
    assert np.abs(batch - single).max() < 1e-15


def test_outside_cylinder_rejected():
    with pytest.raises(OutsideCylinder):
        vector_field([0.0, 2.5, 0.0])
    with pytest.raises(ValueError):
        FlowParams(dim=1)
    with pytest.raises(ValueError):
        FlowParams(inner_sq=1.0)


@pytest.mark.parametrize("seam", [2.0, 4.0])
def test_field_continuous_and_c1_across_seams(seam, rng):
    # compare one-sided values and finite-difference derivatives across r^2 = seam
    dirs = rng.normal(size=(200, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = dirs[np.sum((dirs * math.sqrt(seam))[:, 1:] ** 2, axis=1) <= 4.0 - 1e-3]
    e = 1e-7
    for u in dirs:
        p = math.sqrt(seam) * u
        inside, outside = p * (1 - e), p * (1 + e)
        assert np.abs(vector_field(inside) - vector_field(outside)).max() < 1e-6
        # second-order one-sided stencils along the radial direction u
        h = 1e-4
        a, b = p * (1 - e), p * (1 + e)
        d_in = (3 * vector_field(a) - 4 * vector_field(a - h * u) + vector_field(a - 2 * h * u)) / (2 * h)
        d_out = (-3 * vector_field(b) + 4 * vector_field(b + h * u) - vector_field(b + 2 * h * u)) / (2 * h)
        assert np.abs(d_in - d_out).max() < 1e-4


def test_axis_equilibria():
    assert axis_speed(1.0) == 0.0 and axis_speed(-1.0) == 0.0
    xs = np.linspace(-2, 2, 4000)  # even count: the grid avoids +-1
    sign_changes = np.nonzero(np.diff(np.sign(axis_speed(xs))))[0]
    assert len(sign_changes) == 2


def test_time_one_multipliers():
    f = time_one_map
    sad = classify_fixed_point(f, np.array([1.0, 0, 0]))
    sink = classify_fixed_point(f, np.array([-1.0, 0, 0]))
    assert sad.label == "SADDLE(u=1)" and sink.label == "SINK"
    assert np.allclose(sad.multipliers, [math.exp(4 / 3), math.exp(-1), math.exp(-1)], atol=1e-3)
    assert np.allclose(sink.multipliers, [math.exp(-1), math.exp(-1), math.exp(-4 / 3)], atol=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-1.9, 1.9), st.floats(-0.5, 0.5))
def test_forward_then_backward_returns(x1, x2, x3):
    x = np.array([x1, x2, x3])
    if x2 * x2 + x3 * x3 > 3.9:
        return
    assert np.allclose(time_one_inverse(time_one_map(x)), x, atol=1e-8)


def test_flow_is_translation_far_from_the_ball():
    x = np.array([5.0, 1.0, 0.5])
    assert np.allclose(time_one_map(x), translation_map(x), atol=1e-13)


def test_transverse_norm_never_grows(rng):
    pts = cylinder_points(100, rng)
    out = np.array([time_one_map(p) for p in pts])
    assert np.all(np.linalg.norm(out[:, 1:], axis=1) <= np.linalg.norm(pts[:, 1:], axis=1) + 1e-12)


def test_integrate_path_and_partial_step():
    x, t, path = integrate([0.0, 0.1, 0.0], 0.025, 0.01, return_path=True)
    assert t.tolist() == pytest.approx([0, 0.01, 0.02, 0.025])
    assert np.array_equal(path[-1], x)
    with pytest.raises(ValueError):
        integrate([0.0, 0, 0], 1.0, -0.1)


def test_flow_in_dimension_four():
    x = np.array([1.0, 0, 0, 0])
    rep = classify_fixed_point(time_one_map, x)
    assert rep.label == "SADDLE(u=1)"
    assert rep.multipliers.size == 4
