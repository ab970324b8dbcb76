from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foxartin.errors import OutsideCylinder, OutsideTube, ZeroPoint
from foxartin.flow import time_one_map
from foxartin.tube import (
    ChartKind,
    frame_chart,
    model_diffeo,
    model_diffeo_branches,
    model_diffeo_inverse,
    radial_chart,
    tube_mesh,
)

cyl = st.tuples(st.floats(-6, 6), st.floats(0, 1.99), st.floats(0, 2 * np.pi))


def _y(t, dim=3):
    s, r, a = t
    y = np.zeros(dim)
    y[0], y[1], y[2] = s, r * np.cos(a), r * np.sin(a)
    return y


@pytest.fixture(scope="module", params=["radial", "frame"])
def chart(request, radial3, frame3):
    return radial3 if request.param == "radial" else frame3


@settings(max_examples=60, deadline=None)
@given(cyl)
def test_zeta_round_trip(chart, t):
    y = _y(t)
    assert np.allclose(chart.zeta(chart.zeta_inv(y)), y, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(cyl)
def test_zeta_conjugates_h_to_unit_translation(chart, t):
    y = _y(t)
    x = chart.zeta_inv(y)
    assert np.allclose(chart.zeta(np.ldexp(x, -1)), y + np.eye(3)[0], atol=1e-9)


def test_tube_radius_is_proportional_to_distance(frame3):
    y = np.array([0.3, 2.0, 0.0])
    x = frame3.zeta_inv(y)
    c = frame3.zeta_inv(np.array([0.3, 0.0, 0.0]))
    assert np.linalg.norm(x - c) == pytest.approx(frame3.theta0 * np.linalg.norm(c), rel=1e-9)


def test_core_points(radial3):
    assert np.allclose(radial3.sink, [0, 0, 2.0])
    assert np.allclose(radial3.saddle, [0, 0, 0.5])
    assert radial3.kind is ChartKind.RADIAL_EXPLICIT


def test_points_outside_the_tube(radial3, frame3):
    with pytest.raises(OutsideTube):
        radial3.zeta(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(OutsideTube):
        radial3.zeta(np.array([0.0, 0.0, -1.0]))
    with pytest.raises(ZeroPoint):
        frame3.zeta(np.zeros(3))
    with pytest.raises(OutsideCylinder):
        frame3.zeta_inv(np.array([0.0, 3.0, 0.0]))
    assert not frame3.contains(np.array([0.0, 0.0, 0.7]))


def test_frame_chart_needs_a_period(triple):
    with pytest.raises(ValueError):
        frame_chart(triple.a)


def test_model_diffeo_is_h_off_the_tube(frame3, rng):
    x = rng.normal(size=3)
    if frame3.contains(x):
        x = x + np.array([0.0, 0.0, 0.5])
    assert np.array_equal(model_diffeo(x, frame3), x / 2)


def test_model_diffeo_is_conjugate_to_the_flow(chart):
    y = np.array([0.2, 0.5, -0.3])
    x = chart.zeta_inv(y)
    assert np.allclose(chart.zeta(model_diffeo(x, chart)), time_one_map(y), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(cyl)
def test_model_diffeo_inverse(chart, t):
    x = chart.zeta_inv(_y(t))
    back = model_diffeo_inverse(model_diffeo(x, chart), chart)
    assert np.allclose(back, x, atol=1e-8 * max(1.0, np.linalg.norm(x)))


def test_branches_agree_where_the_flow_is_a_translation(chart, rng):
    for _ in range(50):
        y = np.array([rng.uniform(2.1, 5.0), *(rng.uniform(-1, 1, 2))])
        h_x, flow_x = model_diffeo_branches(chart.zeta_inv(y), chart)
        assert np.linalg.norm(h_x - flow_x) < 1e-6 * np.linalg.norm(h_x)


def test_dimension_four_frame_chart(wild_model):
    ch = frame_chart(wild_model, 4)
    y = np.array([0.4, 0.3, -0.2, 1.0])
    assert np.allclose(ch.zeta(ch.zeta_inv(y)), y, atol=1e-9)


def test_tube_mesh_shape(frame3):
    v, f = tube_mesh(frame3, rings=10, around=8)
    assert v.shape == (88, 3) and f.shape == (160, 3)
    assert f.min() == 0 and f.max() == len(v) - 1
    with pytest.raises(ValueError):
        tube_mesh(radial_chart(np.eye(4)[3]))
