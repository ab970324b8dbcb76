from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from foxartin.analysis import census
from foxartin.errors import OutsideDomain
from foxartin.geometry import Chart
from foxartin.surgery import (
    Gluing,
    Piece,
    TaggedPoint,
    Variant,
    _polar_dilate,
    control_samples,
    loop_winding,
    tagged_distance,
    wall_loop,
)

unit4 = arrays(float, 4, elements=st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(unit4, st.floats(0.2, 5.0))
def test_polar_dilation_stays_on_the_sphere_and_inverts(v, factor):
    u = v / np.linalg.norm(v)
    w = _polar_dilate(u, 3, factor)
    assert abs(np.linalg.norm(w) - 1.0) < 1e-12
    assert np.allclose(_polar_dilate(w, 3, 1.0 / factor), u, atol=1e-10)


def test_polar_dilation_moves_the_cone_to_the_equator():
    g = Gluing(0, 0.3, 3, Chart.SOUTH)
    u = np.array([math.sin(0.3), 0.0, 0.0, math.cos(0.3)])
    assert abs(g.forward(u)[3]) < 1e-15
    # the poles are fixed
    assert np.allclose(g.forward(np.eye(4)[3]), np.eye(4)[3])


@settings(max_examples=50)
@given(unit4, st.floats(0.5, 4.0), st.integers(-5, 5))
def test_gluing_commutes_with_h(v, r, k):
    g = Gluing(7, 0.2, 3, Chart.SOUTH)
    x = r * v / np.linalg.norm(v)
    assert np.allclose(g.forward(np.ldexp(x, -k)), np.ldexp(g.forward(x), -k), rtol=1e-14)
    assert np.allclose(g.backward(g.forward(x)), x, rtol=1e-12)


@pytest.fixture(params=["arc", "cylinder"])
def glued(request, surgery_arc, surgery_cylinder):
    return surgery_arc if request.param == "arc" else surgery_cylinder


def test_residuals_recorded(glued):
    res = glued.residuals
    assert res["equivariance"] < 1e-6
    assert res["round_trip"] < 1e-8
    assert res["alignment"] < 1e-6
    assert res["samples"] == 1000


def test_censuses(surgery_arc, surgery_cylinder):
    assert census(surgery_arc.classify()) == {"SADDLE": 2, "SINK": 3, "SOURCE": 1}
    reps = {r.name: r for r in surgery_cylinder.classify()}
    assert census(reps.values()) == {"SADDLE": 2, "SINK": 2, "SOURCE": 2}
    # running the left map backwards turns its saddle's index around
    assert reps["left_sigma"].label == "SADDLE(u=3)"
    assert reps["right_sigma"].label == "SADDLE(u=1)"


def test_shifts(surgery_arc, surgery_cylinder):
    a, c = surgery_arc, surgery_cylinder
    assert a.gluing.shift == a.left_spec.k_N + a.right_spec.k_S + 1
    assert c.gluing.shift == c.left_spec.k_N + c.right_spec.k_N + 1
    assert a.gluing.target_chart is Chart.SOUTH and c.gluing.target_chart is Chart.NORTH


def test_collar_points_transport_into_the_other_collar(glued, rng):
    lo, hi = glued.left_collar
    for _ in range(50):
        u = rng.normal(size=4)
        x = u / np.linalg.norm(u) * lo * 2 ** rng.uniform(0, 1)
        tp = TaggedPoint.make(Piece.LEFT, Chart.SOUTH, x)
        assert glued.in_collar(tp)
        other = glued.transport(tp)
        assert other.piece is Piece.RIGHT and glued.in_collar(other)


def test_step_round_trip(glued, rng):
    for tp in control_samples(glued, 40, rng):
        back = glued.apply_inverse(glued.apply(tp))
        assert tagged_distance(glued, tp, back) < 1e-8


def test_removed_cap_rejected(surgery_arc):
    far = TaggedPoint.make(Piece.LEFT, Chart.NORTH, np.zeros(4))
    assert surgery_arc.removed(far)
    with pytest.raises(OutsideDomain):
        surgery_arc.apply(far)


def test_controls_avoid_removed_caps(glued, rng):
    pts = control_samples(glued, 30, rng)
    assert len(pts) == 30 and not any(glued.removed(p) for p in pts)
    assert {p.piece for p in pts} == {Piece.LEFT, Piece.RIGHT}


def test_wall_loop_winds_once(surgery_cylinder):
    assert loop_winding(surgery_cylinder, wall_loop(surgery_cylinder)) == pytest.approx(1.0)


def test_variant_names():
    assert Variant("arc") is Variant.HETERO_ARC
    assert Variant("cylinder") is Variant.HETERO_CYLINDER
