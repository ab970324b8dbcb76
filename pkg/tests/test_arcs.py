from __future__ import annotations

import numpy as np
import pytest

from foxartin.arcs import (
    NEGATIVE_CONTROLS,
    PolylineArc,
    assemble_wild_arc,
    build_arc_triple,
    fiber_winding,
    junction_angle,
    mazur_knot,
    negative_control,
    polyline_min_distance,
    segment_disk_intersections,
    trivial_arc,
    trivial_arc_model,
    verify_conditions,
)
from foxartin.errors import ChainBroken, ConstructionFailed


def test_polyline_rejects_repeated_vertices():
    with pytest.raises(ValueError):
        PolylineArc(np.array([[0.0, 0, 0], [0.0, 0, 0], [1.0, 0, 0]]))


def test_polyline_basics():
    p = PolylineArc(np.array([[0.0, 0, 0], [3.0, 4, 0]]))
    assert p.length() == pytest.approx(5.0)
    assert np.array_equal(p.reversed().start, p.end)
    assert np.array_equal(p.scaled(0.5).end, [1.5, 2.0, 0.0])


def test_default_triple_passes_and_matches_endpoints(triple):
    rep = verify_conditions(triple)
    assert rep.all_pass, rep.failing()
    assert rep.witnesses["intersections_delta_a"] == 1
    assert rep.witnesses["intersections_delta_c"] == 1
    # endpoint bookkeeping: b runs from h(beta) to h(gamma)
    assert np.allclose(triple.b.start, triple.beta / 2)
    assert np.allclose(triple.b.end, triple.gamma / 2)


def test_triple_lies_in_the_open_shell(triple):
    for arc in (triple.a, triple.c):
        r = np.linalg.norm(arc.vertices[1:-1], axis=1)
        assert np.all((r > 0.5) & (r < 1.0))
        assert np.all(arc.vertices[:, 2] == 0.0)


def test_arcs_pairwise_disjoint(triple):
    assert polyline_min_distance(triple.a, triple.b) > 1e-3
    assert polyline_min_distance(triple.a, triple.c) > 1e-3
    assert polyline_min_distance(triple.b, triple.c) > 1e-3


@pytest.mark.parametrize("kind", sorted(NEGATIVE_CONTROLS))
def test_negative_controls_fail_their_condition(kind):
    rep = verify_conditions(negative_control(kind))
    assert NEGATIVE_CONTROLS[kind] in rep.failing()


def test_unknown_negative_control():
    with pytest.raises(ValueError):
        negative_control("nope")


def test_check_flag_raises_on_too_coarse_sampling():
    # 16 samples per arc is too coarse for the junction-smoothness check
    with pytest.raises(ConstructionFailed):
        build_arc_triple(16, check=True)


def test_junction_angle_of_straight_continuation():
    a = PolylineArc(np.array([[0.0, 0, 0], [1.0, 0, 0]]))
    b = PolylineArc(np.array([[1.0, 0, 0], [2.0, 0, 0]]))
    c = PolylineArc(np.array([[1.0, 0, 0], [1.0, 1, 0]]))
    assert junction_angle(a, b) == pytest.approx(0.0, abs=1e-12)
    assert junction_angle(a, c) == pytest.approx(90.0)


def test_segment_disk_intersections_counts_crossings(triple):
    assert segment_disk_intersections(triple.a, triple.delta) == 1
    assert segment_disk_intersections(triple.c, triple.delta) == 1
    assert segment_disk_intersections(triple.b.scaled(4.0), triple.delta) == 0


def test_assembly_is_a_connected_chain(wild_model):
    v = wild_model.assembled.vertices
    assert np.all(np.linalg.norm(np.diff(v, axis=0), axis=1) > 0)
    levels = np.unique(wild_model.levels)
    assert levels.tolist() == list(range(-3, 4))


def test_assembly_is_exactly_self_similar(wild_model):
    for k in range(-3, 3):
        assert np.array_equal(wild_model.level_portion(k) / 2, wild_model.level_portion(k + 1))


def test_level_outside_truncation(wild_model):
    with pytest.raises(ValueError):
        wild_model.level_portion(10)


def test_broken_chain_detected(triple):
    shifted = PolylineArc(triple.b.vertices + np.array([0.0, 0.0, 1e-3]))
    with pytest.raises(ChainBroken):
        assemble_wild_arc(triple.replace(b=shifted), 1)


def test_mazur_knot_closes_and_winds_once(wild_model):
    knot = mazur_knot(wild_model)
    assert knot.closure_gap < 1e-9
    assert knot.winding == 1.0
    assert abs(fiber_winding(knot.points) - knot.winding) < 1e-12


def test_trivial_arc_is_radial():
    u = np.array([0.0, 0.0, 0.0, 1.0])
    arc = trivial_arc(u, 2)
    assert np.allclose(arc.vertices[:, :3], 0.0)
    assert arc.start[3] == 4.0 and arc.end[3] == 0.125
    m = trivial_arc_model(u, 2)
    assert np.array_equal(m.level_portion(0) / 2, m.level_portion(1))
    with pytest.raises(ValueError):
        trivial_arc(np.array([0.0, 0.0, 2.0]), 1)
