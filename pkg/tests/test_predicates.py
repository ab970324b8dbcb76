from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from foxartin.predicates import (
    count_crossings,
    orient3d,
    orient3d_exact,
    segment_crosses_triangle,
)

pts = arrays(float, (4, 3), elements=st.floats(-10, 10, allow_nan=False))


def _det_fraction(a, b, c, d):
    m = [[Fraction(float(q)) - Fraction(float(p)) for p, q in zip(a, r)] for r in (b, c, d)]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


@given(pts)
def test_orient3d_matches_rational_determinant(p):
    d = _det_fraction(*p)
    assert orient3d(*p) == (d > 0) - (d < 0)


@given(pts)
def test_orient3d_is_antisymmetric(p):
    a, b, c, d = p
    assert orient3d(a, b, c, d) == -orient3d(b, a, c, d)


def test_orient3d_exact_on_near_degenerate_input():
    a = np.zeros(3)
    b = np.array([1.0, 0, 0])
    c = np.array([0, 1.0, 0])
    d = np.array([0.1, 0.1, 1e-300])
    assert orient3d(a, b, c, d) == 1
    assert orient3d_exact(a, b, c, np.array([0.3, 0.3, 0.0])) == 0


TRI = np.array([[0.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]])


def test_segment_through_triangle():
    assert segment_crosses_triangle([0.2, 0.2, -1], [0.2, 0.2, 1], *TRI)
    assert not segment_crosses_triangle([2, 2, -1], [2, 2, 1], *TRI)
    assert not segment_crosses_triangle([0.2, 0.2, 0.5], [0.2, 0.2, 1], *TRI)


def test_shared_edge_counts_once():
    # a segment through the common edge of two coplanar triangles hits exactly one
    t2 = np.array([[1.0, 0, 0], [0, 1.0, 0], [1.0, 1.0, 0]])
    seg = np.array([[[0.5, 0.5, -1.0], [0.5, 0.5, 1.0]]])
    assert count_crossings(seg, np.stack([TRI, t2])) == 1


@given(arrays(float, (2, 3), elements=st.floats(-2, 2)))
def test_batch_count_agrees_with_exact_predicate(seg):
    expected = int(segment_crosses_triangle(seg[0], seg[1], *TRI))
    assert count_crossings(seg[None], TRI[None]) == expected


def test_empty_inputs():
    assert count_crossings(np.empty((0, 2, 3)), TRI[None]) == 0
