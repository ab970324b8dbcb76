"""Exact orientation predicates and segment/triangle crossing counts.

Orientation determinants are first evaluated in floating point with a static
error bound; only the undecided cases are redone in exact rational arithmetic.
Degenerate configurations are resolved by translating the whole segment set by
``eps * _PERTURB`` and taking the sign of the lowest-order nonzero coefficient
in ``eps`` (a symbolic perturbation: nothing is actually moved).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DegenerateAfterPerturbation

__all__ = ["orient3d", "orient3d_exact", "segment_crosses_triangle", "count_crossings"]

# generic direction; dyadic so it converts to Fraction exactly
_PERTURB = np.array([0.5772156649015329, 0.3183098861837907, 0.7071067811865476])
_ERRBOUND = 1e-12


def _det3(u, v, w):
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _frac(p):
    return [Fraction(float(c)) for c in p]


def orient3d_exact(a, b, c, d) -> int:
    """Exact sign of det[b - a, c - a, d - a]."""
    a, b, c, d = map(_frac, (a, b, c, d))
    det = _det3(_sub(b, a), _sub(c, a), _sub(d, a))
    return (det > 0) - (det < 0)


def orient3d(a, b, c, d) -> int:
    a, b, c, d = (np.asarray(p, dtype=float) for p in (a, b, c, d))
    u, v, w = b - a, c - a, d - a
    det = float(np.dot(u, np.cross(v, w)))
    perm = float(np.dot(np.abs(u), np.abs(v)[[1, 2, 0]] * np.abs(w)[[2, 0, 1]]
                        + np.abs(v)[[2, 0, 1]] * np.abs(w)[[1, 2, 0]]))
    if abs(det) > _ERRBOUND * perm:
        return 1 if det > 0 else -1
    return orient3d_exact(a, b, c, d)


def _perturbed_sign(d0, d1) -> int:
    if d0 != 0:
        return (d0 > 0) - (d0 < 0)
    if d1 != 0:
        return (d1 > 0) - (d1 < 0)
    raise DegenerateAfterPerturbation("orientation stays zero under perturbation")


def _plane_side(a, b, c, p, v) -> int:
    # orient(a, b, c, p + eps v) = D0 + eps * det[b-a, c-a, v]
    ba, ca = _sub(b, a), _sub(c, a)
    return _perturbed_sign(_det3(ba, ca, _sub(p, a)), _det3(ba, ca, v))


def _edge_side(p, q, a, b, v) -> int:
    # orient(p + eps v, q + eps v, a, b) = det[q-p, a-p-eps v, b-p-eps v]
    qp, ap, bp = _sub(q, p), _sub(a, p), _sub(b, p)
    d0 = _det3(qp, ap, bp)
    d1 = -(_det3(qp, v, bp) + _det3(qp, ap, v))
    return _perturbed_sign(d0, d1)


def segment_crosses_triangle(p, q, a, b, c) -> bool:
    """Whether the (perturbed) open segment pq crosses the open triangle abc."""
    p, q, a, b, c = map(_frac, (p, q, a, b, c))
    v = _frac(_PERTURB)
    if _plane_side(a, b, c, p, v) == _plane_side(a, b, c, q, v):
        return False
    s1 = _edge_side(p, q, a, b, v)
    s2 = _edge_side(p, q, b, c, v)
    s3 = _edge_side(p, q, c, a, v)
    return s1 == s2 == s3


def _orient_batch(a, b, c, d):
    u, v, w = b - a, c - a, d - a
    det = np.einsum("ij,ij->i", u, np.cross(v, w))
    au, av, aw = np.abs(u), np.abs(v), np.abs(w)
    perm = np.einsum("ij,ij->i", au, av[:, [1, 2, 0]] * aw[:, [2, 0, 1]]
                     + av[:, [2, 0, 1]] * aw[:, [1, 2, 0]])
    sign = np.sign(det).astype(int)
    sign[np.abs(det) <= _ERRBOUND * perm] = 0  # undecided
    return sign


def count_crossings(segments: np.ndarray, triangles: np.ndarray) -> int:
    """Number of transversal crossings between segments ``(m, 2, 3)`` and
    triangles ``(t, 3, 3)``.

    A bounding-box prefilter and vectorized float predicates decide almost all
    pairs; pairs with any undecided sign go through the exact path.
    """
    segments = np.asarray(segments, dtype=float)
    triangles = np.asarray(triangles, dtype=float)
    if segments.size == 0 or triangles.size == 0:
        return 0
    slo, shi = segments.min(axis=1), segments.max(axis=1)
    tlo, thi = triangles.min(axis=1), triangles.max(axis=1)
    si, ti = np.nonzero(
        np.all(slo[:, None, :] <= thi[None, :, :], axis=2)
        & np.all(tlo[None, :, :] <= shi[:, None, :], axis=2)
    )
    if si.size == 0:
        return 0
    p, q = segments[si, 0], segments[si, 1]
    a, b, c = triangles[ti, 0], triangles[ti, 1], triangles[ti, 2]
    sp = _orient_batch(a, b, c, p)
    sq = _orient_batch(a, b, c, q)
    e1 = _orient_batch(p, q, a, b)
    e2 = _orient_batch(p, q, b, c)
    e3 = _orient_batch(p, q, c, a)
    decided = (sp != 0) & (sq != 0) & (e1 != 0) & (e2 != 0) & (e3 != 0)
    hits = decided & (sp != sq) & (e1 == e2) & (e2 == e3)
    count = int(hits.sum())
    for j in np.nonzero(~decided)[0]:
        count += segment_crosses_triangle(p[j], q[j], a[j], b[j], c[j])
    return count
