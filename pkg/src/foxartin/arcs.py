"""The Fox-Artin arc: base points, the arcs a, b, c, the spanning disk Delta,
the assembled self-similar chain and its image (the Mazur knot) in S^2 x S^1.

The arcs a and c are planar clamped cubic splines drawn in polar coordinates.
b rides above/below the plane over the inner arc h(d), dipping through the
plane at 150 and 210 degrees; Delta is the ruled strip between h(d) and b, so
its trace in the plane is two radial spokes, each pierced by exactly one of
a and c.  Nothing is trusted by construction: ``verify_conditions`` re-derives
every condition from the sampled geometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ChainBroken, ConstructionFailed
from .geometry import CoveringPoint, covering_project
from .predicates import count_crossings

__all__ = [
    "PolylineArc",
    "TriangulatedDisk",
    "ArcTriple",
    "ConditionReport",
    "WildArcModel",
    "MazurKnot",
    "build_base_points",
    "build_arc_triple",
    "verify_conditions",
    "assemble_wild_arc",
    "trivial_arc",
    "trivial_arc_model",
    "mazur_knot",
    "segment_disk_intersections",
    "segment_distances",
    "polyline_min_distance",
    "junction_angle",
    "fiber_winding",
    "negative_control",
    "NEGATIVE_CONTROLS",
]

JUNCTION_TOL_DEG = 5.0

# (theta in degrees, radius) control points; tangents are clamped radial at the ends
_A_CONTROL = [(0, 1.0), (20, 0.76), (80, 0.67), (150, 0.66), (172, 0.70),
              (176, 0.8), (168, 0.89), (140, 0.9), (120, 1.0)]
_C_CONTROL = [(240, 1.0), (220, 0.9), (192, 0.89), (184, 0.8), (188, 0.70),
              (210, 0.66), (280, 0.66), (340, 0.57), (360, 0.5)]
_B_BULGE = 0.35   # radial excursion of b beyond h(d)
_B_HEIGHT = 0.2   # vertical excursion of b


@dataclass(frozen=True)
class PolylineArc:
    vertices: np.ndarray
    junction_smooth: np.ndarray | None = None
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError("a polyline needs at least two vertices")
        gaps = np.linalg.norm(np.diff(v, axis=0), axis=1)
        if np.any(gaps <= 1e-12 * max(1.0, float(np.abs(v).max()))):
            raise ValueError("consecutive vertices must be distinct")
        if self.closed and not np.array_equal(v[0], v[-1]):
            raise ValueError("closed polyline must repeat its first vertex")
        js = self.junction_smooth
        if js is None:
            js = np.ones(v.shape[0] - 2, dtype=bool)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "junction_smooth", np.asarray(js, dtype=bool))

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def segments(self) -> np.ndarray:
        return np.stack([self.vertices[:-1], self.vertices[1:]], axis=1)

    def scaled(self, factor: float) -> "PolylineArc":
        return PolylineArc(self.vertices * factor, self.junction_smooth, self.closed)

    def reversed(self) -> "PolylineArc":
        return PolylineArc(self.vertices[::-1], self.junction_smooth[::-1], self.closed)

    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1).sum())


@dataclass(frozen=True)
class TriangulatedDisk:
    vertices: np.ndarray      # (v, 3)
    faces: np.ndarray         # (f, 3) int, 0-based
    interior: np.ndarray      # (v,) bool; False on the boundary curve

    def triangles(self) -> np.ndarray:
        return self.vertices[self.faces]

    def boundary_edges(self) -> np.ndarray:
        edges = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]],
                                        self.faces[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        return uniq[counts == 1]


@dataclass(frozen=True)
class ArcTriple:
    a: PolylineArc
    b: PolylineArc
    c: PolylineArc
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    d: PolylineArc
    delta: TriangulatedDisk

    def replace(self, **changes) -> "ArcTriple":
        fields = {k: getattr(self, k) for k in
                  ("a", "b", "c", "alpha", "beta", "gamma", "d", "delta")}
        fields.update(changes)
        return ArcTriple(**fields)


@dataclass
class ConditionReport:
    """Per-condition verdicts plus the witness quantities behind them."""

    condition1: bool
    condition2: bool
    condition3: bool
    endpoints_ok: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3 and self.endpoints_ok

    def failing(self) -> list[str]:
        names = ("condition1", "condition2", "condition3", "endpoints_ok")
        return [n for n in names if not getattr(self, n)]

    def as_dict(self) -> dict:
        return {
            "condition1": self.condition1,
            "condition2": self.condition2,
            "condition3": self.condition3,
            "endpoints_ok": self.endpoints_ok,
            "all_pass": self.all_pass,
            "witnesses": self.witnesses,
        }


@dataclass(frozen=True)
class WildArcModel:
    """Truncated h-invariant arc.

    ``generator`` is one connected fundamental period of the arc (for the
    Fox-Artin arc: a, then h^{-1}(b), then c, running from alpha to h(alpha));
    ``assembled`` is the union of its images under h^k, k = -K..K, ordered from
    the outermost copy inward.  ``levels[i]`` is the copy index of segment i.
    """

    generator: PolylineArc
    K: int
    assembled: PolylineArc
    levels: np.ndarray
    triple: ArcTriple | None = None
    includes_origin_limit: bool = True

    def level_portion(self, k: int) -> np.ndarray:
        """Vertices of the copy h^k(generator) inside the assembled chain."""
        seg = np.nonzero(self.levels == k)[0]
        if seg.size == 0:
            raise ValueError(f"level {k} is outside the truncation")
        return self.assembled.vertices[seg[0]:seg[-1] + 2]


@dataclass(frozen=True)
class MazurKnot:
    points: list
    closure_gap: float
    winding: float

    @property
    def directions(self) -> np.ndarray:
        return np.array([p.direction for p in self.points])

    @property
    def fibers(self) -> np.ndarray:
        return np.array([p.fiber for p in self.points])


# --------------------------------------------------------------------------
# sampling helpers


def _cosine_params(n: int) -> np.ndarray:
    """n+1 parameters in [0, 1], clustered at both ends."""
    return 0.5 * (1.0 - np.cos(np.pi * np.arange(n + 1) / n))


def _polar_spline(control, d0, d1, n: int) -> np.ndarray:
    P = np.array([(math.radians(t), r) for t, r in control])
    L = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(P, axis=0), axis=1))])
    spline = CubicSpline(L / L[-1], P, bc_type=((1, np.asarray(d0) * L[-1]),
                                                 (1, np.asarray(d1) * L[-1])))
    q = spline(_cosine_params(n))
    return np.column_stack([q[:, 1] * np.cos(q[:, 0]), q[:, 1] * np.sin(q[:, 0]),
                            np.zeros(len(q))])


def _b_curve(s: np.ndarray) -> np.ndarray:
    w = 3 * s**2 - 2 * s**3
    theta = np.radians(120.0 + 120.0 * w)
    rho = 0.5 + _B_BULGE * np.sin(np.pi * s)
    z = _B_HEIGHT * np.sin(np.pi * s) ** 2 * np.cos(2 * np.pi * w)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])


def _circle_arc(s: np.ndarray, radius: float) -> np.ndarray:
    w = 3 * s**2 - 2 * s**3
    theta = np.radians(120.0 + 120.0 * w)
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(len(s))])


def _strip_disk(inner: np.ndarray, outer: np.ndarray, rows: int) -> TriangulatedDisk:
    """Ruled strip (1-t) inner + t outer; inner and outer share both end vertices."""
    n = len(inner) - 1
    t = np.linspace(0.0, 1.0, rows + 1)
    verts = [inner[0]]
    interior = [False]
    index = np.zeros((n + 1, rows + 1), dtype=int)
    for i in range(1, n):
        for j in range(rows + 1):
            index[i, j] = len(verts)
            verts.append((1 - t[j]) * inner[i] + t[j] * outer[i])
            interior.append(0 < j < rows)
    index[n, :] = len(verts)
    verts.append(inner[n])
    interior.append(False)
    faces = []
    for i in range(n):
        for j in range(rows):
            p, q, r, s = index[i, j], index[i + 1, j], index[i + 1, j + 1], index[i, j + 1]
            for tri in ((p, q, r), (p, r, s)):
                if len(set(tri)) == 3:
                    faces.append(tri)
    return TriangulatedDisk(np.array(verts), np.array(faces, dtype=int), np.array(interior))


# --------------------------------------------------------------------------
# construction


def build_base_points(samples: int = 64):
    """alpha, beta, gamma equally spaced on the unit circle F_2, and the arc d
    of F_2 from beta to gamma through (-1, 0, 0)."""
    alpha = np.array([1.0, 0.0, 0.0])
    beta = np.array([-0.5, math.sqrt(3) / 2, 0.0])
    gamma = np.array([-0.5, -math.sqrt(3) / 2, 0.0])
    d = _circle_arc(_cosine_params(samples), 1.0)
    d[0], d[-1] = beta, gamma
    return alpha, beta, gamma, PolylineArc(d)


def build_arc_triple(samples_per_arc: int = 64, *, check: bool = True) -> ArcTriple:
    if samples_per_arc < 16:
        raise ValueError("samples_per_arc must be at least 16")
    n = samples_per_arc
    alpha, beta, gamma, d = build_base_points(n)
    a = _polar_spline(_A_CONTROL, (0, -1), (0, 1), n)
    a[0], a[-1] = alpha, beta
    c = _polar_spline(_C_CONTROL, (0, -1), (0, -1), n)
    c[0], c[-1] = gamma, alpha / 2
    s = _cosine_params(n)
    b = _b_curve(s)
    b[0], b[-1] = beta / 2, gamma / 2
    hd = d.vertices / 2
    delta = _strip_disk(hd, b, rows=max(4, n // 8))
    triple = ArcTriple(PolylineArc(a), PolylineArc(b), PolylineArc(c),
                       alpha, beta, gamma, d, delta)
    if check:
        report = verify_conditions(triple)
        if not report.all_pass:
            raise ConstructionFailed(f"generated triple fails {report.failing()}")
    return triple


NEGATIVE_CONTROLS = {
    "chord": "condition2",     # b replaced by the straight chord h(beta) -> h(gamma)
    "offplane": "condition1",  # interior of a lifted out of the plane x_3 = 0
}


def negative_control(kind: str, samples_per_arc: int = 64) -> ArcTriple:
    """A deliberately broken triple; ``NEGATIVE_CONTROLS[kind]`` names the
    condition it is built to violate."""
    t = build_arc_triple(samples_per_arc, check=False)
    if kind == "chord":
        s = _cosine_params(samples_per_arc)[:, None]
        chord = (1 - s) * (t.beta / 2) + s * (t.gamma / 2)
        delta = _strip_disk(t.d.vertices / 2, chord, rows=max(4, samples_per_arc // 8))
        return t.replace(b=PolylineArc(chord), delta=delta)
    if kind == "offplane":
        a = t.a.vertices.copy()
        a[1:-1, 2] += 0.05
        return t.replace(a=PolylineArc(a))
    raise ValueError(f"unknown negative control {kind!r}; choose from {sorted(NEGATIVE_CONTROLS)}")


# --------------------------------------------------------------------------
# distances and intersection counting


def segment_distances(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Pairwise minimum distances between segments ``(m, 2, d)`` and ``(k, 2, d)``."""
    p1, q1 = s1[:, None, 0, :], s1[:, None, 1, :]
    p2, q2 = s2[None, :, 0, :], s2[None, :, 1, :]
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a = np.sum(d1 * d1, axis=-1)
    e = np.sum(d2 * d2, axis=-1)
    f = np.sum(d2 * r, axis=-1)
    c = np.sum(d1 * r, axis=-1)
    b = np.sum(d1 * d2, axis=-1)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-300, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        t_clipped = np.clip(t, 0.0, 1.0)
        s = np.where(t != t_clipped, np.clip((b * t_clipped - c) / a, 0.0, 1.0), s)
    c1 = p1 + s[..., None] * d1
    c2 = p2 + t_clipped[..., None] * d2
    return np.linalg.norm(c1 - c2, axis=-1)


def polyline_min_distance(x: PolylineArc, y: PolylineArc, chunk: int = 512) -> float:
    sx, sy = x.segments(), y.segments()
    best = np.inf
    for i in range(0, len(sx), chunk):
        best = min(best, float(segment_distances(sx[i:i + chunk], sy).min()))
    return best


def _direction(v):
    return v / np.linalg.norm(v)


def junction_angle(incoming: PolylineArc, outgoing: PolylineArc) -> float:
    """Turning angle in degrees where ``incoming`` ends and ``outgoing`` begins."""
    t0 = _direction(incoming.vertices[-1] - incoming.vertices[-2])
    t1 = _direction(outgoing.vertices[1] - outgoing.vertices[0])
    return math.degrees(math.acos(max(-1.0, min(1.0, float(t0 @ t1)))))


def segment_disk_intersections(arc: PolylineArc, disk) -> int:
    """Transversal crossings of the polyline with a triangulated disk.

    ``disk`` is a :class:`TriangulatedDisk` or a ``(t, 3, 3)`` triangle array.
    """
    tris = disk.triangles() if isinstance(disk, TriangulatedDisk) else np.asarray(disk)
    return count_crossings(arc.segments(), tris)


# --------------------------------------------------------------------------
# verification


def verify_conditions(t: ArcTriple) -> ConditionReport:
    w: dict = {}
    tol = 1e-9

    # endpoints: a: alpha->beta, b: h(beta)->h(gamma), c: gamma->h(alpha)
    ends = [
        np.linalg.norm(t.a.start - t.alpha), np.linalg.norm(t.a.end - t.beta),
        np.linalg.norm(t.b.start - t.beta / 2), np.linalg.norm(t.b.end - t.gamma / 2),
        np.linalg.norm(t.c.start - t.gamma), np.linalg.norm(t.c.end - t.alpha / 2),
    ]
    w["endpoint_error"] = float(max(ends))
    endpoints_ok = w["endpoint_error"] <= tol

    # condition 1: a, c planar, interiors strictly inside 1/2 < |x| < 1; pairwise disjoint
    planar = max(float(np.abs(t.a.vertices[:, 2]).max()), float(np.abs(t.c.vertices[:, 2]).max()))
    r_int = np.concatenate([np.linalg.norm(t.a.vertices[1:-1], axis=1),
                            np.linalg.norm(t.c.vertices[1:-1], axis=1)])
    gap_f2 = float(np.minimum(1.0 - r_int, r_int - 0.5).min())
    d_ab = polyline_min_distance(t.a, t.b)
    d_ac = polyline_min_distance(t.a, t.c)
    d_bc = polyline_min_distance(t.b, t.c)
    r_b = np.linalg.norm(t.b.vertices[1:-1], axis=1)
    b_in_shell = float(np.minimum(1.0 - r_b, r_b - 0.5).min())
    w.update(planarity=planar, interior_gap_to_boundary=gap_f2, dist_ab=d_ab,
             dist_ac=d_ac, dist_bc=d_bc, b_interior_gap_to_boundary=b_in_shell)
    condition1 = planar <= 1e-12 and gap_f2 > 0 and min(d_ab, d_ac, d_bc) > 0 and b_in_shell > 0

    # condition 2: Delta spans b u h(d), interior avoids both spheres, meets a and c once
    dv = t.delta.vertices
    r_d = np.linalg.norm(dv[t.delta.interior], axis=1)
    delta_gap = float(np.minimum(1.0 - r_d, r_d - 0.5).min()) if r_d.size else 0.0
    bnd = np.unique(t.delta.boundary_edges())
    curve = np.concatenate([t.b.vertices, t.d.vertices / 2])
    bnd_err = float(max(np.min(np.linalg.norm(curve - dv[i], axis=1)) for i in bnd))
    covered = float(max(np.min(np.linalg.norm(dv[bnd] - p, axis=1)) for p in curve))
    n_a = segment_disk_intersections(t.a, t.delta)
    n_c = segment_disk_intersections(t.c, t.delta)
    w.update(intersections_delta_a=n_a, intersections_delta_c=n_c,
             delta_interior_gap_to_boundary=delta_gap,
             delta_boundary_error=max(bnd_err, covered))
    condition2 = n_a == 1 and n_c == 1 and delta_gap > 0 and max(bnd_err, covered) <= tol

    # condition 3: components of (a u b u c) u h(a u b u c) are smooth arcs; the
    # junctions are h(alpha): c -> h(a), h(beta): h(a) -> b, h(gamma): b -> h(c)
    ha, hc = t.a.scaled(0.5), t.c.scaled(0.5)
    angles = {
        "h(alpha)": junction_angle(t.c, ha),
        "h(beta)": junction_angle(ha, t.b),
        "h(gamma)": junction_angle(t.b, hc),
    }
    w["junction_angles_deg"] = angles
    w["worst_junction_angle_deg"] = max(angles.values())
    condition3 = w["worst_junction_angle_deg"] < JUNCTION_TOL_DEG

    return ConditionReport(bool(condition1), bool(condition2), bool(condition3),
                           bool(endpoints_ok), _plain(w))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# --------------------------------------------------------------------------
# assembly


def _generator_chain(t: ArcTriple) -> PolylineArc:
    a, hb, c = t.a.vertices, t.b.vertices * 2.0, t.c.vertices
    for x, y in ((a[-1], hb[0]), (hb[-1], c[0])):
        if np.linalg.norm(x - y) > 1e-9:
            raise ChainBroken("generator pieces do not share endpoints")
    verts = np.concatenate([a, hb[1:], c[1:]])
    smooth = np.ones(len(verts) - 2, dtype=bool)
    return PolylineArc(verts, smooth)


def _stack_copies(gen: PolylineArc, K: int) -> tuple[PolylineArc, np.ndarray]:
    parts, levels = [], []
    prev_end = None
    for k in range(-K, K + 1):
        v = np.ldexp(gen.vertices, -k)
        if prev_end is not None:
            if np.linalg.norm(v[0] - prev_end) > 1e-9 * max(1.0, np.linalg.norm(prev_end)):
                raise ChainBroken(f"copy {k} does not start where copy {k - 1} ends")
            v = v[1:]
        parts.append(v)
        levels.append(np.full(len(gen.vertices) - 1, k))
        prev_end = parts[-1][-1]
    return PolylineArc(np.concatenate(parts)), np.concatenate(levels)


def assemble_wild_arc(t: ArcTriple, K: int) -> WildArcModel:
    """Union of h^k of the connected period a u h^{-1}(b) u c, k = -K..K.

    Setwise this is the union of h^k(a u b u c) with b's index shifted by one,
    which keeps the truncated chain connected.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    gen = _generator_chain(t)
    assembled, levels = _stack_copies(gen, K)
    return WildArcModel(gen, K, assembled, levels, triple=t)


def trivial_arc(direction, K: int, per_shell: int = 16) -> PolylineArc:
    """Radial segment {s u : 2^{-K-1} <= s <= 2^K}, sampled geometrically."""
    u = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    m = per_shell * (2 * K + 1)
    exps = (K - np.arange(m + 1) / per_shell)
    return PolylineArc(np.exp2(exps)[:, None] * u[None, :])


def trivial_arc_model(direction, K: int, per_shell: int = 16) -> WildArcModel:
    u = np.asarray(direction, dtype=float)
    gen = PolylineArc(np.exp2(-np.arange(per_shell + 1) / per_shell)[:, None] * u[None, :])
    assembled, levels = _stack_copies(gen, K)
    return WildArcModel(gen, K, assembled, levels, triple=None)


def mazur_knot(m: WildArcModel) -> MazurKnot:
    """Project one period of the arc to S^{n-1} x S^1; the result is a closed curve."""
    pts = [covering_project(v) for v in m.generator.vertices]
    first, last = pts[0], pts[-1]
    dfib = abs(first.fiber - last.fiber)
    gap = max(float(np.linalg.norm(first.direction - last.direction)), min(dfib, 1.0 - dfib))
    fib = np.array([p.fiber for p in pts])
    steps = np.diff(fib)
    steps = (steps + 0.5) % 1.0 - 0.5
    winding = float(steps.sum())
    closed = pts[:-1] + [first]
    return MazurKnot(closed, gap, winding)


def fiber_winding(points: list[CoveringPoint]) -> float:
    fib = np.array([p.fiber for p in points])
    steps = (np.diff(fib) + 0.5) % 1.0 - 0.5
    return float(steps.sum())
