"""Glued diffeomorphisms of S^4 built from two model sphere maps.

Both pieces are 4-dimensional sphere maps: LEFT is the map of a straight ray
(the trivial arc, along e_4) and RIGHT the map of the Fox-Artin arc.  A polar
cap is cut from each and the remaining spheres are identified along annular
collars by an h-equivariant gluing.

* ``HETERO_ARC``: left keeps S^4 minus its N-cap, right keeps S^4 minus its
  S-cap, the gluing goes from left theta_S coordinates (near N) to right
  theta_S coordinates (near S) and intertwines phi_left with phi_right.
* ``HETERO_CYLINDER``: the left piece runs backwards (phi_left^{-1}), the right
  keeps S^4 minus its N-cap and the gluing lands in right theta_N coordinates.

The gluing is w = 2^{-m} |x| psi(x / |x|), where psi is the conformal map of
S^3 that fixes +-e_4 and moves polar angle theta to theta' with
tan(theta'/2) = tan(theta/2) / tan(theta*/2).  It carries the cone
{theta = theta*} -- the left saddle's stable set near N -- onto the hyperplane
x_4 = 0, and it commutes with h exactly because it is positively homogeneous.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import FixedPointReport, classify_fixed_point, heteroclinic_test
from .errors import GluingFailed, OutsideDomain
from .flow import DEFAULT_DT
from .geometry import ZERO_NORM, Chart, ChartPoint, chart_transition, stereo_to_plane
from .sphere import (
    SWAP_THRESHOLD,
    SphereMapSpec,
    fox_artin_sphere_map,
    sphere_distance,
    sphere_map_apply,
    sphere_map_inverse,
    stable_wall_radius,
    trivial_sphere_map,
)

__all__ = [
    "Variant",
    "Piece",
    "TaggedPoint",
    "Gluing",
    "SurgeredMap",
    "build_surgery",
    "apply_surgered",
    "apply_surgered_inverse",
    "tagged_distance",
    "witness_samples",
    "control_samples",
    "heteroclinic_witnesses",
    "loop_winding",
    "wall_loop",
    "COLLAR_TOL",
    "EQUIVARIANCE_TOL",
]

EQUIVARIANCE_TOL = 1e-6
ROUND_TRIP_TOL = 1e-8
ALIGNMENT_TOL = 1e-6
COLLAR_TOL = 1e-7


class Variant(enum.Enum):
    HETERO_ARC = "arc"
    HETERO_CYLINDER = "cylinder"


class Piece(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def other(self) -> "Piece":
        return Piece.RIGHT if self is Piece.LEFT else Piece.LEFT


@dataclass(frozen=True)
class TaggedPoint:
    piece: Piece
    point: ChartPoint

    @classmethod
    def make(cls, piece: Piece, chart: Chart, coords) -> "TaggedPoint":
        return cls(piece, ChartPoint(chart, np.asarray(coords, dtype=float)).canonical(SWAP_THRESHOLD))

    def in_chart(self, chart: Chart) -> np.ndarray:
        return self.point.in_chart(chart).coords

    def as_dict(self) -> dict:
        return {"piece": self.piece.name, "chart": self.point.chart.name,
                "coords": [float(c) for c in self.point.coords]}


def _chart_radius(p: ChartPoint, chart: Chart) -> float:
    r = float(np.linalg.norm(p.coords))
    if p.chart is chart:
        return r
    return math.inf if r <= ZERO_NORM else 1.0 / r


def _coords(p: ChartPoint, chart: Chart) -> np.ndarray:
    return p.coords if p.chart is chart else chart_transition(p.coords)


# --------------------------------------------------------------------------
# the gluing


def _polar_dilate(u: np.ndarray, axis: int, factor: float) -> np.ndarray:
    """Conformal map of the unit sphere fixing +-e_axis that multiplies
    tan(theta/2) by ``factor`` (theta = angle from e_axis)."""
    ua = float(u[axis])
    t = u.copy()
    t[axis] = 0.0
    out = np.empty_like(u)
    if ua >= 0.0:
        p = t * (factor / (1.0 + ua))  # stereographic from -e_axis, dilated
        q = float(p @ p)
        out[:] = 2.0 * p / (1.0 + q)
        out[axis] = (1.0 - q) / (1.0 + q)
    else:
        p = t / (factor * (1.0 - ua))  # stereographic from +e_axis
        q = float(p @ p)
        out[:] = 2.0 * p / (1.0 + q)
        out[axis] = -(1.0 - q) / (1.0 + q)
    return out


@dataclass(frozen=True)
class Gluing:
    """Positively homogeneous collar identification x -> 2^{-m} |x| psi(x/|x|).

    Source: LEFT theta_S coordinates.  Target: RIGHT coordinates in
    ``target_chart``.
    """

    shift: int
    cone_angle: float
    axis: int
    target_chart: Chart

    @property
    def factor(self) -> float:
        return 1.0 / math.tan(0.5 * self.cone_angle)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r <= ZERO_NORM:
            raise GluingFailed("the gluing is not defined at the chart origin")
        return np.ldexp(r * _polar_dilate(x / r, self.axis, self.factor), -self.shift)

    def backward(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        r = float(np.linalg.norm(w))
        if r <= ZERO_NORM:
            raise GluingFailed("the gluing is not defined at the chart origin")
        return np.ldexp(r * _polar_dilate(w / r, self.axis, 1.0 / self.factor), self.shift)

    def as_dict(self) -> dict:
        return {"shift": self.shift, "cone_angle": self.cone_angle, "axis": self.axis,
                "target_chart": self.target_chart.name}


# --------------------------------------------------------------------------
# the glued map


@dataclass(frozen=True)
class SurgeredMap:
    variant: Variant
    left_spec: SphereMapSpec
    right_spec: SphereMapSpec
    gluing: Gluing
    fixed_points: dict                 # name -> TaggedPoint
    sigma1: TaggedPoint                 # forward limit of the heteroclinic set
    sigma2: TaggedPoint                 # backward limit
    residuals: dict = field(default_factory=dict)

    # left collar: theta_S radii [2^{kl}, 2^{kl+1}]; beyond is removed
    @property
    def left_collar(self) -> tuple[float, float]:
        k = self.left_spec.k_N
        return math.ldexp(1.0, k), math.ldexp(1.0, k + 1)

    @property
    def right_keep_k(self) -> int:
        r = self.right_spec
        return r.k_S if self.variant is Variant.HETERO_ARC else r.k_N

    # right collar: target-chart radii [2^{-kr-1}, 2^{-kr}]; inside is removed
    @property
    def right_collar(self) -> tuple[float, float]:
        k = self.right_keep_k
        return math.ldexp(1.0, -k - 1), math.ldexp(1.0, -k)

    def left_radius(self, p: ChartPoint) -> float:
        return _chart_radius(p, Chart.SOUTH)

    def right_radius(self, p: ChartPoint) -> float:
        return _chart_radius(p, self.gluing.target_chart)

    def removed(self, tp: TaggedPoint) -> bool:
        if tp.piece is Piece.LEFT:
            return self.left_radius(tp.point) > self.left_collar[1]
        return self.right_radius(tp.point) < self.right_collar[0]

    def in_collar(self, tp: TaggedPoint) -> bool:
        if tp.piece is Piece.LEFT:
            lo, hi = self.left_collar
            return lo <= self.left_radius(tp.point) <= hi
        lo, hi = self.right_collar
        return lo <= self.right_radius(tp.point) <= hi

    def transport(self, tp: TaggedPoint) -> TaggedPoint:
        """Move a point to the other piece through the (extended) gluing."""
        g = self.gluing
        if tp.piece is Piece.LEFT:
            w = g.forward(_coords(tp.point, Chart.SOUTH))
            return TaggedPoint.make(Piece.RIGHT, g.target_chart, w)
        x = g.backward(_coords(tp.point, g.target_chart))
        return TaggedPoint.make(Piece.LEFT, Chart.SOUTH, x)

    def _piece_step(self, piece: Piece, p: ChartPoint, forward: bool) -> ChartPoint:
        if piece is Piece.LEFT:
            spec = self.left_spec
            # the cylinder variant runs the left map backwards
            forward = forward if self.variant is Variant.HETERO_ARC else not forward
        else:
            spec = self.right_spec
        return (sphere_map_apply if forward else sphere_map_inverse)(spec, p)

    def _settle(self, tp: TaggedPoint) -> TaggedPoint:
        if self.removed(tp):
            tp = self.transport(tp)
            if self.removed(tp):
                raise GluingFailed("point falls into both removed caps")
        if tp.piece is Piece.RIGHT and self.in_collar(tp):
            tp = self.transport(tp)
        return tp

    def step(self, tp: TaggedPoint, forward: bool = True, check_collar: bool = True) -> TaggedPoint:
        if self.removed(tp):
            raise OutsideDomain(f"point lies in the removed cap of the {tp.piece.name} piece")
        if tp.piece is Piece.RIGHT and self.in_collar(tp):
            tp = self.transport(tp)
        out = self._settle(TaggedPoint(tp.piece, self._piece_step(tp.piece, tp.point, forward)))
        if check_collar and self.in_collar(tp):
            alt_in = self.transport(tp)
            alt = self._settle(TaggedPoint(alt_in.piece, self._piece_step(alt_in.piece, alt_in.point, forward)))
            gap = tagged_distance(self, out, alt)
            if gap > COLLAR_TOL:
                raise GluingFailed(f"collar branches disagree by {gap:.3e}")
        return out

    def apply(self, tp: TaggedPoint) -> TaggedPoint:
        return self.step(tp, True)

    def apply_inverse(self, tp: TaggedPoint) -> TaggedPoint:
        return self.step(tp, False)

    def local_map(self, piece: Piece, chart: Chart, inverse: bool = False):
        """The glued map read in one chart of one piece: coords -> coords."""

        def f(coords):
            tp = TaggedPoint(piece, ChartPoint(chart, np.asarray(coords, dtype=float)))
            out = self.step(tp, not inverse, check_collar=False)
            if out.piece is not piece:
                out = self.transport(out)
            return _coords(out.point, chart)

        return f

    def classify(self) -> list[FixedPointReport]:
        reports = []
        for name, tp in self.fixed_points.items():
            f = self.local_map(tp.piece, tp.point.chart)
            reports.append(classify_fixed_point(f, tp.point.coords, name=name, location=tp,
                                                residual_tol=1e-6))
        return reports


def apply_surgered(m: SurgeredMap, x: TaggedPoint) -> TaggedPoint:
    return m.apply(x)


def apply_surgered_inverse(m: SurgeredMap, x: TaggedPoint) -> TaggedPoint:
    return m.apply_inverse(x)


def tagged_distance(m: SurgeredMap, p: TaggedPoint, q: TaggedPoint) -> float:
    """Distance in p's piece (sphere embedding); q is carried over if needed."""
    if q.piece is not p.piece:
        q = m.transport(q)
    return sphere_distance(p.point, q.point)


# --------------------------------------------------------------------------
# construction and certification


def _collar_samples(m: SurgeredMap, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, _ = m.left_collar
    dirs = rng.normal(size=(n, m.left_spec.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rad = lo * np.exp2(rng.uniform(0.0, 1.0, size=n))
    return dirs * rad[:, None]


def gluing_residuals(m: SurgeredMap, n: int = 1000, seed: int = 0) -> dict:
    """Equivariance, round-trip and stable-set alignment residuals of the gluing."""
    rng = np.random.default_rng(seed)
    xs = _collar_samples(m, n, rng)
    g = m.gluing
    left = m.left_spec.chart_map(Chart.SOUTH, inverse=m.variant is Variant.HETERO_CYLINDER)
    right = m.right_spec.chart_map(g.target_chart)
    equiv = max(float(np.linalg.norm(g.forward(left(x)) - right(g.forward(x)))) for x in xs)
    trip = 0.0
    for x in xs:
        tp = TaggedPoint.make(Piece.LEFT, Chart.SOUTH, x)
        back = m.transport(m.transport(tp))
        trip = max(trip, sphere_distance(tp.point, back.point))

    # left stable set on the collar: the cone at polar angle theta* about e_4
    left_chart = m.left_spec.tube_chart
    rho = stable_wall_radius(dt=m.left_spec.dt)
    lo, hi = m.left_collar
    y1 = np.linspace(-math.log2(hi) + 1e-3, -math.log2(lo) - 1e-3, 40)
    ang = 2 * math.pi * np.arange(24) / 24
    align = 0.0
    dim = left_chart.dim
    for s in y1:
        for a in ang:
            v = np.zeros(dim)
            v[0] = s
            v[1], v[2] = rho * math.cos(a), rho * math.sin(a)
            w = g.forward(left_chart.zeta_inv(v))
            align = max(align, abs(float(w[g.axis])))
    return {"equivariance": equiv, "round_trip": trip, "alignment": align, "samples": n}


def _fixed_points(variant: Variant, left: SphereMapSpec, right: SphereMapSpec) -> dict:
    L, R = left.fixed_points, right.fixed_points
    pts = {
        "left_omega": TaggedPoint(Piece.LEFT, L["omega"]),
        "left_S": TaggedPoint(Piece.LEFT, L["S"]),
        "left_sigma": TaggedPoint(Piece.LEFT, L["sigma"]),
        "right_omega": TaggedPoint(Piece.RIGHT, R["omega"]),
        "right_sigma": TaggedPoint(Piece.RIGHT, R["sigma"]),
    }
    if variant is Variant.HETERO_ARC:
        pts["right_N"] = TaggedPoint(Piece.RIGHT, R["N"])
    else:
        pts["right_S"] = TaggedPoint(Piece.RIGHT, R["S"])
    return pts


def build_surgery(variant: Variant | str, samples_per_arc: int = 64, levels: int = 2,
                  dt: float = DEFAULT_DT, *, check: bool = True, residual_samples: int = 1000,
                  seed: int = 0) -> SurgeredMap:
    """Assemble the glued S^4 map for ``variant`` and certify the gluing."""
    variant = Variant(variant) if not isinstance(variant, Variant) else variant
    left = trivial_sphere_map(4, dt=dt, levels=levels)
    right = fox_artin_sphere_map(4, samples_per_arc, levels, dt=dt)
    rho = stable_wall_radius(dt=dt)
    cone = math.atan(rho * left.tube_chart.theta0 / 2.0)
    if variant is Variant.HETERO_ARC:
        shift, target = left.k_N + right.k_S + 1, Chart.SOUTH
    else:
        shift, target = left.k_N + right.k_N + 1, Chart.NORTH
    gluing = Gluing(shift, cone, left.dim - 1, target)
    pts = _fixed_points(variant, left, right)
    if variant is Variant.HETERO_ARC:
        s1, s2 = pts["left_sigma"], pts["right_sigma"]
    else:
        s1, s2 = pts["right_sigma"], pts["left_sigma"]
    m = SurgeredMap(variant, left, right, gluing, pts, s1, s2)
    for name, tp in pts.items():
        if m.removed(tp) or m.in_collar(tp):
            raise GluingFailed(f"fixed point {name} is not in the interior of its piece")
    if check:
        res = gluing_residuals(m, residual_samples, seed)
        m.residuals.update(res)
        if res["equivariance"] > EQUIVARIANCE_TOL:
            raise GluingFailed(f"equivariance residual {res['equivariance']:.3e}")
        if res["round_trip"] > ROUND_TRIP_TOL:
            raise GluingFailed(f"collar round trip residual {res['round_trip']:.3e}")
        if res["alignment"] > ALIGNMENT_TOL:
            raise GluingFailed(f"stable set misses the hyperplane by {res['alignment']:.3e}")
    return m


# --------------------------------------------------------------------------
# heteroclinic witnesses


_WALL_START = -3.0  # axial level where the stable wall radius is measured
_LOOP_START = -4.0  # on the same step grid; one unit farther from the saddle


def _arrival_level(m: SurgeredMap, tp: TaggedPoint) -> float:
    """Axial coordinate, in the left tube chart, of a right point carried to the left piece."""
    left = m.transport(tp)
    return float(m.left_spec.tube_chart.zeta(_coords(left.point, Chart.SOUTH))[0])


def _grid_offset(level: float, dt: float) -> float:
    return (level - _WALL_START) / dt


def _aligned_roots(fn, lo: float, hi: float, dt: float, scan: int) -> list[float]:
    """Parameters t in [lo, hi] where fn(t) sits on the grid _WALL_START + dt*Z."""
    from scipy.optimize import brentq

    ts = np.linspace(lo, hi, scan)
    off = np.array([_grid_offset(fn(t), dt) for t in ts])
    roots = []
    for i in range(scan - 1):
        a, b = off[i], off[i + 1]
        k = math.floor(max(a, b))
        if min(a, b) < k <= max(a, b) and abs(b - a) < 0.5:
            g = lambda t: _grid_offset(fn(t), dt) - k  # noqa: E731
            roots.append(brentq(g, ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return roots


def witness_samples(m: SurgeredMap, count: int = 60, around: int = 24,
                    span=None) -> list[TaggedPoint]:
    """Points of the heteroclinic set of the numerical map.

    HETERO_ARC: points of the Fox-Artin core beyond its saddle (axial 2..3.5),
    whose orbit runs through the collar into the left piece.
    HETERO_CYLINDER: points of radius rho* around the core, in the 3-plane
    x_4 = 0, on loops at axial levels -4, -4 - dt, ...

    The time-one map is fixed-step RK4, so its stable wall is the exact cone
    only for orbits whose axial phase sits on the step grid; samples are
    solved for that phase (one root-find each), which makes them members of
    the discrete map's heteroclinic set and not merely of the flow's.
    """
    chart = m.right_spec.tube_chart
    dt = m.left_spec.dt
    if m.variant is Variant.HETERO_ARC:
        lo, hi = span or (2.0, 3.5)

        def core(s):
            return TaggedPoint.make(Piece.RIGHT, Chart.SOUTH, chart.zeta_inv(np.array([s, 0.0, 0.0, 0.0])))

        roots = _aligned_roots(lambda s: _arrival_level(m, core(s)), lo, hi, dt, 6000)
        if len(roots) > count:
            roots = [roots[i] for i in np.linspace(0, len(roots) - 1, count).round().astype(int)]
        return [core(s) for s in roots]

    rho = stable_wall_radius(dt=m.right_spec.dt)
    out: list[TaggedPoint] = []
    j = 0
    while len(out) < count:
        # right level on the grid keeps the forward orbit on the right wall;
        # the angle is then solved so the backward orbit lands on the grid too
        y1 = _LOOP_START - j * dt

        def wall(a, y1=y1):
            y = np.array([y1, rho * math.cos(a), rho * math.sin(a), 0.0])
            return TaggedPoint.make(Piece.RIGHT, Chart.SOUTH, chart.zeta_inv(y))

        roots = _aligned_roots(lambda a: _arrival_level(m, wall(a)), 0.0, 2 * math.pi, dt, 4 * around)
        out.extend(wall(a) for a in roots)
        j += 1
        if j > 100:
            raise GluingFailed("not enough phase-aligned wall points")
    return out[:count]


def wall_loop(m: SurgeredMap, level: float = _WALL_START, around: int = 24) -> list[TaggedPoint]:
    """Closed loop of the cylinder heteroclinic set at one axial level."""
    chart = m.right_spec.tube_chart
    rho = stable_wall_radius(dt=m.right_spec.dt)
    return [TaggedPoint.make(Piece.RIGHT, Chart.SOUTH,
                             chart.zeta_inv(np.array([level, rho * math.cos(a), rho * math.sin(a), 0.0])))
            for a in 2 * math.pi * np.arange(around) / around]


def loop_winding(m: SurgeredMap, loop: list[TaggedPoint]) -> float:
    """Winding number of a closed sample loop around the Fox-Artin core, read in
    the transverse (N1, N2) coordinates of the tube chart."""
    chart = m.right_spec.tube_chart
    ang = []
    for tp in loop:
        y = chart.zeta(_coords(tp.point, Chart.SOUTH))
        ang.append(math.atan2(y[2], y[1]))
    ang = np.array(ang + ang[:1])
    steps = (np.diff(ang) + math.pi) % (2 * math.pi) - math.pi
    return float(steps.sum() / (2 * math.pi))


def control_samples(m: SurgeredMap, count: int, rng: np.random.Generator) -> list[TaggedPoint]:
    """Uniform points of S^4 distributed over both pieces (removed caps rejected)."""
    out = []
    while len(out) < count:
        piece = Piece.LEFT if len(out) % 2 == 0 else Piece.RIGHT
        p = rng.normal(size=m.left_spec.dim + 1)
        p /= np.linalg.norm(p)
        chart = Chart.SOUTH if p[-1] <= 0 else Chart.NORTH
        tp = TaggedPoint.make(piece, chart, stereo_to_plane(p, chart))
        if not m.removed(tp):
            out.append(tp)
    return out


def heteroclinic_witnesses(m: SurgeredMap, points, n_fwd: int = 20, n_bwd: int = 20,
                           tol: float = 1e-2):
    dist = lambda p, q: tagged_distance(m, q, p)  # noqa: E731 - measure in the target's piece
    return [heteroclinic_test(m.apply, m.apply_inverse, x, m.sigma1, m.sigma2,
                              n_fwd, n_bwd, tol, distance=dist) for x in points]
