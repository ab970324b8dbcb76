"""The sphere diffeomorphism phi_{gamma,n} in the two-chart atlas of S^n.

In the theta_S chart the map is the model diffeomorphism (h off the tube,
zeta^{-1} phi zeta on it); N is fixed and near it the map is h^{-1} in the
theta_N chart.  Four fixed points: the sink omega and saddle sigma on the
tube core, the sink S (theta_S origin) and the source N (theta_N origin).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analysis import trace_separatrix
from .arcs import WildArcModel, assemble_wild_arc, build_arc_triple, trivial_arc_model
from .errors import NotFound
from .flow import DEFAULT_DT, integrate
from .geometry import ZERO_NORM, Chart, ChartPoint, chart_transition
from .tube import TubeChart, frame_chart, model_diffeo, model_diffeo_inverse, radial_chart

__all__ = [
    "SphereMapSpec",
    "sphere_map_apply",
    "sphere_map_inverse",
    "sphere_distance",
    "stable_wall_radius",
    "stable_set_cylinder_samples",
    "stable_set_samples",
    "unstable_set_samples",
    "support_samples",
    "choose_k",
    "build_sphere_map",
    "pixton_map",
    "FIXED_POINT_NAMES",
    "SWAP_THRESHOLD",
]

SWAP_THRESHOLD = 10.0
FIXED_POINT_NAMES = ("omega", "S", "sigma", "N")
DEFAULT_MARGIN = 1e-2
MAX_K = 64
# below this theta_N radius the point is so far out that every tube point there
# is in the pure-translation regime; skip the inversion to avoid overflow
_DEEP_NORTH = 1e-100


@dataclass(frozen=True)
class SphereMapSpec:
    dim: int
    arc_model: object
    tube_chart: TubeChart
    k_S: int
    k_N: int
    fixed_points: dict
    margin_S: float = float("nan")
    margin_N: float = float("nan")
    dt: float = DEFAULT_DT
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def apply(self, x: ChartPoint) -> ChartPoint:
        return sphere_map_apply(self, x)

    def apply_inverse(self, x: ChartPoint) -> ChartPoint:
        return sphere_map_inverse(self, x)

    @property
    def south_annulus(self) -> tuple[float, float]:
        """theta_S radii (inner, outer) of V_S = h^{k_S}(V_n)."""
        return math.ldexp(1.0, -self.k_S - 1), math.ldexp(1.0, -self.k_S)

    @property
    def north_annulus(self) -> tuple[float, float]:
        """theta_N radii (inner, outer) of V_N = h^{k_N}(V_n)."""
        return math.ldexp(1.0, -self.k_N - 1), math.ldexp(1.0, -self.k_N)

    def in_south_disk(self, x: ChartPoint) -> bool:
        """Whether x lies in D_S, the open theta_S ball inside V_S."""
        return _chart_radius(x, Chart.SOUTH) < self.south_annulus[0]

    def in_north_disk(self, x: ChartPoint) -> bool:
        return _chart_radius(x, Chart.NORTH) < self.north_annulus[0]

    def chart_map(self, chart: Chart, inverse: bool = False):
        """The map (or its inverse) read in one chart: coords -> coords."""
        step = sphere_map_inverse if inverse else sphere_map_apply

        def f(coords):
            out = step(self, ChartPoint(chart, np.asarray(coords, dtype=float)))
            return _coords_in(out, chart)

        return f

    def summary(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "chart": self.tube_chart.kind.value,
            "theta0": self.tube_chart.theta0,
            "k_S": self.k_S,
            "k_N": self.k_N,
            "margin_S": self.margin_S,
            "margin_N": self.margin_N,
            "dt": self.dt,
        }


def _chart_radius(x: ChartPoint, chart: Chart) -> float:
    r = float(np.linalg.norm(x.coords))
    if x.chart is chart:
        return r
    return math.inf if r <= ZERO_NORM else 1.0 / r


def _coords_in(x: ChartPoint, chart: Chart) -> np.ndarray:
    if x.chart is chart:
        return x.coords
    return chart_transition(x.coords)


def sphere_distance(p: ChartPoint, q: ChartPoint) -> float:
    """Euclidean distance of the two points on the unit sphere in R^{n+1}."""
    return float(np.linalg.norm(p.to_sphere() - q.to_sphere()))


def _apply(spec: SphereMapSpec, x: ChartPoint, forward: bool) -> ChartPoint:
    z = np.asarray(x.coords, dtype=float)
    r = float(np.linalg.norm(z))
    if x.chart is Chart.NORTH:
        if r <= ZERO_NORM:
            return ChartPoint(Chart.NORTH, z.copy())
        if r < _DEEP_NORTH:
            return ChartPoint(Chart.NORTH, np.ldexp(z, 1 if forward else -1))
        y = chart_transition(z)
    else:
        if r <= ZERO_NORM:
            return ChartPoint(Chart.SOUTH, z.copy())
        y = z
    step = model_diffeo if forward else model_diffeo_inverse
    out = step(y, spec.tube_chart, dt=spec.dt)
    return ChartPoint(Chart.SOUTH, out).canonical(SWAP_THRESHOLD)


def sphere_map_apply(spec: SphereMapSpec, x: ChartPoint) -> ChartPoint:
    return _apply(spec, x, True)


def sphere_map_inverse(spec: SphereMapSpec, x: ChartPoint) -> ChartPoint:
    return _apply(spec, x, False)


# --------------------------------------------------------------------------
# invariant sets of the saddle, in cylinder coordinates and in R^n


def _classify_batch(y: np.ndarray, dt: float, max_steps: int = 150) -> np.ndarray:
    """+1 escapes past the ball, -1 is captured by the sink, 0 undecided."""
    out = np.zeros(len(y), dtype=int)
    sink = np.zeros(y.shape[1])
    sink[0] = -1.0
    live = np.ones(len(y), dtype=bool)
    for _ in range(max_steps):
        y[live] = integrate(y[live], 1.0, dt)
        esc = live & (y[:, 0] > 2.5)
        cap = live & (np.linalg.norm(y - sink, axis=1) < 0.05)
        out[esc], out[cap] = 1, -1
        live &= ~(esc | cap)
        if not live.any():
            break
    return out


def stable_wall_radius(dim: int = 2, dt: float = DEFAULT_DT, start: float = -3.0) -> float:
    """Transverse radius rho* at which the saddle's stable set meets the
    translation region: points (start, rho, 0, ...) with rho < rho* fall into
    the sink, those with rho > rho* escape.

    The flow is rotation-symmetric about the axis, so rho* does not depend on
    the dimension and is computed once in the meridian plane.
    """
    return _wall_radius(float(dt), float(start))


@lru_cache(maxsize=None)
def _wall_radius(dt: float, start: float) -> float:
    # batched multisection in the (axial, radial) plane
    dim = 2
    lo, hi = 0.0, 2.0
    for _ in range(12):
        rho = np.linspace(lo, hi, 34)[1:-1]
        y = np.zeros((rho.size, dim))
        y[:, 0], y[:, 1] = start, rho
        cls = _classify_batch(y, dt)
        inside = rho[cls < 0]
        outside = rho[cls > 0]
        new_lo = max(lo, inside.max()) if inside.size else lo
        new_hi = min(hi, outside.min()) if outside.size else hi
        if (new_lo, new_hi) == (lo, hi):
            break
        lo, hi = new_lo, new_hi
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def _transverse_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors in the transverse R^{dim-1}."""
    m = dim - 1
    if m == 1:
        return np.array([[1.0], [-1.0]])
    if m == 2:
        ang = 2 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    # golden-angle spiral on S^2, extended by zeros if m > 3
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    ang = math.pi * (3 - math.sqrt(5)) * i
    rr = np.sqrt(1 - z * z)
    pts = np.column_stack([rr * np.cos(ang), rr * np.sin(ang), z])
    if m > 3:
        pts = np.hstack([pts, np.zeros((count, m - 3))])
    return pts


def _rotate_meridian(meridian: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Sweep (axial, radial) pairs around the axis along each transverse direction."""
    ax = np.repeat(meridian[:, 0], len(dirs))
    rad = np.repeat(meridian[:, 1], len(dirs))
    d = np.tile(dirs, (len(meridian), 1))
    return np.column_stack([ax, rad[:, None] * d])


def stable_set_cylinder_samples(dim: int, dt: float = DEFAULT_DT, directions: int = 12,
                                wall=(-60.0, -2.5), wall_points: int = 120) -> np.ndarray:
    """Samples of the saddle's stable set in C: the cap traced backward from
    (1, 0, ...) plus the cylinder wall |y_perp| = rho* in the translation region."""
    saddle = np.zeros(dim)
    saddle[0] = 1.0
    e2 = np.zeros(dim)
    e2[1] = 1.0
    cap = trace_separatrix(lambda y: integrate(y, -1.0, dt), saddle, +1, steps=14,
                           seed_dist=1e-4, per_step=8, direction=e2,
                           multiplier=math.e, batch=True).vertices
    cap = cap[cap[:, 0] >= wall[1]]
    rho = stable_wall_radius(dim, dt)
    meridian = np.vstack([
        np.column_stack([cap[:, 0], np.abs(cap[:, 1])]),
        np.column_stack([np.linspace(wall[0], wall[1], wall_points), np.full(wall_points, rho)]),
    ])
    return _rotate_meridian(meridian, _transverse_directions(dim, directions))


def stable_set_samples(chart: TubeChart, dt: float = DEFAULT_DT, directions: int = 12) -> np.ndarray:
    ys = stable_set_cylinder_samples(chart.dim, dt, directions)
    return np.array([chart.zeta_inv(y) for y in ys])


def unstable_set_samples(chart: TubeChart, dt: float = DEFAULT_DT, steps: int = 40) -> np.ndarray:
    """The saddle's unstable set (the core from the sink out to S), traced on
    both sides of the saddle in C and carried to R^n."""
    saddle = np.zeros(chart.dim)
    saddle[0] = 1.0
    e1 = np.zeros(chart.dim)
    e1[0] = 1.0
    f = lambda y: integrate(y, 1.0, dt)  # noqa: E731
    parts = [
        trace_separatrix(f, saddle, side, steps=steps, direction=e1,
                         multiplier=math.exp(4 / 3), bound=1e3, batch=True).vertices
        for side in (-1, 1)
    ]
    ys = np.vstack(parts)
    return np.array([chart.zeta_inv(y) for y in ys])


def support_samples(chart: TubeChart, axial=(-3.0, 2.0), count: int = 240,
                    directions: int = 16) -> np.ndarray:
    """Boundary samples of zeta^{-1}({axial range} x ball of radius 2): the only
    place where the model diffeomorphism differs from h."""
    meridian = np.column_stack([np.linspace(*axial, count), np.full(count, 2.0)])
    ys = _rotate_meridian(meridian, _transverse_directions(chart.dim, directions))
    core = np.column_stack([np.linspace(*axial, count), np.zeros((count, chart.dim - 1))])
    return np.array([chart.zeta_inv(y) for y in np.vstack([ys, core])])


def _shell_gap(radii: np.ndarray, k: int) -> float:
    lo, hi = math.ldexp(1.0, -k - 1), math.ldexp(1.0, -k)
    gap = np.maximum(np.maximum(lo - radii, radii - hi), 0.0)
    return float(gap.min())


def _first_k(radii: np.ndarray, margin: float, k_min: int = 0) -> tuple[int, float]:
    for k in range(k_min, MAX_K + 1):
        gap = _shell_gap(radii, k)
        if gap > margin:
            return k, gap
    raise NotFound(f"no k <= {MAX_K} keeps the sampled sets {margin} away from the annulus")


def choose_k(chart: TubeChart, dt: float = DEFAULT_DT, margin: float = DEFAULT_MARGIN,
             *, samples: dict | None = None) -> tuple[int, int, float, float]:
    """Smallest (k_S, k_N) whose annuli keep ``margin`` from the sampled sets.

    The theta_S annulus h^{k_S}(V_n) must miss the stable set of the saddle and
    the theta_N annulus h^{k_N}(V_n) its unstable set; both must also miss the
    region where the map is not h, so the map is exactly h (resp. h^{-1}) on
    the polar caps.  Returns ``(k_S, k_N, margin_S, margin_N)``.
    """
    if samples is None:
        samples = {
            "stable": stable_set_samples(chart, dt),
            "unstable": unstable_set_samples(chart, dt),
            "support": support_samples(chart),
        }
    south = np.linalg.norm(np.vstack([samples["stable"], samples["support"]]), axis=1)
    north = 1.0 / np.linalg.norm(np.vstack([samples["unstable"], samples["support"]]), axis=1)
    k_S, gap_S = _first_k(south, margin)
    k_N, gap_N = _first_k(north, margin)
    return k_S, k_N, gap_S, gap_N


def build_sphere_map(chart: TubeChart, arc_model=None, dt: float = DEFAULT_DT,
                     margin: float = DEFAULT_MARGIN, label: str = "") -> SphereMapSpec:
    k_S, k_N, gap_S, gap_N = choose_k(chart, dt, margin)
    n = chart.dim
    fixed = {
        "omega": ChartPoint(Chart.SOUTH, chart.sink).canonical(SWAP_THRESHOLD),
        "S": ChartPoint(Chart.SOUTH, np.zeros(n)),
        "sigma": ChartPoint(Chart.SOUTH, chart.saddle).canonical(SWAP_THRESHOLD),
        "N": ChartPoint(Chart.NORTH, np.zeros(n)),
    }
    return SphereMapSpec(n, arc_model, chart, k_S, k_N, fixed, gap_S, gap_N, dt, label)


def fox_artin_sphere_map(dim: int = 3, samples_per_arc: int = 64, levels: int = 2,
                         theta0: float = 0.02, dt: float = DEFAULT_DT) -> SphereMapSpec:
    """phi_{l,n} for the self-similar Fox-Artin arc."""
    model = assemble_wild_arc(build_arc_triple(samples_per_arc), levels)
    chart = frame_chart(model, dim, theta0)
    return build_sphere_map(chart, model, dt, label=f"fox-artin-{dim}")


def trivial_sphere_map(dim: int = 4, direction=None, theta0: float = 0.1,
                       dt: float = DEFAULT_DT, levels: int = 2) -> SphereMapSpec:
    """phi_{l,n} for a straight ray (the unknotted arc); default ray along e_n."""
    if direction is None:
        direction = np.eye(dim)[dim - 1]
    direction = np.asarray(direction, dtype=float)
    model: WildArcModel = trivial_arc_model(direction, levels)
    chart = radial_chart(direction, theta0)
    return build_sphere_map(chart, model, dt, label=f"trivial-{dim}")


def pixton_map(samples_per_arc: int = 64, levels: int = 2, dt: float = DEFAULT_DT) -> SphereMapSpec:
    """The Pixton diffeomorphism of S^3 built on the Fox-Artin arc."""
    return fox_artin_sphere_map(3, samples_per_arc, levels, dt=dt)


__all__ += ["fox_artin_sphere_map", "trivial_sphere_map"]
