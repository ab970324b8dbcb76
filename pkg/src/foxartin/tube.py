"""The conjugating chart zeta: N(gamma) -> C and the model diffeomorphism of R^n.

zeta sends an h-invariant tube around an h-invariant arc onto the cylinder C so
that h becomes the unit translation g.  Two realizations:

* ``RADIAL_EXPLICIT`` -- the arc is a ray; zeta(x) = (-log2 rho, 2 w / (rho theta0))
  with x = rho u + w.  Closed form both ways.
* ``FRAME_BASED`` -- the arc is one period P of a self-similar polyline.  The
  centerline is c(k + sigma) = 2^{-k} P(sigma) with sigma the arclength fraction,
  carrying rotation-minimizing frames whose holonomy over one period is
  twisted out.  zeta^{-1} is explicit; zeta solves <x - c(s), T(s)> = 0 for s.
  Every evaluation is first reduced to the fundamental shell by an exact
  power-of-two rescaling, so zeta o h = g o zeta holds to rounding.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .arcs import PolylineArc, WildArcModel
from .errors import OutsideCylinder, OutsideTube, ZeroPoint
from .flow import DEFAULT_DT, FlowParams, integrate
from .geometry import ZERO_NORM, fundamental_reduce

__all__ = [
    "ChartKind",
    "TubeChart",
    "radial_chart",
    "frame_chart",
    "zeta",
    "zeta_inv",
    "model_diffeo",
    "model_diffeo_inverse",
    "model_diffeo_branches",
    "tube_mesh",
]

_EDGE = 1e-9


class ChartKind(enum.Enum):
    RADIAL_EXPLICIT = "radial"
    FRAME_BASED = "frame"


def _complement_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of the unit vector u."""
    n = u.size
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
    basis = q[:, 1:n]
    # QR may flip signs; fix orientation so the columns are deterministic
    for j in range(basis.shape[1]):
        i = int(np.argmax(np.abs(basis[:, j])))
        if basis[i, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


def _unit(v):
    return v / np.linalg.norm(v)


def _rotate_about(v, axis, angle):
    # Rodrigues rotation in R^3
    return (v * math.cos(angle) + np.cross(axis, v) * math.sin(angle)
            + axis * float(axis @ v) * (1 - math.cos(angle)))


def _rmf_frames(verts: np.ndarray, tangents: np.ndarray) -> np.ndarray:
    """Double-reflection rotation-minimizing normals along a polyline in R^3."""
    t0 = tangents[0]
    seed = np.eye(3)[int(np.argmin(np.abs(t0)))]
    r = _unit(seed - (seed @ t0) * t0)
    normals = [r]
    for i in range(len(verts) - 1):
        v1 = verts[i + 1] - verts[i]
        c1 = float(v1 @ v1)
        rl = r - (2.0 / c1) * float(v1 @ r) * v1
        tl = tangents[i] - (2.0 / c1) * float(v1 @ tangents[i]) * v1
        v2 = tangents[i + 1] - tl
        c2 = float(v2 @ v2)
        r = rl if c2 < 1e-30 else rl - (2.0 / c2) * float(v2 @ rl) * v2
        r = _unit(r - (r @ tangents[i + 1]) * tangents[i + 1])
        normals.append(r)
    return np.array(normals)


@dataclass(frozen=True)
class TubeChart:
    """Chart zeta of an h-invariant tube; build with :func:`radial_chart` or
    :func:`frame_chart`."""

    kind: ChartKind
    dim: int
    theta0: float
    centerline: PolylineArc
    direction: np.ndarray | None = None
    _data: dict = field(default_factory=dict, repr=False, compare=False)

    def radius_at(self, point) -> float:
        """Tube radius at a centerline point: proportional to its distance from O."""
        return self.theta0 * float(np.linalg.norm(point))

    def zeta(self, x) -> np.ndarray:
        return zeta(x, self)

    def zeta_inv(self, y) -> np.ndarray:
        return zeta_inv(y, self)

    def contains(self, x) -> bool:
        try:
            zeta(x, self)
        except (OutsideTube, ZeroPoint):
            return False
        return True

    def sample(self, n: int, rng: np.random.Generator, axial=(-3.0, 3.0),
               max_radius: float = 2.0) -> np.ndarray:
        """``n`` points of N(gamma), uniform in cylinder coordinates."""
        ys = np.empty((n, self.dim))
        ys[:, 0] = rng.uniform(*axial, size=n)
        g = rng.normal(size=(n, self.dim - 1))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = max_radius * np.sqrt(rng.uniform(0.0, 1.0, size=n)) * (1 - 1e-6)
        ys[:, 1:] = g * rad[:, None]
        return np.array([zeta_inv(y, self) for y in ys])

    @property
    def sink(self) -> np.ndarray:
        return zeta_inv(np.eye(self.dim)[0] * -1.0, self)

    @property
    def saddle(self) -> np.ndarray:
        return zeta_inv(np.eye(self.dim)[0], self)


def radial_chart(direction, theta0: float = 0.1) -> TubeChart:
    """Chart of the cone-shaped tube around the ray through ``direction``."""
    u = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    ray = PolylineArc(np.array([u, u / 2]))
    chart = TubeChart(ChartKind.RADIAL_EXPLICIT, u.size, float(theta0), ray, u.copy())
    chart._data["basis"] = _complement_basis(u)
    return chart


def frame_chart(arc: WildArcModel | PolylineArc, dim: int = 3,
                theta0: float = 0.02) -> TubeChart:
    """Frame-based chart around a self-similar arc lying in R^3 (padded to ``dim``).

    ``arc`` supplies one period running from a point p to h(p).
    """
    period = arc.generator if isinstance(arc, WildArcModel) else arc
    P = period.vertices
    if P.shape[1] != 3 or dim < 3:
        raise ValueError("frame-based charts expect a period in R^3 and dim >= 3")
    if np.linalg.norm(P[-1] - P[0] / 2) > 1e-12 * np.linalg.norm(P[0]):
        raise ValueError("period must end at h of its start")

    seg = np.diff(P, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    d = seg / seg_len[:, None]
    T = np.empty_like(P)
    T[1:-1] = d[:-1] + d[1:]
    T[0] = T[-1] = d[-1] + d[0]  # the previous copy ends with a parallel segment
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    sigma = np.concatenate([[0.0], np.cumsum(seg_len)]) / seg_len.sum()

    N1 = _rmf_frames(P, T)
    phi = math.atan2(float(np.cross(N1[-1], N1[0]) @ T[0]), float(N1[-1] @ N1[0]))
    N1 = np.array([_rotate_about(N1[i], T[i], phi * sigma[i]) for i in range(len(P))])
    N1[-1] = N1[0]
    N2 = np.cross(T, N1)

    m = len(P) - 1
    pad = np.zeros((m + 1, dim))

    def embed(a):
        out = pad.copy()
        out[:, :3] = a
        return out

    Pv, Tv = embed(P), embed(T)
    normals = [embed(N1), embed(N2)]
    for extra in range(3, dim):
        e = pad.copy()
        e[:, extra] = 1.0
        normals.append(e)
    Nv = np.stack(normals, axis=1)  # (m+1, dim-1, dim)

    # local chain: copies j = -1..2, enough to cover every tube point near the
    # fundamental shell (1/2, 1]
    Lv, Ls, LT, LN = [], [], [], []
    for j in range(-1, 3):
        sl = slice(0, m) if j < 2 else slice(0, m + 1)
        Lv.append(np.ldexp(Pv[sl], -j))
        Ls.append(j + sigma[sl])
        LT.append(Tv[sl])
        LN.append(Nv[sl])
    chart = TubeChart(ChartKind.FRAME_BASED, dim, float(theta0), period)
    chart._data.update(
        P=Pv, T=Tv, N=Nv, sigma=sigma,
        Lv=np.concatenate(Lv), Ls=np.concatenate(Ls),
        LT=np.concatenate(LT), LN=np.concatenate(LN),
    )
    return chart


# --------------------------------------------------------------------------
# frame interpolation


def _frame_at(verts, Ts, Ns, j, lam):
    c = (1 - lam) * verts[j] + lam * verts[j + 1]
    t = _unit((1 - lam) * Ts[j] + lam * Ts[j + 1])
    basis = []
    for k in range(Ns.shape[1]):
        v = (1 - lam) * Ns[j, k] + lam * Ns[j + 1, k]
        v = v - (v @ t) * t
        for b in basis:
            v = v - (v @ b) * b
        basis.append(_unit(v))
    return c, t, np.array(basis)


def _point_segment_dist(y, a, b):
    ab = b - a
    lam = np.clip(np.einsum("ij,ij->i", y - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
    return np.linalg.norm(a + lam[:, None] * ab - y, axis=1)


def _zeta_frame(y: np.ndarray, chart: TubeChart) -> tuple[float, np.ndarray]:
    D = chart._data
    Lv, LT, LN, Ls = D["Lv"], D["LT"], D["LN"], D["Ls"]
    dist = _point_segment_dist(y, Lv[:-1], Lv[1:])
    i0 = int(np.argmin(dist))
    reach = 1.5 * chart.theta0 * float(np.linalg.norm(y)) * 1.05
    if dist[i0] > reach:
        raise OutsideTube("point is farther from the arc than the tube radius")
    near = np.nonzero(dist <= max(reach, dist[i0]))[0]
    lo, hi = max(int(near.min()) - 1, 0), min(int(near.max()) + 1, len(Lv) - 2)

    def f(j, lam):
        c, t, _ = _frame_at(Lv, LT, LN, j, lam)
        return float((y - c) @ t)

    fv = np.einsum("ij,ij->i", y - Lv[lo:hi + 2], LT[lo:hi + 2])
    best = None
    for j in range(lo, hi + 1):
        f0, f1 = fv[j - lo], fv[j - lo + 1]
        if f0 == 0.0:
            lam = 0.0
        elif f0 * f1 > 0:
            continue
        elif f1 == 0.0:
            lam = 1.0
        else:
            lam = brentq(lambda t: f(j, t), 0.0, 1.0, xtol=1e-15, rtol=1e-15)
        c, t, N = _frame_at(Lv, LT, LN, j, lam)
        gap = float(np.linalg.norm(y - c))
        if best is None or gap < best[0]:
            best = (gap, j, lam, c, N)
    if best is None:
        raise OutsideTube("no normal plane of the centerline passes through the point")
    _, j, lam, c, N = best
    s = Ls[j] + lam * (Ls[j + 1] - Ls[j])
    R = chart.radius_at(c)
    v = 2.0 * (N @ (y - c)) / R
    if np.linalg.norm(v) > 2.0 * (1 + _EDGE):
        raise OutsideTube("point lies outside the tube")
    return float(s), v


def zeta(x, chart: TubeChart) -> np.ndarray:
    """Cylinder coordinates (axial, transverse...) of a point of N(gamma)."""
    x = np.asarray(x, dtype=float)
    if float(np.linalg.norm(x)) <= ZERO_NORM:
        raise ZeroPoint("the origin is not in the tube")
    if chart.kind is ChartKind.RADIAL_EXPLICIT:
        u, B = chart.direction, chart._data["basis"]
        rho = float(x @ u)
        if rho <= 0:
            raise OutsideTube("point is behind the ray")
        w = B.T @ (x - rho * u)
        v = 2.0 * w / (rho * chart.theta0)
        if np.linalg.norm(v) > 2.0 * (1 + _EDGE):
            raise OutsideTube("point lies outside the cone tube")
        return np.concatenate([[-math.log2(rho)], v])
    k0, y = fundamental_reduce(x)
    s, v = _zeta_frame(y, chart)
    return np.concatenate([[s - k0], v])


def zeta_inv(y, chart: TubeChart) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y[1:]) > 2.0 * (1 + _EDGE):
        raise OutsideCylinder("transverse radius exceeds 2")
    if chart.kind is ChartKind.RADIAL_EXPLICIT:
        rho = 2.0 ** (-y[0])
        return rho * chart.direction + chart._data["basis"] @ y[1:] * (rho * chart.theta0 / 2.0)
    D = chart._data
    q = math.floor(y[0])
    frac = y[0] - q
    sig = D["sigma"]
    j = min(int(np.searchsorted(sig, frac, side="right")) - 1, len(sig) - 2)
    lam = (frac - sig[j]) / (sig[j + 1] - sig[j])
    c, _, N = _frame_at(D["P"], D["T"], D["N"], j, lam)
    R = chart.radius_at(c)
    return np.ldexp(c + (R / 2.0) * (N.T @ y[1:]), -q)


# --------------------------------------------------------------------------
# the model diffeomorphism


def _segment_misses_ball(y: np.ndarray, direction: float) -> bool:
    """Whether y + t e_1, t in [0, 1] (or [-1, 0]), stays outside r^2 <= 4."""
    t2 = float(y[1:] @ y[1:])
    a, b = (y[0], y[0] + 1.0) if direction > 0 else (y[0] - 1.0, y[0])
    closest = 0.0 if a <= 0.0 <= b else min(abs(a), abs(b))
    return closest * closest + t2 > 4.0 + 1e-12


def model_diffeo(x, chart: TubeChart, params: FlowParams | None = None,
                 dt: float = DEFAULT_DT) -> np.ndarray:
    """h off the tube, zeta^{-1} phi zeta on it."""
    x = np.asarray(x, dtype=float)
    if float(np.linalg.norm(x)) <= ZERO_NORM:
        raise ZeroPoint("the model diffeomorphism is evaluated off the origin")
    try:
        y = zeta(x, chart)
    except OutsideTube:
        return np.ldexp(x, -1)
    if _segment_misses_ball(y, +1):
        # phi = g there, and zeta conjugates g to h
        return np.ldexp(x, -1)
    return zeta_inv(integrate(y, 1.0, dt, params), chart)


def model_diffeo_inverse(x, chart: TubeChart, params: FlowParams | None = None,
                         dt: float = DEFAULT_DT) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if float(np.linalg.norm(x)) <= ZERO_NORM:
        raise ZeroPoint("the model diffeomorphism is evaluated off the origin")
    try:
        y = zeta(x, chart)
    except OutsideTube:
        return np.ldexp(x, 1)
    if _segment_misses_ball(y, -1):
        return np.ldexp(x, 1)
    return zeta_inv(integrate(y, -1.0, dt, params), chart)


def model_diffeo_branches(x, chart: TubeChart, params: FlowParams | None = None,
                          dt: float = DEFAULT_DT) -> tuple[np.ndarray, np.ndarray]:
    """Both branches at a tube point: (h(x), zeta^{-1} phi zeta(x)) with phi integrated."""
    x = np.asarray(x, dtype=float)
    y = zeta(x, chart)
    return np.ldexp(x, -1), zeta_inv(integrate(y, 1.0, dt, params), chart)


def tube_mesh(chart: TubeChart, axial=(-2.0, 3.0), rings: int = 160, around: int = 16,
              radius: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Triangulated boundary of zeta^{-1}([axial] x {|y_perp| = radius}) in R^3."""
    if chart.dim != 3:
        raise ValueError("tube meshes are exported for dim 3 only")
    ss = np.linspace(axial[0], axial[1], rings + 1)
    ang = 2 * math.pi * np.arange(around) / around
    verts = np.array([zeta_inv(np.array([s, radius * math.cos(a), radius * math.sin(a)]), chart)
                      for s in ss for a in ang])
    faces = []
    for i in range(rings):
        for j in range(around):
            p, q = i * around + j, i * around + (j + 1) % around
            faces += [(p, q, q + around), (p, q + around, p + around)]
    return verts, np.array(faces, dtype=int)
