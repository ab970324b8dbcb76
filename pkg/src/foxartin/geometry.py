"""Coordinates, the homothety h(x) = x/2, the covering R^n \\ O -> S^{n-1} x S^1,
and the two stereographic charts of S^n.

Points are plain ``numpy`` float arrays.  Scaling by powers of two is exact in
binary floating point, so everything here that is supposed to commute with h
does so bit-for-bit (``np.ldexp`` and ``math.frexp`` do the work).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleSingularity, ZeroPoint

__all__ = [
    "Chart",
    "ChartPoint",
    "CoveringPoint",
    "AnnulusSpec",
    "as_vector",
    "homothety_apply",
    "fundamental_reduce",
    "covering_project",
    "stereo_to_plane",
    "stereo_from_plane",
    "chart_transition",
    "north_pole",
    "south_pole",
]

ZERO_NORM = 1e-300
_SNAP = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and copy ``x`` into a finite 1-d float array."""
    v = np.array(x, dtype=float).reshape(-1)
    if v.size < 1:
        raise ValueError("empty vector")
    if dim is not None and v.size != dim:
        raise ValueError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


@dataclass(frozen=True)
class AnnulusSpec:
    """The shell V_n = {1/2 <= |x| <= 1}; the inner sphere is h of the outer."""

    dim: int
    outer_radius: float = 1.0

    @property
    def inner_radius(self) -> float:
        return self.outer_radius / 2

    def scaled(self, k: int) -> tuple[float, float]:
        """Radii ``(inner, outer)`` of h^k(V_n)."""
        return math.ldexp(self.inner_radius, -k), math.ldexp(self.outer_radius, -k)

    def contains(self, x, k: int = 0) -> bool:
        lo, hi = self.scaled(k)
        r = float(np.linalg.norm(x))
        return lo <= r <= hi


@dataclass(frozen=True)
class CoveringPoint:
    direction: np.ndarray
    fiber: float

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.direction)) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if not 0.0 <= self.fiber < 1.0:
            raise ValueError("fiber coordinate must lie in [0, 1)")


class Chart(enum.Enum):
    """Which stereographic chart; SOUTH is theta_S (N removed), NORTH is theta_N."""

    SOUTH = "S"
    NORTH = "N"

    @property
    def other(self) -> "Chart":
        return Chart.NORTH if self is Chart.SOUTH else Chart.SOUTH


@dataclass(frozen=True)
class ChartPoint:
    chart: Chart
    coords: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    def to_sphere(self) -> np.ndarray:
        return stereo_from_plane(self.coords, self.chart)

    def in_chart(self, chart: Chart) -> "ChartPoint":
        if chart is self.chart:
            return self
        return ChartPoint(chart, chart_transition(self.coords))

    def canonical(self, threshold: float = 10.0) -> "ChartPoint":
        """Re-express in the other chart when ``|coords| > threshold``."""
        if float(np.linalg.norm(self.coords)) > threshold:
            return self.in_chart(self.chart.other)
        return self


def homothety_apply(x, k: int = 1) -> np.ndarray:
    """h^k(x) = x * 2**(-k); negative ``k`` applies the inverse."""
    return np.ldexp(np.asarray(x, dtype=float), -int(k))


def _scaled_norm(x: np.ndarray) -> tuple[int, np.ndarray, float]:
    """Return ``(e, y, r)`` with ``y = x * 2**-e`` exactly and ``r = |y|`` near 1.

    Taking the norm after an exact power-of-two rescaling keeps the squares
    away from overflow and underflow, so tiny and huge vectors keep full
    relative accuracy.
    """
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    if peak == 0.0:
        return 0, x, 0.0
    _, e = math.frexp(peak)
    y = np.ldexp(x, -e)
    return e, y, float(np.linalg.norm(y))


def fundamental_reduce(x) -> tuple[int, np.ndarray]:
    """Return ``(k, y)`` with ``y = h^k(x)`` and ``|y|`` in the half-open shell (1/2, 1]."""
    x = np.asarray(x, dtype=float)
    e0, _, r0 = _scaled_norm(x)
    if r0 == 0.0 or math.ldexp(r0, e0) <= ZERO_NORM:
        raise ZeroPoint("the origin has no fundamental-domain representative")
    m, e = math.frexp(r0)  # |x| = m * 2**(e + e0), m in [1/2, 1)
    e += e0
    k = e - 1 if m - 0.5 <= 0.5 * _SNAP else e
    return k, np.ldexp(x, -k)


def covering_project(x) -> CoveringPoint:
    """Project onto S^{n-1} x S^1: direction x/|x|, fiber (-log2|x|) mod 1."""
    x = np.asarray(x, dtype=float)
    e0, y, r = _scaled_norm(x)
    if r == 0.0 or math.ldexp(r, e0) <= ZERO_NORM:
        raise ZeroPoint("the covering omits the origin")
    m, _ = math.frexp(r)
    # -log2 r = -e - log2 m, and -log2 m lies in (0, 1]
    fiber = -math.log2(m)
    if fiber >= 1.0 - _SNAP or m - 0.5 <= 0.5 * _SNAP:
        fiber = 0.0
    return CoveringPoint(y / r, fiber)


def north_pole(n: int) -> np.ndarray:
    p = np.zeros(n + 1)
    p[-1] = 1.0
    return p


def south_pole(n: int) -> np.ndarray:
    p = np.zeros(n + 1)
    p[-1] = -1.0
    return p


def stereo_to_plane(p, chart: Chart) -> np.ndarray:
    """Project a point of the unit sphere S^n in R^{n+1} to R^n.

    ``Chart.SOUTH`` is theta_S, defined off N = (0,...,0,1), sending S to 0;
    ``Chart.NORTH`` is theta_N, defined off S, sending N to 0.
    """
    p = np.asarray(p, dtype=float)
    x, t = p[:-1], float(p[-1])
    s = 1.0 if chart is Chart.SOUTH else -1.0
    removed = s * north_pole(p.size - 1)
    if float(np.linalg.norm(p - removed)) <= 1e-12:
        raise PoleSingularity(f"chart {chart.name} cannot project its removed pole")
    # use the inverted form when 1 - s*t would cancel
    if s * t > 0.0:
        return x * (1.0 + s * t) / float(x @ x)
    return x / (1.0 - s * t)


def stereo_from_plane(y, chart: Chart) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    q = float(y @ y)
    s = 1.0 if chart is Chart.SOUTH else -1.0
    out = np.empty(y.size + 1)
    out[:-1] = 2.0 * y / (q + 1.0)
    out[-1] = s * (q - 1.0) / (q + 1.0)
    return out


def chart_transition(y) -> np.ndarray:
    """theta_N o theta_S^{-1} (and its own inverse): inversion in the unit sphere."""
    y = np.asarray(y, dtype=float)
    q = float(y @ y)
    if q <= ZERO_NORM:
        raise PoleSingularity("chart origin is the other chart's removed pole")
    return y / q
