"""The piecewise model flow on the cylinder C = {x_2^2 + ... + x_n^2 <= 4},
its time-1 map, and the unit translation g.

Inside the ball r^2 <= 4 the axial speed is 1 - (r^2 - 4)^2 / 9; the transverse
components contract, linearly for r^2 <= 2 and through a sine collar for
2 < r^2 <= 4.  Outside the ball the flow is pure translation.  The branches
match to first order on both seams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutsideCylinder

__all__ = [
    "FlowParams",
    "vector_field",
    "integrate",
    "time_one_map",
    "time_one_inverse",
    "translation_map",
    "axis_speed",
    "DEFAULT_DT",
]

DEFAULT_DT = 1e-2


@dataclass(frozen=True)
class FlowParams:
    dim: int = 3
    inner_sq: float = 2.0
    outer_sq: float = 4.0
    cylinder_radius: float = 2.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if (self.inner_sq, self.outer_sq, self.cylinder_radius) != (2.0, 4.0, 2.0):
            raise ValueError("region boundaries are fixed constants of the model")


def _check_cylinder(x: np.ndarray, params: FlowParams) -> None:
    t2 = np.sum(x[..., 1:] ** 2, axis=-1)
    if np.any(t2 > params.cylinder_radius**2 + 1e-9):
        raise OutsideCylinder("point outside the cylinder x_2^2 + ... + x_n^2 <= 4")


def vector_field(x, params: FlowParams | None = None, *, check: bool = True) -> np.ndarray:
    """Right-hand side of the model flow; accepts a point or an ``(m, n)`` batch."""
    x = np.asarray(x, dtype=float)
    if check:
        _check_cylinder(x, params or FlowParams(x.shape[-1]))
    if x.ndim == 1:
        return _field_point(x)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    out = np.empty_like(x)
    out[..., :1] = np.where(r2 <= 4.0, 1.0 - (r2 - 4.0) ** 2 / 9.0, 1.0)
    rate = np.where(
        r2 <= 2.0,
        -1.0,
        np.where(r2 <= 4.0, 0.5 * (np.sin(0.5 * math.pi * (r2 - 3.0)) - 1.0), 0.0),
    )
    out[..., 1:] = rate * x[..., 1:]
    return out


def _field_point(x: np.ndarray) -> np.ndarray:
    # scalar branch logic; same formulas as the batched path
    r2 = float(x @ x)
    if r2 <= 2.0:
        rate = -1.0
    elif r2 <= 4.0:
        rate = 0.5 * (math.sin(0.5 * math.pi * (r2 - 3.0)) - 1.0)
    else:
        rate = 0.0
    out = rate * x
    out[0] = 1.0 - (r2 - 4.0) ** 2 / 9.0 if r2 <= 4.0 else 1.0
    return out


def axis_speed(x1) -> np.ndarray:
    """Axial component of the field restricted to the x_1-axis."""
    x1 = np.asarray(x1, dtype=float)
    r2 = x1 * x1
    return np.where(r2 <= 4.0, 1.0 - (r2 - 4.0) ** 2 / 9.0, 1.0)


def _rk4_step(x, h):
    k1 = vector_field(x, check=False)
    k2 = vector_field(x + 0.5 * h * k1, check=False)
    k3 = vector_field(x + 0.5 * h * k2, check=False)
    k4 = vector_field(x + h * k3, check=False)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(x, t: float, dt: float = DEFAULT_DT, params: FlowParams | None = None,
              *, return_path: bool = False):
    """Classical RK4 with fixed step ``dt``; negative ``t`` runs the flow backward.

    The last step is shortened to land exactly on ``t``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.array(x, dtype=float)
    _check_cylinder(x, params or FlowParams(x.shape[-1]))
    sign = 1.0 if t >= 0 else -1.0
    n_full = int(math.floor(abs(t) / dt + 1e-9))
    rest = abs(t) - n_full * dt
    steps = [sign * dt] * n_full
    if rest > 1e-14:
        steps.append(sign * rest)
    path = [x.copy()] if return_path else None
    for h in steps:
        x = _rk4_step(x, h)
        if return_path:
            path.append(x.copy())
    if return_path:
        times = np.concatenate([[0.0], np.cumsum(steps)])
        return x, times, np.array(path)
    return x


def time_one_map(x, dt: float = DEFAULT_DT, params: FlowParams | None = None) -> np.ndarray:
    return integrate(x, 1.0, dt, params)


def time_one_inverse(x, dt: float = DEFAULT_DT, params: FlowParams | None = None) -> np.ndarray:
    return integrate(x, -1.0, dt, params)


def translation_map(x, t: float = 1.0) -> np.ndarray:
    """g^t: shift the first coordinate by ``t``."""
    y = np.array(x, dtype=float)
    y[..., 0] += t
    return y
