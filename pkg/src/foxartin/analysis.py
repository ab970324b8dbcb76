"""Numerical certification: finite-difference Jacobians, multiplier spectra,
fixed-point classification, separatrix tracing, heteroclinic membership and
basin censuses.

Maps are plain callables.  Jacobian-based tools need a map on coordinate
arrays; the orbit tools accept any point type together with a ``distance``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .arcs import PolylineArc
from .errors import DivergedOffChart, EvaluationFailed, NotFixed

__all__ = [
    "FixedPointReport",
    "HeteroclinicResult",
    "numerical_jacobian",
    "classify_fixed_point",
    "classify_multipliers",
    "unstable_direction",
    "trace_separatrix",
    "heteroclinic_test",
    "basin_sample",
    "census",
    "HYPERBOLIC_BAND",
]

HYPERBOLIC_BAND = 1e-3


def _euclid(p, q) -> float:
    return float(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


@dataclass
class FixedPointReport:
    location: object
    residual: float
    multipliers: np.ndarray          # moduli, descending
    eigenvalues: np.ndarray
    type: str                        # SINK, SOURCE, SADDLE, NONHYPERBOLIC
    unstable_dim: int
    name: str = ""
    jacobian: np.ndarray | None = field(default=None, repr=False)

    @property
    def label(self) -> str:
        if self.type == "SADDLE":
            return f"SADDLE(u={self.unstable_dim})"
        return self.type

    def as_dict(self) -> dict:
        loc = self.location
        if hasattr(loc, "coords"):
            loc = {"chart": loc.chart.name, "coords": [float(c) for c in loc.coords]}
        elif hasattr(loc, "as_dict"):
            loc = loc.as_dict()
        else:
            loc = [float(c) for c in np.asarray(loc).ravel()]
        return {
            "name": self.name,
            "location": loc,
            "residual": float(self.residual),
            "multipliers": [float(m) for m in self.multipliers],
            "type": self.type,
            "unstable_dim": int(self.unstable_dim),
            "label": self.label,
        }


def numerical_jacobian(f: Callable, x, eps: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = eps
        try:
            fp = np.asarray(f(x + e), dtype=float)
            fm = np.asarray(f(x - e), dtype=float)
        except Exception as exc:  # noqa: BLE001 - any failure inside the stencil
            raise EvaluationFailed(f"map failed inside the stencil: {exc}") from exc
        cols.append((fp - fm) / (2 * eps))
    return np.column_stack(cols)


def classify_multipliers(moduli, band: float = HYPERBOLIC_BAND) -> tuple[str, int]:
    moduli = np.asarray(moduli, dtype=float)
    if np.any(np.abs(moduli - 1.0) <= band):
        return "NONHYPERBOLIC", int(np.sum(moduli > 1.0 + band))
    u = int(np.sum(moduli > 1.0 + band))
    if u == 0:
        return "SINK", 0
    if u == moduli.size:
        return "SOURCE", u
    return "SADDLE", u


def classify_fixed_point(f: Callable, x, *, eps: float = 1e-5, band: float = HYPERBOLIC_BAND,
                         residual_tol: float = 1e-6, name: str = "",
                         location=None) -> FixedPointReport:
    """Classify a fixed point of a map on coordinate arrays by its multiplier moduli."""
    x = np.asarray(x, dtype=float)
    residual = float(np.linalg.norm(np.asarray(f(x), dtype=float) - x))
    if residual > residual_tol:
        raise NotFixed(f"residual {residual:.3e} exceeds {residual_tol:.1e}")
    J = numerical_jacobian(f, x, eps)
    eig = np.linalg.eigvals(J)
    order = np.argsort(-np.abs(eig), kind="stable")
    eig = eig[order]
    moduli = np.abs(eig)
    kind, u = classify_multipliers(moduli, band)
    return FixedPointReport(x if location is None else location, residual, moduli, eig,
                            kind, u, name, J)


def unstable_direction(J: np.ndarray, iterations: int = 8) -> tuple[float, np.ndarray]:
    """Largest-modulus eigenvalue and its unit eigenvector by shifted inverse iteration."""
    eig = np.linalg.eigvals(J)
    mu = eig[int(np.argmax(np.abs(eig)))].real
    n = J.shape[0]
    shift = mu * (1 + 1e-9) if mu != 0 else 1e-12
    A = J - shift * np.eye(n)
    v = np.ones(n) / np.sqrt(n)
    for _ in range(iterations):
        v = np.linalg.solve(A, v)
        v /= np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    lam = float(v @ J @ v)
    return lam, v


def trace_separatrix(f: Callable, saddle, side: int = 1, steps: int = 40,
                     seed_dist: float = 1e-4, per_step: int = 8, *,
                     direction=None, multiplier: float | None = None,
                     jacobian: np.ndarray | None = None,
                     bound: float = 1e8, batch: bool = False) -> PolylineArc:
    """Invariant curve through ``saddle`` leaving along ``side * direction``.

    Seeds fill one fundamental domain [seed_dist, multiplier * seed_dist] along
    the direction (geometric spacing) and are iterated ``steps`` times, so the
    output is ordered along the curve.  By default the direction is the single
    unstable eigenvector of the map's Jacobian.  With ``batch=True`` the map
    is called once per step on the stacked seeds.
    """
    x0 = np.asarray(getattr(saddle, "location", saddle), dtype=float)
    if direction is None:
        J = jacobian if jacobian is not None else getattr(saddle, "jacobian", None)
        if J is None:
            J = numerical_jacobian(f, x0)
        moduli = np.abs(np.linalg.eigvals(J))
        if int(np.sum(moduli > 1 + HYPERBOLIC_BAND)) != 1:
            raise ValueError("tracing needs exactly one unstable multiplier")
        multiplier, direction = unstable_direction(J)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    lam = abs(multiplier) if multiplier is not None else 2.0
    seeds = [x0 + side * seed_dist * lam ** (j / per_step) * direction for j in range(per_step)]
    pts = [x0]
    current = seeds
    for _ in range(steps + 1):
        pts.extend(current)
        nxt = np.asarray(f(np.array(current)), dtype=float) if batch else \
            np.array([np.asarray(f(p), dtype=float) for p in current])
        if not np.all(np.isfinite(nxt)) or np.linalg.norm(nxt, axis=-1).max() > bound:
            raise DivergedOffChart("iterate left the chart")
        current = list(nxt)
    # drop iterates that have stalled on an attractor
    floor = 2e-12 * max(1.0, float(np.abs(np.array(pts)).max()))
    verts = [pts[0]]
    for p in pts[1:]:
        if np.linalg.norm(p - verts[-1]) > floor:
            verts.append(p)
    return PolylineArc(np.array(verts))


@dataclass
class HeteroclinicResult:
    passed: bool
    forward_distances: list
    backward_distances: list
    forward_end: object = None
    backward_end: object = None

    @property
    def forward_final(self) -> float:
        return self.forward_distances[-1]

    @property
    def backward_final(self) -> float:
        return self.backward_distances[-1]

    def passes_at(self, tol: float) -> bool:
        return self.forward_final < tol and self.backward_final < tol


def _orbit_distances(f, x, target, n, distance):
    out = []
    p = x
    for _ in range(n):
        try:
            p = f(p)
        except Exception:  # noqa: BLE001 - left the domain; counts as failure
            out.extend([float("inf")] * (n - len(out)))
            return out, None
        out.append(distance(p, target))
    return out, p


def heteroclinic_test(f: Callable, f_inv: Callable, x, sigma1, sigma2, n_fwd: int = 20,
                      n_bwd: int = 20, tol: float = 1e-2,
                      distance: Callable = _euclid) -> HeteroclinicResult:
    """Pass iff f^{n_fwd}(x) is within ``tol`` of sigma1 and f^{-n_bwd}(x) of sigma2."""
    fwd, fend = _orbit_distances(f, x, sigma1, n_fwd, distance)
    bwd, bend = _orbit_distances(f_inv, x, sigma2, n_bwd, distance)
    res = HeteroclinicResult(False, fwd, bwd, fend, bend)
    res.passed = res.passes_at(tol)
    return res


def basin_sample(f: Callable, sinks: Mapping[str, object], starts: Sequence, max_iters: int = 200,
                 capture: float = 1e-4, distance: Callable = _euclid) -> dict:
    """Fraction of ``starts`` captured by each sink (first approach within ``capture``).

    Returns ``{"fractions": {...}, "assignments": [...]}``; fractions include
    ``"UNRESOLVED"`` and sum to one.
    """
    names = list(sinks)
    assignments = []
    for x in starts:
        p = x
        hit = "UNRESOLVED"
        for _ in range(max_iters + 1):
            found = next((nm for nm in names if distance(p, sinks[nm]) < capture), None)
            if found is not None:
                hit = found
                break
            try:
                p = f(p)
            except Exception:  # noqa: BLE001
                break
        assignments.append(hit)
    counts = Counter(assignments)
    total = max(len(assignments), 1)
    fractions = {nm: counts.get(nm, 0) / total for nm in names + ["UNRESOLVED"]}
    return {"fractions": fractions, "assignments": assignments}


def census(reports: Sequence[FixedPointReport]) -> dict:
    """Counts of fixed-point types, e.g. ``{"SINK": 2, "SADDLE": 1, "SOURCE": 1}``."""
    return dict(sorted(Counter(r.type for r in reports).items()))
