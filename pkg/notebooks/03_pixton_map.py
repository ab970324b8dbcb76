"""
A Morse-Smale map of S^3 with a wild separatrix
================================================

The tube chart zeta carries a thin h-invariant tube around the Fox-Artin arc
onto the cylinder, turning h into the unit translation.  Replacing that
translation by the time-one map of the model flow, and keeping h elsewhere,
gives a diffeomorphism of R^3 that extends to S^3 with the point at infinity
as a source.  Four fixed points result.

Run:  python3 notebooks/03_pixton_map.py
"""
from __future__ import annotations

import numpy as np

from foxartin.analysis import basin_sample, census, classify_fixed_point
from foxartin.geometry import Chart, ChartPoint, stereo_to_plane
from foxartin.sphere import pixton_map, sphere_distance

# %% Build the map
spec = pixton_map()
print("summary:", spec.summary())

# %% Fixed points, each classified in its own chart
reports = []
for name, p in spec.fixed_points.items():
    rep = classify_fixed_point(spec.chart_map(p.chart), p.coords, name=name)
    reports.append(rep)
    print(f"{name:6s} {p.chart.name:5s} {rep.label:12s} residual {rep.residual:.1e} "
          f"moduli {np.round(rep.multipliers, 4).tolist()}")
print("census:", census(reports))

# %% Near the poles the map is exactly h (south) and h^{-1} (north)
rng = np.random.default_rng(0)
x = ChartPoint(Chart.SOUTH, rng.normal(size=3) * spec.south_annulus[0] / 4)
z = ChartPoint(Chart.NORTH, rng.normal(size=3) * spec.north_annulus[0] / 4)
print("south cap: f(x) - x/2 =", (spec.apply(x).coords - x.coords / 2).tolist())
print("north cap: f(z) - 2z  =", (spec.apply(z).in_chart(Chart.NORTH).coords - 2 * z.coords).tolist())

# %% Where do random points go?
# The tube is thin (angular radius 0.02), so the basin of the sink on the arc is
# a thin neighbourhood of the arc; almost every uniform sample of S^3 ends at S.
starts = []
for _ in range(100):
    p = rng.normal(size=4)
    p /= np.linalg.norm(p)
    chart = Chart.SOUTH if p[-1] <= 0 else Chart.NORTH
    starts.append(ChartPoint(chart, stereo_to_plane(p, chart)))
sinks = {nm: spec.fixed_points[nm] for nm in ("omega", "S")}
print("basin fractions:", basin_sample(spec.apply, sinks, starts, distance=sphere_distance)["fractions"])

# %% A point just off the arc's core, on the sink side of the saddle, is captured by omega
near = ChartPoint(Chart.SOUTH, spec.tube_chart.zeta_inv(np.array([-2.0, 0.3, 0.0])))
for _ in range(40):
    near = spec.apply(near)
print(f"distance to omega after 40 steps: {sphere_distance(near, spec.fixed_points['omega']):.1e}")
