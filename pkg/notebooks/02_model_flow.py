"""
The model flow on the cylinder
==============================

On C = {x_2^2 + ... + x_n^2 <= 4} a flow that is the unit translation far
away, but inside the ball r^2 <= 4 slows to a stop at two axis points: a sink
at x_1 = -1 and a saddle at x_1 = +1.  Its time-one map is what the tube
chart transplants around the arc.

Run:  python3 notebooks/02_model_flow.py
"""
from __future__ import annotations

import math

import numpy as np

from foxartin.analysis import classify_fixed_point, trace_separatrix
from foxartin.flow import axis_speed, integrate, time_one_map, vector_field
from foxartin.sphere import stable_wall_radius

# %% Axial speed along the axis
for x1 in (-2.0, -1.5, -1.0, 0.0, 1.0, 1.5, 2.0):
    print(f"x1 = {x1:+.1f}: axial speed {float(axis_speed(x1)):+.4f}")

# %% The two equilibria and their time-one multipliers
for x1 in (-1.0, 1.0):
    rep = classify_fixed_point(time_one_map, np.array([x1, 0.0, 0.0]))
    print(f"x1 = {x1:+.0f}: {rep.label:12s} multipliers {np.round(rep.multipliers, 5).tolist()}")
print("expected: e^{4/3} = %.5f, e^{-1} = %.5f, e^{-4/3} = %.5f"
      % (math.exp(4 / 3), math.exp(-1), math.exp(-4 / 3)))

# %% Beyond the ball the flow is pure translation
y = np.array([4.0, 1.0, 0.5])
print("field at", y.tolist(), "=", vector_field(y).tolist())
print("time-one map moves it by", (time_one_map(y) - y).round(14).tolist())

# %% The stable wall
# Orbits entering from the far left either fall into the sink or slip past the
# saddle.  The separating set is a surface of revolution; at axial level -3 it
# has radius rho*, found by bisection on the time-one map.
rho = stable_wall_radius()
print(f"stable wall radius at x1 = -3: {rho:.12f}")
for dr in (-1e-3, 1e-3):
    end = integrate(np.array([-3.0, rho + dr, 0.0]), 30.0)
    print(f"  start {dr:+.0e} from the wall ends at x1 = {end[0]:+.3f}")

# %% The unstable separatrix of the saddle
saddle = classify_fixed_point(time_one_map, np.array([1.0, 0.0, 0.0]))
branch = trace_separatrix(time_one_map, saddle, side=-1, steps=20)
print(f"separatrix toward the sink: {len(branch.vertices)} vertices, "
      f"ends at {branch.end.round(6).tolist()}")
