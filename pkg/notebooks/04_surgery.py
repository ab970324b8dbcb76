"""
Gluing two sphere maps into maps of S^4
=======================================

Two four-dimensional sphere maps are cut open at a pole and glued along
annular collars: on the left the map built on a straight ray, on the right
the map built on the Fox-Artin arc.  The collar identification commutes with
h, so the glued map is well defined.  Two variants: one joins the two
saddles by an arc of heteroclinic points, the other by a tube of them.

Run:  python3 notebooks/04_surgery.py   (about 30 s)
"""
from __future__ import annotations

import numpy as np

from foxartin.analysis import census
from foxartin.surgery import (
    build_surgery,
    control_samples,
    heteroclinic_witnesses,
    loop_winding,
    wall_loop,
    witness_samples,
)

for variant in ("arc", "cylinder"):
    # %% Build and certify the gluing
    m = build_surgery(variant)
    print(f"== {variant} variant: gluing {m.gluing.as_dict()}")
    print("   residuals:", {k: float(f"{v:.2e}") for k, v in m.residuals.items()})

    # %% Fixed points of the glued map
    reports = m.classify()
    for r in reports:
        print(f"   {r.name:12s} {r.label}")
    print("   census:", census(reports))

    # %% Heteroclinic points: forward to one saddle, backward to the other
    wit = heteroclinic_witnesses(m, witness_samples(m, 20))
    ctl = heteroclinic_witnesses(m, control_samples(m, 20, np.random.default_rng(0)))
    print(f"   witnesses passing {sum(r.passed for r in wit)}/20, "
          f"random controls passing {sum(r.passed for r in ctl)}/20")
    worst = max(max(r.forward_final, r.backward_final) for r in wit)
    print(f"   worst witness distance after 20 steps each way: {worst:.1e}")

    if variant == "cylinder":
        # %% The heteroclinic tube, cut at one axial level, circles the core once
        print("   loop winding around the core:", round(loop_winding(m, wall_loop(m))))
