"""Numerical models of the Fox-Artin wild arc, the Pixton diffeomorphism of
S^3 built on it, and two glued Morse-Smale-type diffeomorphisms of S^4."""
from __future__ import annotations

__version__ = "0.1.0"

from .analysis import (
    FixedPointReport,
    basin_sample,
    census,
    classify_fixed_point,
    heteroclinic_test,
    numerical_jacobian,
    trace_separatrix,
)
from .arcs import (
    ArcTriple,
    PolylineArc,
    WildArcModel,
    assemble_wild_arc,
    build_arc_triple,
    mazur_knot,
    negative_control,
    verify_conditions,
)
from .flow import FlowParams, integrate, time_one_inverse, time_one_map, vector_field
from .geometry import Chart, ChartPoint, fundamental_reduce, homothety_apply
from .sphere import SphereMapSpec, fox_artin_sphere_map, pixton_map, trivial_sphere_map
from .surgery import SurgeredMap, TaggedPoint, Variant, build_surgery
from .tube import ChartKind, TubeChart, frame_chart, model_diffeo, radial_chart

__all__ = [
    "__version__",
    "ArcTriple",
    "Chart",
    "ChartKind",
    "ChartPoint",
    "FixedPointReport",
    "FlowParams",
    "PolylineArc",
    "SphereMapSpec",
    "SurgeredMap",
    "TaggedPoint",
    "TubeChart",
    "Variant",
    "WildArcModel",
    "assemble_wild_arc",
    "basin_sample",
    "build_arc_triple",
    "build_surgery",
    "census",
    "classify_fixed_point",
    "fox_artin_sphere_map",
    "frame_chart",
    "fundamental_reduce",
    "heteroclinic_test",
    "homothety_apply",
    "integrate",
    "mazur_knot",
    "model_diffeo",
    "negative_control",
    "numerical_jacobian",
    "pixton_map",
    "radial_chart",
    "time_one_inverse",
    "time_one_map",
    "trace_separatrix",
    "trivial_sphere_map",
    "vector_field",
    "verify_conditions",
]
