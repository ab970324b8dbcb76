"""Command-line front end.

Each subcommand resolves its settings from built-in defaults, then the
command's section of a JSON ``--config`` file, then explicit flags; writes its
outputs under ``--out``; and exits 0 on pass, 2 on a certification failure,
3 on I/O errors and 4 on a bad configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    basin_sample,
    census,
    classify_fixed_point,
    trace_separatrix,
)
from .arcs import (
    NEGATIVE_CONTROLS,
    assemble_wild_arc,
    build_arc_triple,
    mazur_knot,
    negative_control,
    verify_conditions,
)
from .errors import ConstructionFailed, FoxArtinError, GluingFailed
from .flow import DEFAULT_DT, axis_speed, integrate, vector_field
from .geometry import Chart, ChartPoint, stereo_to_plane
from .io import write_csv, write_json, write_obj
from .sphere import (
    pixton_map,
    sphere_distance,
    stable_set_cylinder_samples,
    unstable_set_samples,
)
from .surgery import (
    build_surgery,
    control_samples,
    heteroclinic_witnesses,
    loop_winding,
    wall_loop,
    witness_samples,
)
from .tube import frame_chart, tube_mesh

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_CONFIG = 0, 2, 3, 4

EXPECTED_CENSUS = {
    "pixton": {"SADDLE": 1, "SINK": 2, "SOURCE": 1},
    "arc": {"SADDLE": 2, "SINK": 3, "SOURCE": 1},
    "cylinder": {"SADDLE": 2, "SINK": 2, "SOURCE": 2},
}

SHARED = {"seed": 0, "out": "out", "dt": DEFAULT_DT}
DEFAULTS = {
    "build-arc": {"samples_per_arc": 64, "levels": 2, "negative_control": None},
    "verify-arc": {"densities": [32, 64, 128], "levels": 3},
    "flow-field": {"dim": 3, "grid": 9},
    "fixed-points": {"dim": 3},
    "orbit": {"dim": 3, "map": "flow", "steps": 40, "start": None},
    "separatrix": {"dim": 3, "steps": 40, "seed_dist": 1e-4},
    "pixton": {"samples_per_arc": 64, "levels": 2, "basin_samples": 200, "max_iters": 200,
               "orbit": False, "orbit_steps": 60, "export_tube": False},
    "surgery": {"variant": "arc", "samples_per_arc": 64, "levels": 2, "witnesses": 60,
                "controls": 100, "tol": 1e-2, "n_fwd": 20, "n_bwd": 20, "residual_samples": 1000},
    "export": {"samples_per_arc": 64, "levels": 2},
}
POSITIVE = {"dt", "tol", "seed_dist"}


class ConfigError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


def _norm_key(k: str) -> str:
    return k.replace("-", "_")


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(SHARED)
    cfg.update(DEFAULTS[command])
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError:
            raise
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        section = doc.get(command, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section {command!r} must be an object")
        for k, v in section.items():
            key = _norm_key(k)
            if key not in cfg:
                raise ConfigError(f"unknown setting {k!r} for {command}")
            cfg[key] = v
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key in POSITIVE & cfg.keys():
        if not isinstance(cfg[key], (int, float)) or not cfg[key] > 0:
            raise ConfigError(f"{key} must be positive")
    if "dim" in cfg and cfg["dim"] not in (3, 4):
        raise ConfigError("dim must be 3 or 4")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if "levels" in cfg and (not isinstance(cfg["levels"], int) or cfg["levels"] < 0):
        raise ConfigError("levels must be a non-negative integer")
    if command == "build-arc" and cfg["negative_control"] not in (None, *NEGATIVE_CONTROLS):
        raise ConfigError(f"negative control must be one of {sorted(NEGATIVE_CONTROLS)}")
    if command == "surgery" and cfg["variant"] not in ("arc", "cylinder"):
        raise ConfigError("variant must be 'arc' or 'cylinder'")
    return cfg


def _meta(command: str, cfg: dict) -> dict:
    # the output directory is left out so reruns elsewhere stay byte-identical
    recorded = {k: v for k, v in cfg.items() if k != "out"}
    return {"command": command, "config": recorded, "version": __version__}


def _out(cfg: dict, name: str) -> Path:
    return Path(cfg["out"]) / name


def _coords_header(n: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


# --------------------------------------------------------------------------
# commands


def cmd_build_arc(cfg: dict) -> bool:
    meta = _meta("build-arc", cfg)
    kind = cfg["negative_control"]
    if kind:
        triple = negative_control(kind, cfg["samples_per_arc"])
    else:
        triple = build_arc_triple(cfg["samples_per_arc"], check=False)
    report = verify_conditions(triple)
    rows = []
    try:
        model = assemble_wild_arc(triple, cfg["levels"])
        for v, lev in zip(model.assembled.vertices, np.append(model.levels, model.levels[-1])):
            rows.append([*v, int(lev)])
    except FoxArtinError:
        model = None
    write_csv(_out(cfg, "arc.csv"), ["x1", "x2", "x3", "level"], rows, meta)
    write_obj(_out(cfg, "delta.obj"), triple.delta.vertices, triple.delta.faces, meta=meta)
    payload = report.as_dict()
    payload["negative_control"] = kind
    if kind:
        payload["intended_failure"] = NEGATIVE_CONTROLS[kind]
    write_json(_out(cfg, "conditions.json"), payload, meta)
    print(f"conditions: {'PASS' if report.all_pass else 'FAIL ' + ','.join(report.failing())}; "
          f"Delta meets a {report.witnesses['intersections_delta_a']}x, "
          f"c {report.witnesses['intersections_delta_c']}x")
    return report.all_pass and model is not None


def cmd_verify_arc(cfg: dict) -> bool:
    meta = _meta("verify-arc", cfg)
    out = {"densities": {}, "negative_controls": {}}
    ok = True
    for n in cfg["densities"]:
        r = verify_conditions(build_arc_triple(int(n), check=False))
        out["densities"][str(n)] = r.as_dict()
        ok &= r.all_pass
        print(f"samples_per_arc={n}: {'PASS' if r.all_pass else 'FAIL ' + ','.join(r.failing())}")
    for kind, intended in NEGATIVE_CONTROLS.items():
        r = verify_conditions(negative_control(kind))
        hit = intended in r.failing()
        out["negative_controls"][kind] = {"intended": intended, "failing": r.failing(),
                                          "caught": hit}
        ok &= hit
        print(f"negative control {kind}: fails {r.failing()} ({'caught' if hit else 'MISSED'})")
    model = assemble_wild_arc(build_arc_triple(), cfg["levels"])
    worst = 0.0
    for k in range(-cfg["levels"], cfg["levels"]):
        worst = max(worst, float(np.abs(model.level_portion(k) / 2 - model.level_portion(k + 1)).max()))
    knot = mazur_knot(model)
    out["self_similarity_residual"] = worst
    out["mazur"] = {"closure_gap": knot.closure_gap, "winding": knot.winding}
    ok &= worst < 1e-9 and knot.closure_gap < 1e-9 and round(knot.winding) == 1
    write_json(_out(cfg, "verify.json"), out, meta)
    return bool(ok)


def cmd_flow_field(cfg: dict) -> bool:
    n, g = cfg["dim"], cfg["grid"]
    axes = [np.linspace(-3.0, 3.0, g)] + [np.linspace(-2.0, 2.0, g)] * (n - 1)
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1).T
    pts = pts[np.sum(pts[:, 1:] ** 2, axis=1) <= 4.0]
    vf = vector_field(pts)
    write_csv(_out(cfg, "flow_field.csv"), _coords_header(n) + _coords_header(n, "v"),
              np.hstack([pts, vf]).tolist(), _meta("flow-field", cfg))
    print(f"{len(pts)} field samples")
    return True


def _flow_equilibria(cfg: dict):
    from scipy.optimize import brentq

    n = cfg["dim"]
    xs = np.linspace(-2.0, 2.0, 401)
    sp = axis_speed(xs)
    roots = [brentq(lambda t: float(axis_speed(t)), xs[i], xs[i + 1], xtol=1e-15)
             for i in range(len(xs) - 1) if sp[i] * sp[i + 1] < 0]
    roots += [float(xs[i]) for i in range(len(xs)) if sp[i] == 0.0]
    f = lambda x: integrate(x, 1.0, cfg["dt"])  # noqa: E731
    reps = []
    for r in sorted(set(round(r, 12) for r in roots)):
        x = np.zeros(n)
        x[0] = r
        reps.append(classify_fixed_point(f, x, name=f"x1={r:+.12g}"))
    return reps


# Roles as originally published for the axis points.  The printed field gives
# the opposite roles; both are written out and nothing is relabelled.
PUBLISHED_ROLES = {"x1=+1": "SINK", "x1=-1": "SADDLE"}


def cmd_fixed_points(cfg: dict) -> bool:
    reps = _flow_equilibria(cfg)
    computed = {f"x1={r.location[0]:+.0f}": r.type for r in reps}
    write_json(_out(cfg, "fixed_points.json"),
               {"fixed_points": [r.as_dict() for r in reps], "census": census(reps),
                "published_roles": PUBLISHED_ROLES,
                "roles_match_published": computed == PUBLISHED_ROLES},
               _meta("fixed-points", cfg))
    for r in reps:
        print(f"{r.name}: {r.label}  moduli {np.round(r.multipliers, 6).tolist()}")
    return sorted(r.label for r in reps) == ["SADDLE(u=1)", "SINK"]


def _random_sphere_point(rng: np.random.Generator, n: int) -> ChartPoint:
    p = rng.normal(size=n + 1)
    p /= np.linalg.norm(p)
    chart = Chart.SOUTH if p[-1] <= 0 else Chart.NORTH
    return ChartPoint(chart, stereo_to_plane(p, chart))


def cmd_orbit(cfg: dict) -> bool:
    rng = np.random.default_rng(cfg["seed"])
    meta = _meta("orbit", cfg)
    if cfg["map"] == "flow":
        n = cfg["dim"]
        if cfg["start"] is None:
            x0 = np.concatenate([[rng.uniform(-3.0, -2.0)], rng.uniform(-0.8, 0.8, n - 1)])
        else:
            x0 = np.asarray(cfg["start"], dtype=float)
        _, t, path = integrate(x0, float(cfg["steps"]), cfg["dt"], return_path=True)
        write_csv(_out(cfg, "orbit.csv"), ["t"] + _coords_header(n),
                  [[ti, *p] for ti, p in zip(t, path)], meta)
        print(f"flow orbit from {x0.tolist()} ends at {path[-1].tolist()}")
        return True
    if cfg["map"] != "pixton":
        raise ConfigError("map must be 'flow' or 'pixton'")
    spec = pixton_map(dt=cfg["dt"])
    x = _random_sphere_point(rng, 3) if cfg["start"] is None else \
        ChartPoint(Chart.SOUTH, np.asarray(cfg["start"], dtype=float))
    return _write_sphere_orbit(spec, x, cfg["steps"], _out(cfg, "orbit.csv"), meta)


def _write_sphere_orbit(spec, x: ChartPoint, steps: int, path: Path, meta: dict) -> bool:
    rows = [[0, *x.to_sphere()]]
    for k in range(1, steps + 1):
        x = spec.apply(x)
        rows.append([k, *x.to_sphere()])
    sinks = {nm: spec.fixed_points[nm] for nm in ("omega", "S")}
    near = {nm: sphere_distance(x, p) for nm, p in sinks.items()}
    write_csv(path, ["step"] + _coords_header(spec.dim + 1, "p"), rows, meta)
    best = min(near, key=near.get)
    print(f"orbit ends {near[best]:.2e} from sink {best}")
    return True


def cmd_separatrix(cfg: dict) -> bool:
    n = cfg["dim"]
    saddle = np.zeros(n)
    saddle[0] = 1.0
    f = lambda x: integrate(x, 1.0, cfg["dt"])  # noqa: E731
    rep = classify_fixed_point(f, saddle)
    rows = []
    for side, name in ((-1, "unstable_to_sink"), (1, "unstable_escape")):
        arc = trace_separatrix(f, rep, side, steps=cfg["steps"], seed_dist=cfg["seed_dist"], bound=1e3)
        rows += [[name, i, *v] for i, v in enumerate(arc.vertices)]
    for i, v in enumerate(stable_set_cylinder_samples(n, cfg["dt"], directions=8)):
        rows.append(["stable", i, *v])
    write_csv(_out(cfg, "separatrix.csv"), ["branch", "index"] + _coords_header(n), rows,
              _meta("separatrix", cfg))
    print(f"{len(rows)} separatrix samples")
    return True


def cmd_pixton(cfg: dict) -> bool:
    meta = _meta("pixton", cfg)
    spec = pixton_map(cfg["samples_per_arc"], cfg["levels"], cfg["dt"])
    reps = [classify_fixed_point(spec.chart_map(p.chart), p.coords, name=nm, location=p)
            for nm, p in spec.fixed_points.items()]
    cen = census(reps)
    ok = cen == EXPECTED_CENSUS["pixton"] and all(r.residual < 1e-8 for r in reps)
    write_json(_out(cfg, "census.json"),
               {"fixed_points": [r.as_dict() for r in reps], "census": cen,
                "sphere_map": spec.summary()}, meta)

    rows = [["unstable", i, *v] for i, v in enumerate(unstable_set_samples(spec.tube_chart, cfg["dt"]))]
    stable = stable_set_cylinder_samples(3, cfg["dt"], directions=8)
    rows += [["stable", i, *spec.tube_chart.zeta_inv(y)] for i, y in enumerate(stable)]
    write_csv(_out(cfg, "separatrices.csv"), ["branch", "index", "x1", "x2", "x3"], rows, meta)

    rng = np.random.default_rng(cfg["seed"])
    starts = [_random_sphere_point(rng, 3) for _ in range(cfg["basin_samples"])]
    sinks = {nm: spec.fixed_points[nm] for nm in ("omega", "S")}
    basin = basin_sample(spec.apply, sinks, starts, cfg["max_iters"], distance=sphere_distance)
    write_json(_out(cfg, "basin.json"), {"fractions": basin["fractions"],
                                         "counts": dict(Counter(basin["assignments"]))}, meta)
    if cfg["orbit"]:
        _write_sphere_orbit(spec, _random_sphere_point(rng, 3), cfg["orbit_steps"],
                            _out(cfg, "orbit.csv"), meta)
    if cfg["export_tube"]:
        verts, faces = tube_mesh(spec.tube_chart)
        write_obj(_out(cfg, "tube.obj"), verts, faces, meta=meta)
    for r in reps:
        print(f"{r.name}: {r.label}  residual {r.residual:.1e}")
    print(f"census {cen}; basin {basin['fractions']}")
    return ok


def cmd_surgery(cfg: dict) -> bool:
    meta = _meta("surgery", cfg)
    m = build_surgery(cfg["variant"], cfg["samples_per_arc"], cfg["levels"], cfg["dt"],
                      residual_samples=cfg["residual_samples"], seed=cfg["seed"])
    reps = m.classify()
    cen = census(reps)
    write_json(_out(cfg, "census.json"),
               {"variant": m.variant.value, "fixed_points": [r.as_dict() for r in reps],
                "census": cen, "gluing": m.gluing.as_dict(),
                "left": m.left_spec.summary(), "right": m.right_spec.summary()}, meta)
    write_json(_out(cfg, "residuals.json"), m.residuals, meta)

    wit = witness_samples(m, cfg["witnesses"])
    ctl = control_samples(m, cfg["controls"], np.random.default_rng(cfg["seed"]))
    kw = dict(n_fwd=cfg["n_fwd"], n_bwd=cfg["n_bwd"], tol=cfg["tol"])
    rw = heteroclinic_witnesses(m, wit, **kw)
    rc = heteroclinic_witnesses(m, ctl, **kw)
    rows = []
    for kind, pts, res in (("witness", wit, rw), ("control", ctl, rc)):
        for i, (tp, r) in enumerate(zip(pts, res)):
            rows.append([kind, i, tp.piece.name, r.passed, r.forward_final, r.backward_final,
                         *tp.point.to_sphere()])
    write_csv(_out(cfg, "witnesses.csv"),
              ["kind", "index", "piece", "passed", "forward_distance", "backward_distance",
               "p1", "p2", "p3", "p4", "p5"], rows, meta)
    n_pass = sum(r.passed for r in rw)
    n_fail = sum(not r.passed for r in rc)
    ok = (cen == EXPECTED_CENSUS[cfg["variant"]] and n_pass >= 50
          and n_fail >= math.ceil(0.95 * len(rc)))
    if m.variant.value == "cylinder":
        ok &= abs(loop_winding(m, wall_loop(m)) - 1.0) < 1e-9
    print(f"census {cen}; residuals {m.residuals}")
    print(f"witnesses passing {n_pass}/{len(rw)}; controls failing {n_fail}/{len(rc)}")
    return bool(ok)


def cmd_export(cfg: dict) -> bool:
    meta = _meta("export", cfg)
    triple = build_arc_triple(cfg["samples_per_arc"])
    model = assemble_wild_arc(triple, cfg["levels"])
    write_csv(_out(cfg, "arc.csv"), ["x1", "x2", "x3"], model.assembled.vertices.tolist(), meta)
    write_obj(_out(cfg, "delta.obj"), triple.delta.vertices, triple.delta.faces, meta=meta)
    verts, faces = tube_mesh(frame_chart(model))
    write_obj(_out(cfg, "tube.obj"), verts, faces, meta=meta)
    knot = mazur_knot(model)
    write_csv(_out(cfg, "mazur.csv"), ["u1", "u2", "u3", "fiber"],
              [[*p.direction, p.fiber] for p in knot.points], meta)
    print(f"exported arc ({len(model.assembled.vertices)} vertices), Delta, tube and Mazur knot")
    return True


COMMANDS = {
    "build-arc": cmd_build_arc,
    "verify-arc": cmd_verify_arc,
    "flow-field": cmd_flow_field,
    "fixed-points": cmd_fixed_points,
    "orbit": cmd_orbit,
    "separatrix": cmd_separatrix,
    "pixton": cmd_pixton,
    "surgery": cmd_surgery,
    "export": cmd_export,
}


COMMAND_HELP = {
    "build-arc": "build the arc triple and truncated arc; check the three conditions",
    "verify-arc": "check the conditions across densities, controls, self-similarity and the quotient knot",
    "flow-field": "sample the model vector field on a grid of the cylinder",
    "fixed-points": "locate and classify the axis equilibria of the time-one map",
    "orbit": "iterate the time-one map or the S^3 map from a seeded start",
    "separatrix": "trace the saddle's unstable branches and sample its stable wall",
    "pixton": "build the S^3 map on the Fox-Artin arc: census, separatrices, basins",
    "surgery": "build a glued S^4 map: census, gluing residuals, heteroclinic witnesses",
    "export": "write the arc, the disk, the tube mesh and the quotient knot for plotting",
}


def _bool_flag(p, name, help_):
    p.add_argument(f"--{name}", dest=_norm_key(name), action="store_const", const=True, default=None,
                   help=help_)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foxartin",
        description="Build and certify the wild-arc dynamical systems.",
        epilog="exit codes: 0 pass, 2 certification failure, 3 I/O error, 4 bad configuration",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMAND_HELP[name], description=COMMAND_HELP[name])
        p.add_argument("--config", help="JSON file with a section per command")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="sampling seed (unsigned 64-bit)")
        p.add_argument("--dt", type=float, help="RK4 step")
        keys = DEFAULTS[name]
        if "dim" in keys:
            p.add_argument("--dim", type=int, help="ambient dimension (3 or 4)")
        if "levels" in keys:
            p.add_argument("--levels", type=int, help="copies h^k, |k| <= levels, of the period")
        if "samples_per_arc" in keys:
            p.add_argument("--samples-per-arc", type=int, dest="samples_per_arc")
        if name == "build-arc":
            p.add_argument("--negative-control", dest="negative_control",
                           choices=sorted(NEGATIVE_CONTROLS))
        if name == "verify-arc":
            p.add_argument("--densities", type=int, nargs="+")
        if name == "flow-field":
            p.add_argument("--grid", type=int)
        if name == "orbit":
            p.add_argument("--map", choices=["flow", "pixton"])
            p.add_argument("--steps", type=int)
            p.add_argument("--start", type=float, nargs="+")
        if name == "separatrix":
            p.add_argument("--steps", type=int)
            p.add_argument("--seed-dist", type=float, dest="seed_dist")
        if name == "pixton":
            p.add_argument("--basin-samples", type=int, dest="basin_samples")
            p.add_argument("--max-iters", type=int, dest="max_iters")
            _bool_flag(p, "orbit", "also write an orbit from a seeded random start")
            p.add_argument("--orbit-steps", type=int, dest="orbit_steps")
            _bool_flag(p, "export-tube", "also write the tube mesh as OBJ")
        if name == "surgery":
            p.add_argument("--variant", choices=["arc", "cylinder"])
            p.add_argument("--witnesses", type=int)
            p.add_argument("--controls", type=int)
            p.add_argument("--tol", type=float)
            p.add_argument("--n-fwd", type=int, dest="n_fwd")
            p.add_argument("--n-bwd", type=int, dest="n_bwd")
            p.add_argument("--residual-samples", type=int, dest="residual_samples")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        ok = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConstructionFailed, GluingFailed) as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
