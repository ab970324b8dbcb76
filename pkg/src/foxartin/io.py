"""Deterministic file output: CSV with 17 significant digits, OBJ meshes with
1-based faces, sorted JSON.  Every file carries the run config and the package
version, and is written atomically (temp file in the same directory, then
rename).
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "package_version",
    "format_float",
    "to_jsonable",
    "atomic_write_text",
    "write_csv",
    "read_csv",
    "write_obj",
    "read_obj",
    "write_json",
]


def package_version() -> str:
    from . import __version__

    return __version__


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def to_jsonable(obj):
    """Plain-Python copy of ``obj`` (numpy scalars and arrays, enums, tuples)."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enum
        return obj.name
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _meta_lines(meta: dict | None) -> list[str]:
    meta = dict(meta or {})
    meta.setdefault("version", package_version())
    return [f"# {k}: {json.dumps(to_jsonable(meta[k]), sort_keys=True)}" for k in sorted(meta)]


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], meta: dict | None = None) -> Path:
    """Comment lines ``# key: json`` (config, version), then the header, then rows."""
    lines = _meta_lines(meta)
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row length does not match the header")
        lines.append(",".join(_cell(v) for v in row))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]], dict]:
    meta, header, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            meta[key] = json.loads(val)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return header or [], rows, meta


def write_obj(path, vertices: np.ndarray, faces: np.ndarray | None = None,
              lines: Sequence[Sequence[int]] | None = None, meta: dict | None = None) -> Path:
    """Wavefront OBJ; ``faces`` and ``lines`` use 0-based indices and are written 1-based."""
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise ValueError("OBJ export needs (m, 3) vertices")
    out = _meta_lines(meta)
    out += ["v " + " ".join(format_float(c) for c in v) for v in vertices]
    if faces is not None:
        faces = np.asarray(faces, dtype=int)
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise ValueError("face index out of range")
        out += ["f " + " ".join(str(int(i) + 1) for i in f) for f in faces]
    for poly in lines or []:
        out.append("l " + " ".join(str(int(i) + 1) for i in poly))
    return atomic_write_text(path, "\n".join(out) + "\n")


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(c) for c in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(i.split("/")[0]) - 1 for i in parts[1:]])
    return np.array(verts), np.array(faces, dtype=int)


def write_json(path, payload: dict, meta: dict | None = None) -> Path:
    doc = dict(to_jsonable(payload))
    meta = dict(meta or {})
    meta.setdefault("version", package_version())
    for k, v in meta.items():
        doc[k] = to_jsonable(v)
    return atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n")
