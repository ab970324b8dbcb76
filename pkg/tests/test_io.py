from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from foxartin import __version__
from foxartin.io import (
    format_float,
    read_csv,
    read_obj,
    to_jsonable,
    write_csv,
    write_json,
    write_obj,
)


@given(st.floats(allow_nan=False))
def test_float_text_round_trips(x):
    assert float(format_float(x)) == x


def test_special_floats():
    assert format_float(float("nan")) == "nan"
    assert format_float(float("-inf")) == "-inf"


def test_csv_round_trip(tmp_path):
    rows = [[0.1, 1, "a"], [1 / 3, 2, "b"]]
    path = write_csv(tmp_path / "t.csv", ["x", "n", "s"], rows, {"config": {"seed": 0}})
    header, body, meta = read_csv(path)
    assert header == ["x", "n", "s"]
    assert float(body[1][0]) == 1 / 3
    assert meta == {"config": {"seed": 0}, "version": __version__}


def test_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "t.csv", ["x"], [[1, 2]])
    assert not list(tmp_path.iterdir())


def test_obj_round_trip_uses_one_based_faces(tmp_path):
    v = np.array([[0.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]])
    path = write_obj(tmp_path / "t.obj", v, np.array([[0, 1, 2]]), lines=[[0, 1]])
    text = path.read_text()
    assert "f 1 2 3" in text and "l 1 2" in text
    verts, faces = read_obj(path)
    assert np.array_equal(verts, v) and faces.tolist() == [[0, 1, 2]]
    with pytest.raises(ValueError):
        write_obj(tmp_path / "bad.obj", v, np.array([[0, 1, 3]]))


def test_json_is_sorted_and_carries_version(tmp_path):
    path = write_json(tmp_path / "t.json", {"b": np.float64(1.5), "a": np.arange(2)},
                      {"config": {"z": 1}})
    doc = json.loads(path.read_text())
    assert doc == {"a": [0, 1], "b": 1.5, "config": {"z": 1}, "version": __version__}
    assert path.read_text().index('"a"') < path.read_text().index('"b"')


def test_to_jsonable_handles_numpy_and_enums():
    from foxartin.geometry import Chart

    out = to_jsonable({"c": Chart.SOUTH, "t": (np.int64(3), np.bool_(True)), "x": float("inf")})
    assert out == {"c": "SOUTH", "t": [3, True], "x": "inf"}
