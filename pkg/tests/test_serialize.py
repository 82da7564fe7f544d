# tests/test_serialize.py
from __future__ import annotations

import json

import numpy as np
import pytest

from polyrigid.errors import StructuralError
from polyrigid.geometry3 import GeometryKind, Realization
from polyrigid.reconstruct import measure
from polyrigid.serialize import (
    bundle_from_json,
    bundle_to_json,
    edge_from_str,
    edge_to_str,
    graph_from_json,
    graph_to_json,
    obj_text,
    polygon_realization_to_json,
    polygon_spec_from_json,
    polygon_spec_to_json,
    read_json,
    realization_from_json,
    realization_to_json,
    write_json,
    write_obj,
)
from polyrigid.sphpolygon import SphericalPolygonRealization

from conftest import lift


def test_edge_keys():
    assert edge_to_str((5, 2)) == "2-5"
    assert edge_from_str("7-3") == (3, 7)


@pytest.mark.parametrize("key", ["3", "a-b", "1-2-3", "4-4", ""])
def test_bad_edge_keys(key):
    with pytest.raises(StructuralError):
        edge_from_str(key)


def test_graph_round_trip(icosahedron):
    graph = icosahedron[0]
    data = json.loads(json.dumps(graph_to_json(graph)))
    assert "ids" not in data
    assert dict(graph_from_json(data).rotation) == dict(graph.rotation)


def test_graph_with_sparse_ids():
    data = {"vertices": 4, "ids": [10, 11, 12, 13],
            "rotation": [[11, 12, 13], [10, 13, 12], [10, 11, 13], [10, 12, 11]]}
    graph = graph_from_json(data)
    assert graph.vertices == (10, 11, 12, 13)
    assert graph_to_json(graph)["ids"] == [10, 11, 12, 13]


@pytest.mark.parametrize(
    "data",
    [
        {"rotation": [[1], [0]]},
        {"vertices": "4", "rotation": []},
        {"vertices": 3, "rotation": [[1, 2], [0, 2]]},
        {"vertices": 2, "rotation": [[1], ["0"]]},
        [1, 2, 3],
    ],
)
def test_malformed_graphs(data):
    with pytest.raises(StructuralError):
        graph_from_json(data)


def test_realization_round_trip(cube):
    graph, real = cube
    back, embedded = realization_from_json(realization_to_json(real, graph))
    np.testing.assert_allclose(back.array(), real.array(), atol=1e-15)
    assert dict(embedded.rotation) == dict(graph.rotation)
    assert realization_from_json(realization_to_json(real))[1] is None


def test_hyperbolic_realization_round_trip(octahedron):
    lifted = lift(octahedron[1], GeometryKind.HYPERBOLIC)
    data = realization_to_json(lifted)
    assert data["geometry"] == "hyperbolic"
    back, _ = realization_from_json(data)
    assert back.geometry is GeometryKind.HYPERBOLIC
    np.testing.assert_allclose(back.array(), lifted.array(), atol=1e-14)


def test_realization_errors():
    with pytest.raises(StructuralError):
        realization_from_json({"geometry": "elliptic", "coords": [[0, 0, 0]]})
    with pytest.raises(StructuralError):
        realization_from_json({"geometry": "spherical", "coords": [[1, 0, 0]]})
    with pytest.raises(StructuralError):
        realization_from_json({"geometry": "euclidean"})


def test_sparse_realization_is_refused():
    real = Realization(GeometryKind.EUCLIDEAN, {0: np.zeros(3), 2: np.ones(3)})
    with pytest.raises(StructuralError):
        realization_to_json(real)


def test_bundle_round_trip(tmp_path, dodecahedron):
    graph, real = dodecahedron
    m = measure(real, graph)
    path = tmp_path / "dodecahedron.bundle.json"
    write_json(path, bundle_to_json(graph, m))
    back_graph, back = bundle_from_json(read_json(path))
    assert dict(back_graph.rotation) == dict(graph.rotation)
    assert back.geometry is GeometryKind.EUCLIDEAN
    assert back.max_deviation(m) == 0.0


def test_bundle_with_non_numeric_value(cube):
    graph, real = cube
    data = bundle_to_json(graph, measure(real, graph))
    data["angles"]["0-1"] = "right"
    with pytest.raises(StructuralError):
        bundle_from_json(data)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"graph\": ")
    with pytest.raises(StructuralError) as info:
        read_json(path)
    assert info.value.path == str(path)


# -- polygons -------------------------------------------------------------------

def test_polygon_spec_round_trip():
    data = {"angles": [90, 90, 90], "lengths": [90, None, 90]}
    spec = polygon_spec_from_json(data, degrees=True)
    np.testing.assert_allclose(spec.angles, np.pi / 2)
    assert spec.lengths[1] is None
    again = polygon_spec_to_json(spec)
    assert again["convention"] == "interior-left"
    assert polygon_spec_from_json(again) == spec


def test_polygon_spec_other_convention_is_refused():
    with pytest.raises(StructuralError):
        polygon_spec_from_json({"angles": [1, 1, 1], "lengths": [1, 1, 1], "convention": "interior-right"})


def test_polygon_realization_json():
    real = SphericalPolygonRealization.from_points(np.eye(3)[[2, 0, 1]])
    data = polygon_realization_to_json(real)
    assert set(data) == {"points", "lengths", "angles", "long_arcs"}
    np.testing.assert_allclose(data["lengths"], np.pi / 2)
    assert data["long_arcs"] == [False, False, False]


# -- OBJ ---------------------------------------------------------------------------

def test_cube_obj(tmp_path, cube):
    graph, real = cube
    text = obj_text(real, graph)
    lines = text.splitlines()
    assert lines[0] == "# polyrigid export"
    assert lines[1] == "# 8 vertices, 6 faces"
    assert sum(line.startswith("v ") for line in lines) == 8
    assert sum(line.startswith("f ") for line in lines) == 12
    assert sum(line.startswith("# face ") for line in lines) == 6
    assert all(line.endswith("-> 2 triangle(s)") for line in lines if line.startswith("# face "))

    path = tmp_path / "cube.obj"
    write_obj(path, real, graph)
    assert path.read_text() == text


def test_obj_needs_euclidean_coordinates(cube):
    graph, real = cube
    with pytest.raises(StructuralError):
        obj_text(lift(real, GeometryKind.SPHERICAL), graph)
