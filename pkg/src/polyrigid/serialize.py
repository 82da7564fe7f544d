# src/polyrigid/serialize.py
"""
JSON and OBJ formats.

Graph:        {"vertices": n, "rotation": [[...], ...]}   (0-based ids; "ids" when sparse)
Realization:  {"geometry": "euclidean", "coords": [[x, y, z], ...], "graph": {...}?}
Bundle:       {"graph": {...}, "geometry": "...", "lengths": {"i-j": x}, "angles": {"i-j": y}}
Polygon spec: {"angles": [...], "lengths": [... or null], "convention": "interior-left"}
"""
from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np

from .errors import StructuralError
from .geometry3 import GeometryKind, Realization
from .graphcore import Edge, PolyhedralGraph, ReductionStep, edge_key

POLYGON_CONVENTION = "interior-left"


def read_json(path: Path | str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise StructuralError(f"{path}: invalid JSON ({e})", path=str(path)) from e


def write_json(path: Path | str, data: Any) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def _require(data: Any, key: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(data, Mapping) or key not in data:
        raise StructuralError(f"missing key {key!r}", key=key)
    value = data[key]
    if not isinstance(value, kind):
        raise StructuralError(f"key {key!r} has the wrong type ({type(value).__name__})", key=key)
    return value


# ----------------------------------------------------------------------
# Edge keys
# ----------------------------------------------------------------------

def edge_to_str(e: Edge) -> str:
    a, b = edge_key(*e)
    return f"{a}-{b}"


def edge_from_str(s: str) -> Edge:
    try:
        a, b = (int(x) for x in s.split("-"))
    except ValueError:
        raise StructuralError(f"bad edge key {s!r}, expected 'i-j'", key=s) from None
    if a == b:
        raise StructuralError(f"edge key {s!r} is a loop", key=s)
    return edge_key(a, b)


def _edge_map_to_json(values: Mapping[Edge, float]) -> dict[str, float]:
    return {edge_to_str(e): float(x) for e, x in sorted(values.items())}


def _edge_map_from_json(data: Any, key: str) -> dict[Edge, float]:
    raw = _require(data, key, dict)
    out = {}
    for k, x in raw.items():
        if not isinstance(x, (int, float)):
            raise StructuralError(f"{key}[{k!r}] is not a number", key=f"{key}.{k}")
        out[edge_from_str(k)] = float(x)
    return out


# ----------------------------------------------------------------------
# Graphs and realizations
# ----------------------------------------------------------------------

def graph_to_json(graph: PolyhedralGraph) -> dict[str, Any]:
    ids = list(graph.vertices)
    out: dict[str, Any] = {"vertices": len(ids), "rotation": [list(graph.neighbors(v)) for v in ids]}
    if ids != list(range(len(ids))):
        out["ids"] = ids
    return out


def graph_from_json(data: Any) -> PolyhedralGraph:
    n = _require(data, "vertices", int)
    rotation = _require(data, "rotation", list)
    ids = data.get("ids", list(range(n)))
    if len(rotation) != n or len(ids) != n:
        raise StructuralError(f"'vertices' is {n} but {len(rotation)} rotation lists given", key="rotation")
    for i, nbrs in enumerate(rotation):
        if not isinstance(nbrs, list) or not all(isinstance(u, int) for u in nbrs):
            raise StructuralError(f"rotation[{i}] is not a list of vertex ids", key=f"rotation.{i}")
    return PolyhedralGraph({int(v): tuple(nbrs) for v, nbrs in zip(ids, rotation)})


def realization_to_json(real: Realization, graph: PolyhedralGraph | None = None) -> dict[str, Any]:
    ids = real.vertices
    if ids != list(range(len(ids))):
        raise StructuralError("realization JSON needs contiguous 0-based vertex ids")
    out: dict[str, Any] = {"geometry": real.geometry.value, "coords": real.array().tolist()}
    if graph is not None:
        out["graph"] = graph_to_json(graph)
    return out


def _geometry(data: Any) -> GeometryKind:
    name = _require(data, "geometry", str)
    try:
        return GeometryKind(name.lower())
    except ValueError:
        raise StructuralError(f"unknown geometry {name!r}", key="geometry") from None


def realization_from_json(data: Any) -> tuple[Realization, PolyhedralGraph | None]:
    g = _geometry(data)
    coords = _require(data, "coords", list)
    arr = np.asarray(coords, dtype=float) if coords else np.zeros((0, g.dim))
    if arr.ndim != 2 or arr.shape[1] != g.dim:
        raise StructuralError(f"'coords' must be a list of {g.dim}-vectors", key="coords")
    graph = graph_from_json(data["graph"]) if "graph" in data else None
    return Realization.from_array(g, arr), graph


# ----------------------------------------------------------------------
# Bundles
# ----------------------------------------------------------------------

def measurements_to_json(measurements) -> dict[str, Any]:
    return {
        "geometry": measurements.geometry.value,
        "lengths": _edge_map_to_json(measurements.lengths),
        "angles": _edge_map_to_json(measurements.angles),
    }


def bundle_to_json(graph: PolyhedralGraph, measurements) -> dict[str, Any]:
    return {"graph": graph_to_json(graph), **measurements_to_json(measurements)}


def bundle_from_json(data: Any, degrees: bool = False):
    """Input bundle -> (graph, Measurements); ``degrees`` reads the dihedral angles in degrees."""
    from .reconstruct import Measurements

    graph = graph_from_json(_require(data, "graph", dict))
    angles = _edge_map_from_json(data, "angles")
    if degrees:
        angles = {e: float(np.radians(x)) for e, x in angles.items()}
    m = Measurements(_geometry(data), _edge_map_from_json(data, "lengths"), angles)
    return graph, m


# ----------------------------------------------------------------------
# Spherical polygons
# ----------------------------------------------------------------------

def polygon_spec_to_json(spec) -> dict[str, Any]:
    return {"angles": list(spec.angles), "lengths": list(spec.lengths), "convention": POLYGON_CONVENTION}


def polygon_spec_from_json(data: Any, degrees: bool = False):
    from .sphpolygon import SphericalPolygonSpec

    angles = _require(data, "angles", list)
    lengths = _require(data, "lengths", list)
    convention = data.get("convention", POLYGON_CONVENTION)
    if convention != POLYGON_CONVENTION:
        raise StructuralError(f"unsupported polygon convention {convention!r}", key="convention")
    scale = np.pi / 180 if degrees else 1.0
    try:
        return SphericalPolygonSpec(
            tuple(float(x) * scale for x in angles),
            tuple(None if x is None else float(x) * scale for x in lengths),
        )
    except (TypeError, ValueError) as e:
        raise StructuralError(f"bad polygon spec: {e}", key="angles") from e


def polygon_realization_to_json(real) -> dict[str, Any]:
    out: dict[str, Any] = {
        "points": real.points.tolist(),
        "lengths": [float(x) for x in real.lengths],
        "angles": [float(x) for x in real.angles],
        "long_arcs": [bool(x) for x in real.long_arcs],
    }
    if real.case is not None:
        out["case"] = real.case.value
    if real.auxiliary is not None:
        out["auxiliary"] = np.asarray(real.auxiliary).tolist()
    return out


# ----------------------------------------------------------------------
# Reduction steps
# ----------------------------------------------------------------------

def step_to_json(step: ReductionStep) -> dict[str, Any]:
    return {
        "removed": step.removed,
        "boundary": list(step.boundary),
        "local_diagonals": [list(e) for e in step.local_diagonals],
        "boundary_diagonals": [list(e) for e in step.boundary_diagonals],
        "new_faces": [list(t) for t in step.new_faces()],
        "remaining": len(step.reduced.vertices),
    }


def solved_step_to_json(solved) -> dict[str, Any]:
    out: dict[str, Any] = {
        "vertex": solved.vertex,
        "figure_spec": polygon_spec_to_json(solved.spec),
        "figure": polygon_realization_to_json(solved.figure),
        "placement": {str(v): np.asarray(p).tolist() for v, p in solved.placement.items()},
    }
    if solved.step is not None:
        out["step"] = step_to_json(solved.step)
    if solved.flat_edges:
        out["flat_edges"] = [edge_to_str(e) for e in solved.flat_edges]
    return out


# ----------------------------------------------------------------------
# OBJ
# ----------------------------------------------------------------------

def obj_text(real: Realization, graph: PolyhedralGraph) -> str:
    """Wavefront OBJ with faces fan-triangulated; comments map faces to triangles."""
    if real.geometry is not GeometryKind.EUCLIDEAN:
        raise StructuralError("OBJ export is only defined for Euclidean realizations")
    ids = real.vertices
    index = {v: i + 1 for i, v in enumerate(ids)}
    lines = ["# polyrigid export", f"# {len(ids)} vertices, {len(graph.faces)} faces"]
    lines += [f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in real.array()]
    for face in graph.faces:
        cycle = face.vertices
        fan = [(cycle[0], cycle[i], cycle[i + 1]) for i in range(1, len(cycle) - 1)]
        lines.append(f"# face {face.face_id}: {' '.join(map(str, cycle))} -> {len(fan)} triangle(s)")
        lines += [f"f {index[a]} {index[b]} {index[c]}" for a, b, c in fan]
    return "\n".join(lines) + "\n"


def write_obj(path: Path | str, real: Realization, graph: PolyhedralGraph) -> None:
    Path(path).write_text(obj_text(real, graph))
