# src/polyrigid/fixtures.py
"""
Deterministic polyhedra for tests and the CLI.

Canonical solids are scaled to unit edge. Random instances come from
``numpy.random.default_rng(seed)`` and are resampled, never patched, when
they fail their checks.
"""
from __future__ import annotations

import logging
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import permutations, product
from pathlib import Path
from typing import Any

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .config import DEFAULT_REJECTION_BUDGET, DEFAULT_SEED, HULL_MERGE_TOL
from .errors import FixtureError
from .geometry3 import GeometryKind, Realization, newell_normal
from .graphcore import PolyhedralGraph, validate
from .sphpolygon import SphericalPolygonRealization

logger = logging.getLogger(__name__)

GOLDEN = (1 + np.sqrt(5)) / 2

CANONICAL_NAMES = ("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron")
_FAMILY = re.compile(r"^(prism|antiprism)[\s_(-]*(\d+)\)?$")


# ----------------------------------------------------------------------
# Graph extraction
# ----------------------------------------------------------------------

def graph_from_faces(faces: Sequence[Sequence[int]]) -> PolyhedralGraph:
    """
    Rotation system from face cycles listed counterclockwise from outside:
    a face (..., a, w, b, ...) makes a follow b in the rotation at w.
    """
    succ: dict[int, dict[int, int]] = {}
    for face in faces:
        k = len(face)
        for i, w in enumerate(face):
            a, b = face[i - 1], face[(i + 1) % k]
            succ.setdefault(w, {})[b] = a
    rotation = {}
    for w, nxt in succ.items():
        start = min(nxt)
        order = [start]
        while (u := nxt[order[-1]]) != start:
            if u in order or len(order) > len(nxt):
                raise FixtureError(f"faces around vertex {w} do not close up", vertex=w)
            order.append(u)
        if len(order) != len(nxt):
            raise FixtureError(f"faces around vertex {w} form more than one cycle", vertex=w)
        rotation[w] = tuple(order)
    return PolyhedralGraph(rotation)


def oriented_faces(points: np.ndarray, faces: Sequence[Sequence[int]], center: np.ndarray | None = None) -> list[tuple[int, ...]]:
    """Flip each face so its Newell normal points away from ``center`` (default: the centroid)."""
    center = points.mean(axis=0) if center is None else center
    out = []
    for face in faces:
        pts = points[list(face)]
        normal = newell_normal(pts)
        if np.dot(normal, pts.mean(axis=0) - center) < 0:
            face = face[::-1]
        out.append(tuple(int(v) for v in face))
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def hull_faces(points: np.ndarray, tol: float = HULL_MERGE_TOL) -> list[tuple[int, ...]]:
    """
    Faces of the convex hull, counterclockwise from outside, with coplanar
    neighboring facets merged into one polygon.
    """
    try:
        hull = ConvexHull(points)
    except QhullError as e:
        raise FixtureError(f"convex hull failed: {e}") from e
    eq = hull.equations
    groups = _UnionFind(len(hull.simplices))
    for i, nbrs in enumerate(hull.neighbors):
        for j in nbrs:
            if np.linalg.norm(eq[i] - eq[j]) < tol:
                groups.union(i, j)

    darts: dict[int, dict[int, int]] = {}
    for i, (a, b, c) in enumerate(hull.simplices):
        if np.dot(np.cross(points[b] - points[a], points[c] - points[a]), eq[i][:3]) < 0:
            b, c = c, b
        root = groups.find(i)
        cycle = darts.setdefault(root, {})
        for x, y in ((a, b), (b, c), (c, a)):
            if cycle.get(y) == x:
                del cycle[y]
            else:
                cycle[x] = y

    faces = []
    for cycle in darts.values():
        start = min(cycle)
        face = [start]
        while (nxt := cycle[face[-1]]) != start:
            face.append(nxt)
        if len(face) != len(cycle):
            raise FixtureError("merged hull facet has a hole")
        faces.append(tuple(int(v) for v in face))
    return faces


def graph_from_hull(points: np.ndarray, tol: float = HULL_MERGE_TOL) -> tuple[PolyhedralGraph, Realization]:
    """Graph and Euclidean realization of the convex hull of ``points`` (every point must be a vertex)."""
    points = np.asarray(points, dtype=float)
    faces = hull_faces(points, tol)
    used = sorted({v for f in faces for v in f})
    if len(used) != len(points):
        raise FixtureError(f"{len(points) - len(used)} point(s) are not hull vertices")
    graph = graph_from_faces(faces)
    return graph, Realization.from_array(GeometryKind.EUCLIDEAN, points)


# ----------------------------------------------------------------------
# Canonical solids
# ----------------------------------------------------------------------

def _cyclic(triples) -> list[tuple[float, float, float]]:
    out = []
    for x, y, z in triples:
        out.extend([(x, y, z), (z, x, y), (y, z, x)])
    return out


def _solid_points(name: str) -> np.ndarray:
    if name == "tetrahedron":
        pts = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float)
    elif name == "cube":
        pts = np.array(list(product((-0.5, 0.5), repeat=3)))
    elif name == "octahedron":
        pts = np.array([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], dtype=float)
    elif name == "icosahedron":
        pts = np.array(_cyclic((0, s1, s2 * GOLDEN) for s1 in (-1, 1) for s2 in (-1, 1)))
    elif name == "dodecahedron":
        corners = list(product((-1, 1), repeat=3))
        ring = _cyclic((0, s1 / GOLDEN, s2 * GOLDEN) for s1 in (-1, 1) for s2 in (-1, 1))
        pts = np.array(corners + ring, dtype=float)
    elif m := _FAMILY.match(name):
        kind, n = m.group(1), int(m.group(2))
        if n < 3:
            raise FixtureError(f"{kind} needs n >= 3, got {n}")
        radius = 1.0 / (2.0 * np.sin(np.pi / n))
        angle = 2 * np.pi * np.arange(n) / n
        if kind == "prism":
            top_angle, height = angle, 1.0
        else:
            top_angle = angle + np.pi / n
            height = np.sqrt(1.0 - (2.0 * radius * np.sin(np.pi / (2 * n))) ** 2)
        bottom = np.column_stack([radius * np.cos(angle), radius * np.sin(angle), np.full(n, -height / 2)])
        top = np.column_stack([radius * np.cos(top_angle), radius * np.sin(top_angle), np.full(n, height / 2)])
        return np.vstack([bottom, top])
    else:
        raise FixtureError(f"unknown solid {name!r}", name=name)
    edge = min(np.linalg.norm(p - q) for i, p in enumerate(pts) for q in pts[i + 1:])
    return pts / edge


def canonical(name: str) -> tuple[PolyhedralGraph, Realization]:
    """Unit-edge solid: tetrahedron, cube, octahedron, dodecahedron, icosahedron, prism(n), antiprism(n)."""
    key = name.strip().lower()
    return graph_from_hull(_solid_points(key))


# ----------------------------------------------------------------------
# Random instances
# ----------------------------------------------------------------------

def _sphere_points(rng: np.random.Generator, n: int, budget: int) -> np.ndarray:
    """Dart throwing on the unit sphere with a minimum angular separation."""
    sep = 0.35 * np.sqrt(4 * np.pi / n)
    pts: list[np.ndarray] = []
    for _ in range(budget * n):
        p = rng.normal(size=3)
        p /= np.linalg.norm(p)
        if all(np.dot(p, q) < np.cos(sep) for q in pts):
            pts.append(p)
            if len(pts) == n:
                return np.array(pts)
    raise FixtureError(f"could not place {n} separated points")


def random_convex(
    seed: int = DEFAULT_SEED,
    n: int = 8,
    dual: bool = False,
    budget: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[PolyhedralGraph, Realization]:
    """
    Convex hull of n separated points on the unit sphere. With ``dual=True``
    the polyhedron is cut out by the tangent planes at those points instead:
    3-valent vertices, mostly non-triangular faces.
    """
    from .reconstruct import check_conditions

    if n < 4:
        raise FixtureError(f"random_convex needs n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    for attempt in range(budget):
        pts = _sphere_points(rng, n, budget)
        try:
            if dual:
                hull = ConvexHull(pts)
                normals, offsets = hull.equations[:, :3], hull.equations[:, 3]
                if np.any(offsets > -0.05):
                    raise FixtureError("origin too close to the hull boundary")
                graph, real = graph_from_hull(normals / -offsets[:, None])
                if len(graph.faces) != n:
                    raise FixtureError("tangent planes merged")
            else:
                graph, real = graph_from_hull(pts)
                if any(len(f) != 3 for f in graph.faces):
                    raise FixtureError("four coplanar points")
        except FixtureError as e:
            logger.debug("random_convex seed=%d attempt %d rejected: %s", seed, attempt, e)
            continue
        if not validate(graph).valid:
            continue
        report = check_conditions(real, graph)
        if report.theorem_main_applies and not report.flat_edges:
            return graph, real
        logger.debug("random_convex seed=%d attempt %d fails the rigidity conditions", seed, attempt)
    raise FixtureError(f"random_convex(seed={seed}, n={n}) exhausted {budget} attempts")


def dented(
    seed: int = DEFAULT_SEED,
    base: str = "icosahedron",
    factor: float = 0.2,
    budget: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[PolyhedralGraph, Realization]:
    """
    Push one vertex of an all-triangle solid through the plane of its
    neighbors, ``factor`` times the circumradius past that plane, with a
    small random sideways offset. The result has reflex edges at the pushed
    vertex and still satisfies the rigidity conditions.
    """
    from .reconstruct import check_conditions

    if not 0 < factor < 0.5:
        raise FixtureError(f"dent factor must be in (0, 0.5), got {factor}")
    graph, real = canonical(base)
    if any(len(f) != 3 for f in graph.faces):
        raise FixtureError(f"{base} has non-triangular faces")
    rng = np.random.default_rng(seed)
    pts = real.array()
    center = pts.mean(axis=0)
    radius = float(np.max(np.linalg.norm(pts - center, axis=1)))
    for attempt in range(budget):
        v = int(rng.integers(len(pts)))
        ring = pts[list(graph.neighbors(v))]
        ring_center = ring.mean(axis=0)
        outward = pts[v] - center
        outward /= np.linalg.norm(outward)
        side = rng.normal(size=3)
        side -= np.dot(side, outward) * outward
        moved = pts.copy()
        moved[v] = ring_center - factor * radius * outward + 0.05 * factor * radius * side
        candidate = Realization.from_array(GeometryKind.EUCLIDEAN, moved)
        report = check_conditions(candidate, graph)
        if report.theorem_main_applies and not report.flat_edges and report.reflex_edges:
            logger.debug("dented %s at vertex %d after %d attempt(s)", base, v, attempt + 1)
            return graph, candidate
    raise FixtureError(f"dented({base}, {factor}) exhausted {budget} attempts")


# ----------------------------------------------------------------------
# Counterexample families
# ----------------------------------------------------------------------

TWIST_RADIUS = 0.5
TWIST_ANGLE = 0.35
TWIST_APEX = 0.35

# face order: +x, -x, +y, -y, +z, -z
_FACE_AXES = [(k, s) for k in range(3) for s in (1, -1)]


def _cube_symmetries() -> list[np.ndarray]:
    mats = []
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            m = np.zeros((3, 3))
            for i, (j, s) in enumerate(zip(perm, signs)):
                m[i, j] = s
            mats.append(m)
    return mats


def _twist_equivalent(a: Sequence[bool], b: Sequence[bool]) -> bool:
    index = {ax: i for i, ax in enumerate(_FACE_AXES)}
    for m in _cube_symmetries():
        det = round(np.linalg.det(m))
        ok = True
        for f, (k, s) in enumerate(_FACE_AXES):
            image = m @ (s * np.eye(3)[k])
            k2 = int(np.argmax(np.abs(image)))
            g = index[(k2, int(np.sign(image[k2])))]
            if (a[f] if det > 0 else not a[f]) != b[g]:
                ok = False
                break
        if ok:
            return True
    return False


def _twisted_cube(choices: Sequence[bool]) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    corners = np.array(list(product((-1.0, 1.0), repeat=3)))
    corner_id = {tuple(c): i for i, c in enumerate(corners)}
    points = [*corners]
    faces: list[tuple[int, ...]] = []
    for f, (k, s) in enumerate(_FACE_AXES):
        normal = s * np.eye(3)[k]
        u = np.eye(3)[(k + 1) % 3]
        w = np.cross(normal, u)
        twist = TWIST_ANGLE if choices[f] else -TWIST_ANGLE
        outer, inner = [], []
        for i in range(4):
            theta = np.pi / 4 + i * np.pi / 2
            c = normal + np.sqrt(2) * (np.cos(theta) * u + np.sin(theta) * w)
            outer.append(corner_id[tuple(np.round(c))])
            s_pt = normal + TWIST_RADIUS * np.sqrt(2) * (np.cos(theta + twist) * u + np.sin(theta + twist) * w)
            inner.append(len(points))
            points.append(s_pt)
        apex = len(points)
        points.append(normal * (1.0 + TWIST_APEX))
        for i in range(4):
            j = (i + 1) % 4
            faces.append((outer[i], outer[j], inner[j], inner[i]))
            faces.append((inner[i], inner[j], apex))
    pts = np.array(points)
    return pts, oriented_faces(pts, faces, center=np.zeros(3))


def twisted_cube_pair(
    left: Sequence[bool] = (True,) * 6,
    right: Sequence[bool] = (False,) + (True,) * 5,
) -> tuple[PolyhedralGraph, Realization, Realization]:
    """
    Two cubes with a twisted square and a pyramid drawn on every face. The
    twist direction per face does not change a single edge length or
    dihedral angle, yet distinct choices give non-congruent solids.
    """
    left, right = tuple(bool(x) for x in left), tuple(bool(x) for x in right)
    if len(left) != 6 or len(right) != 6:
        raise FixtureError("twist choices need one boolean per cube face")
    if left != right and _twist_equivalent(left, right):
        raise FixtureError(f"twist choices {left} and {right} are related by a cube symmetry")
    pts_a, faces = _twisted_cube(left)
    pts_b, faces_b = _twisted_cube(right)
    graph = graph_from_faces(faces)
    if dict(graph_from_faces(faces_b).rotation) != dict(graph.rotation):
        raise FixtureError("twist choices changed the combinatorics")
    return (
        graph,
        Realization.from_array(GeometryKind.EUCLIDEAN, pts_a),
        Realization.from_array(GeometryKind.EUCLIDEAN, pts_b),
    )


def quad_counterexample(theta: float = 0.1, phi: float = 0.1) -> tuple[SphericalPolygonRealization, SphericalPolygonRealization]:
    """
    Two spherical quadrilaterals sharing |AB| and all four interior angles.
    The second one needs an edge longer than pi.
    """
    if not (0 < theta <= 0.2 and 0 < phi <= 0.2):
        raise FixtureError(f"theta and phi must lie in (0, 0.2], got {theta}, {phi}")
    a = np.array([0.0, 0.0, 1.0])
    c = np.array([-1.0, 0.0, 0.0])
    b = np.array([np.cos(theta), -np.sin(theta), 0.0])
    d = np.array([np.cos(phi) * np.cos(theta), np.cos(phi) * np.sin(theta), -np.sin(phi)])
    b2 = np.array([np.cos(3 * theta), -np.sin(3 * theta), 0.0])
    d2 = np.array([np.cos(phi) * np.cos(theta), -np.cos(phi) * np.sin(theta), np.sin(phi)])
    first = SphericalPolygonRealization.from_points([a, b, c, d])
    second = SphericalPolygonRealization.from_points([a, b2, c, d2], long_arcs=[False, False, True, False])
    return first, second


# ----------------------------------------------------------------------
# Recipes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FixtureRecipe:
    """A named generator plus its seed and parameters."""

    name: str
    seed: int = DEFAULT_SEED
    params: Mapping[str, Any] = field(default_factory=dict)

    def build(self) -> tuple[PolyhedralGraph, Realization]:
        p = dict(self.params)
        if self.name == "random_convex":
            return random_convex(self.seed, int(p.get("n", 8)), bool(p.get("dual", False)))
        if self.name == "dented":
            return dented(self.seed, p.get("base", "icosahedron"), float(p.get("factor", 0.2)))
        if self.name == "twisted_cube":
            graph, first, second = twisted_cube_pair(p.get("left", (True,) * 6), p.get("right", (False,) + (True,) * 5))
            return graph, (second if p.get("which", 0) else first)
        return canonical(self.name)


def export_bundle(recipe: FixtureRecipe, out_dir: Path) -> tuple[Path, Path]:
    """Write ``<stem>.bundle.json`` (graph + measurements) and ``<stem>.realization.json``."""
    from .reconstruct import measure
    from .serialize import bundle_to_json, realization_to_json, write_json

    graph, real = recipe.build()
    stem = re.sub(r"[^A-Za-z0-9_.-]+", "_", f"{recipe.name}-{recipe.seed}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle_path = out_dir / f"{stem}.bundle.json"
    real_path = out_dir / f"{stem}.realization.json"
    write_json(bundle_path, bundle_to_json(graph, measure(real, graph)))
    write_json(real_path, realization_to_json(real, graph))
    return bundle_path, real_path
