# src/polyrigid/reconstruct.py
"""
Reconstruction engine: edge lengths + dihedral angles -> vertex coordinates.

The graph is reduced one strongly-rigid vertex at a time. At each step the
vertex figure is solved on S^2, the star of the vertex is placed in a local
frame, and the measurements of the reduced polyhedron are derived from that
placement. The terminal polyhedron is placed from its last vertex figure and
the removed vertices are glued back in reverse order.

Strictly convex input can take the convex path instead: reduction at any
rigid vertex, convex n-gon figures, and at each step the boundary
triangulation that keeps the polyhedron convex.
"""
from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .config import BRANCH_TOL, CROSSCHECK_TOL, MEASURE_TOL, PLANARITY_TOL, SINGULAR_BAND
from .errors import (
    CollinearViolation,
    ConditionViolation,
    FaceNotPlanar,
    InternalContradiction,
    PartiallyFlatObstruction,
    StructuralError,
    Unrealizable,
)
from .geometry3 import (
    GeometryKind,
    Realization,
    align_candidates,
    basepoint,
    chart,
    check_planar,
    dihedral_at,
    distance,
    exp_map,
    facial_angles_from_sides,
    is_singular,
    newell_normal,
    normalize_pose,
    tangent_at_basepoint,
    tangent_frame,
)
from .graphcore import (
    Edge,
    PolyhedralGraph,
    ReductionStep,
    edge_key,
    find_rigid_vertex,
    local_triangulation,
    reduction_sequence,
    reductions_at,
    require_valid,
    terminal_vertex,
)
from .sphpolygon import (
    SphericalPolygonRealization,
    SphericalPolygonSpec,
    solve_convex_ngon,
    solve_flat_edge_cases,
    solve_ngon_one_unknown_length,
    solve_quadrilateral,
    solve_triangle_figure,
)
from .sphtrig import angle_gap, wrap

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Measurements
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Measurements:
    """Edge lengths and dihedral angles keyed by ``edge_key``."""

    geometry: GeometryKind
    lengths: Mapping[Edge, float]
    angles: Mapping[Edge, float]

    def __post_init__(self):
        g = GeometryKind(self.geometry)
        lengths = {edge_key(*e): float(x) for e, x in self.lengths.items()}
        angles = {edge_key(*e): float(x) for e, x in self.angles.items()}
        if set(lengths) != set(angles):
            raise StructuralError("lengths and angles cover different edges")
        for e, x in lengths.items():
            if not x > 0:
                raise StructuralError(f"edge {e} has non-positive length {x}", edge=e)
            if g is GeometryKind.SPHERICAL and x >= np.pi:
                raise StructuralError(f"spherical edge {e} has length {x} >= pi", edge=e)
        for e, x in angles.items():
            if not 0.0 <= x <= 2 * np.pi:
                raise StructuralError(f"edge {e} has dihedral angle {x} outside [0, 2pi]", edge=e)
        object.__setattr__(self, "geometry", g)
        object.__setattr__(self, "lengths", MappingProxyType(dict(sorted(lengths.items()))))
        object.__setattr__(self, "angles", MappingProxyType(dict(sorted(angles.items()))))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self.lengths)

    def length(self, a: int, b: int) -> float:
        return self.lengths[edge_key(a, b)]

    def angle(self, a: int, b: int) -> float:
        return self.angles[edge_key(a, b)]

    def singular_edges(self) -> list[Edge]:
        return [e for e, x in self.angles.items() if is_singular(x)]

    def require_graph(self, graph: PolyhedralGraph) -> None:
        if set(self.lengths) != set(graph.edge_set):
            missing = sorted(set(graph.edge_set) - set(self.lengths))
            extra = sorted(set(self.lengths) - set(graph.edge_set))
            raise StructuralError(
                f"measurements do not match the graph (missing {missing[:5]}, extra {extra[:5]})",
                missing=missing, extra=extra,
            )

    def max_deviation(self, other: Measurements) -> float:
        """Largest per-entry difference; angles compared on the circle."""
        if set(self.lengths) != set(other.lengths):
            return np.inf
        worst = 0.0
        for e in self.lengths:
            worst = max(worst, abs(self.lengths[e] - other.lengths[e]))
            worst = max(worst, angle_gap(self.angles[e], other.angles[e]))
        return worst


def measure(real: Realization, graph: PolyhedralGraph) -> Measurements:
    """Edge lengths and dihedral angles of ``real`` on the faces of ``graph``."""
    g = real.geometry
    for face in graph.faces:
        check_planar(g, [real.point(v) for v in face.vertices], face=face.vertices)
    lengths, angles = {}, {}
    for a, b in graph.edges:
        left = graph.face_left_of(a, b).vertices
        right = graph.face_left_of(b, a).vertices
        lengths[(a, b)] = real.distance(a, b)
        angles[(a, b)] = dihedral_at(
            g, real.point(a), real.point(b),
            [real.point(v) for v in left], [real.point(v) for v in right],
        )
    return Measurements(g, lengths, angles)


# ----------------------------------------------------------------------
# Vertex figures
# ----------------------------------------------------------------------

def _figure_order(local: PolyhedralGraph, v: int) -> list[int]:
    """Neighbors of v in figure order: figure vertex j is the direction to u_{-j}."""
    nbrs = local.neighbors(v)
    d = len(nbrs)
    return [nbrs[(-j) % d] for j in range(d)]


def _figure_spec(
    g: GeometryKind,
    local: PolyhedralGraph,
    v: int,
    dist: Mapping[Edge, float],
    angles: Mapping[Edge, float],
) -> tuple[list[int], SphericalPolygonSpec]:
    order = _figure_order(local, v)
    d = len(order)
    fig_angles = [angles[edge_key(v, u)] for u in order]
    fig_lengths: list[float | None] = []
    for j in range(d):
        a, b = order[j], order[(j + 1) % d]
        ab = dist.get(edge_key(a, b))
        if ab is None:
            fig_lengths.append(None)
        else:
            fig_lengths.append(facial_angles_from_sides(g, ab, dist[edge_key(v, b)], dist[edge_key(v, a)])[0])
    return order, SphericalPolygonSpec(tuple(fig_angles), tuple(fig_lengths))


def vertex_figure_spec(graph: PolyhedralGraph, measurements: Measurements, v: int) -> SphericalPolygonSpec:
    """
    Spec of the vertex figure at v after local triangulation: interior angles
    are the dihedral angles at v's edges, side lengths the facial angles at v
    (unknown where the side's triangle closes a diagonal of unknown length).
    """
    local, _ = local_triangulation(graph, v)
    _, spec = _figure_spec(measurements.geometry, local, v, measurements.lengths, measurements.angles)
    return spec


def solve_vertex_figure(
    spec: SphericalPolygonSpec,
    deg: int | None = None,
    flat_flags: Sequence[bool] | None = None,
    *,
    convex: bool = False,
) -> SphericalPolygonRealization:
    """
    Pick the polygon solver that fits the degree, the unknowns and the
    singular angles. With ``convex=True`` the figure must be strictly convex
    and anything beyond one unknown goes to the convex n-gon solver.
    """
    deg = spec.n if deg is None else deg
    flat = list(flat_flags) if flat_flags is not None else list(spec.singular)
    unknown = len(spec.unknown_indices)
    if convex:
        return solve_ngon_one_unknown_length(spec) if unknown <= 1 else solve_convex_ngon(spec)
    if any(flat):
        if deg <= 4 and unknown >= 2:
            return solve_flat_edge_cases(spec, flat)
        return solve_ngon_one_unknown_length(spec)
    if unknown <= 1:
        return solve_ngon_one_unknown_length(spec)
    if deg == 3:
        return solve_triangle_figure(spec)
    if deg == 4:
        return solve_quadrilateral(spec)
    return solve_convex_ngon(spec)


def place_neighborhood(
    g: GeometryKind,
    figure: SphericalPolygonRealization,
    spokes: Sequence[float],
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Center at the basepoint and one neighbor per figure vertex at the given distance."""
    center = basepoint(g)
    points = [
        exp_map(g, center, tangent_at_basepoint(g, d), length)
        for d, length in zip(figure.points, spokes)
    ]
    if g is GeometryKind.SPHERICAL:
        cloud = [center, *points]
        for p, q in combinations(cloud, 2):
            if np.linalg.norm(p + q) < 1e-9:
                raise Unrealizable("placement puts two vertices at antipodes")
    return center, points


# ----------------------------------------------------------------------
# Engine records
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolvedStep:
    """One solved vertex: figure, local placement and (except at the end) derived data."""

    vertex: int
    spec: SphericalPolygonSpec
    figure: SphericalPolygonRealization
    placement: Mapping[int, np.ndarray]
    step: ReductionStep | None = None
    derived: Measurements | None = None
    flat_edges: tuple[Edge, ...] = ()


@dataclass(frozen=True, eq=False)
class ReconstructionTrace:
    steps: tuple[SolvedStep, ...]
    terminal: SolvedStep
    realization: Realization

    def __iter__(self) -> Iterator[SolvedStep]:
        yield from self.steps
        yield self.terminal


class _DistanceTable(dict):
    """Pairwise distances known so far, keyed by ``edge_key``."""

    def record(self, a: int, b: int, value: float, where: int) -> None:
        key = edge_key(a, b)
        known = self.get(key)
        if known is None:
            self[key] = value
        elif abs(known - value) > CROSSCHECK_TOL * max(1.0, known):
            raise Unrealizable(
                f"vertex {where}: distance {key} placed at {value:.9f} but known as {known:.9f}",
                vertex=where, edge=key,
            )


def _solve_at(
    g: GeometryKind,
    graph: PolyhedralGraph,
    v: int,
    dist: _DistanceTable,
    angles: Mapping[Edge, float],
    convex: bool = False,
) -> tuple[PolyhedralGraph, SphericalPolygonSpec, SphericalPolygonRealization, dict[int, np.ndarray]]:
    local, _ = local_triangulation(graph, v)
    order, spec = _figure_spec(g, local, v, dist, angles)
    figure = solve_vertex_figure(spec, len(order), convex=convex)
    center, points = place_neighborhood(g, figure, [dist[edge_key(v, u)] for u in order])
    placement = {v: center, **dict(zip(order, points))}
    for a, b in combinations(order, 2):
        dist.record(a, b, distance(g, placement[a], placement[b]), v)
    return local, spec, figure, placement


def _rotation_about(e: np.ndarray, w_from: np.ndarray, w_to: np.ndarray) -> float:
    return float(np.arctan2(np.linalg.det(np.vstack([w_from, w_to, e])), np.dot(w_from, w_to)))


def _perp(x: np.ndarray, e: np.ndarray) -> np.ndarray:
    w = x - np.dot(x, e) * e
    return w / np.linalg.norm(w)


def derive_reduced_measurements(
    g: GeometryKind,
    step: ReductionStep,
    placement: Mapping[int, np.ndarray],
    lengths: Mapping[Edge, float],
    angles: Mapping[Edge, float],
    dist: Mapping[Edge, float],
) -> tuple[Measurements, tuple[Edge, ...]]:
    """
    Measurements of the reduced polyhedron. Boundary diagonals are measured
    on the placement; each rim edge turns by the wedge between the removed
    triangle at v and the new triangle replacing it. Everything else carries over.
    """
    v = step.removed
    reduced = step.reduced
    boundary = step.boundary
    local_diagonals = set(step.local_diagonals)
    new_faces = step.new_faces()
    for tri in new_faces:
        a, b, c = tri
        facial_angles_from_sides(g, dist[edge_key(b, c)], dist[edge_key(a, c)], dist[edge_key(a, b)])

    new_lengths: dict[Edge, float] = {}
    new_angles: dict[Edge, float] = {}
    for e in reduced.edges:
        new_lengths[e] = lengths[e] if e in lengths else dist[e]
        new_angles[e] = angles.get(e, np.nan)

    for a, b in step.boundary_diagonals:
        left = reduced.face_left_of(a, b).vertices
        right = reduced.face_left_of(b, a).vertices
        new_angles[edge_key(a, b)] = dihedral_at(
            g, placement[a], placement[b],
            [placement[x] for x in left], [placement[x] for x in right],
        )

    n = len(boundary)
    for k in range(n):
        a, b = boundary[k], boundary[(k + 1) % n]
        key = edge_key(a, b)
        third = next(t for t in new_faces if a in t and b in t)
        c = next(x for x in third if x not in (a, b))
        local = chart(g, placement[a], [placement[b], placement[v], placement[c]])
        e = local[0] / np.linalg.norm(local[0])
        turn = _rotation_about(e, _perp(local[1], e), _perp(local[2], e))
        before = np.pi if key in local_diagonals else angles[key]
        new_angles[key] = wrap(before + turn)

    missing = [e for e, x in new_angles.items() if np.isnan(x)]
    if missing:
        raise InternalContradiction(f"no derived dihedral angle for {missing}", edges=missing)

    touched = set(step.boundary_diagonals) | {edge_key(boundary[k], boundary[(k + 1) % n]) for k in range(n)}
    flat = tuple(sorted(e for e in touched if is_singular(new_angles[e])))
    triangles = {frozenset(t) for t in new_faces}
    for a, b in flat:
        sides = (reduced.face_left_of(a, b).vertices, reduced.face_left_of(b, a).vertices)
        if not any(len(f) == 3 and frozenset(f) in triangles for f in sides):
            raise InternalContradiction(f"flat edge {(a, b)} has no new triangle beside it", edge=(a, b))
    if flat:
        logger.debug("reduction at %d produced flat edges %s", v, list(flat))
    return Measurements(g, new_lengths, new_angles), flat


# ----------------------------------------------------------------------
# Reverse gluing
# ----------------------------------------------------------------------

def _glue(g: GeometryKind, solved: SolvedStep, coords: dict[int, np.ndarray], angles: Mapping[Edge, float]) -> None:
    """Align the stored star of the removed vertex onto the placed boundary and insert it."""
    step = solved.step
    v = step.removed
    boundary = step.boundary
    src = np.array([solved.placement[u] for u in boundary])
    dst = np.array([coords[u] for u in boundary])
    scale = max(1.0, max(distance(g, dst[0], q) for q in dst))
    local_diagonals = set(step.local_diagonals)

    matches = []
    report = []
    for cand in align_candidates(g, src, dst):
        if cand.residual > CROSSCHECK_TOL * scale:
            report.append(f"{'reflected' if cand.reflected else 'direct'}: residual {cand.residual:.2e}")
            continue
        pv = cand.isometry.apply(solved.placement[v])
        worst = 0.0
        n = len(boundary)
        for k in range(n):
            a, b = boundary[k], boundary[(k + 1) % n]
            key = edge_key(a, b)
            outer = step.local_graph.face_left_of(b, a).vertices
            got = dihedral_at(g, coords[a], coords[b], [pv, coords[a], coords[b]], [coords[x] for x in outer])
            want = np.pi if key in local_diagonals else angles[key]
            worst = max(worst, angle_gap(got, want))
        report.append(f"{'reflected' if cand.reflected else 'direct'}: rim mismatch {worst:.2e}")
        if worst <= BRANCH_TOL:
            matches.append(pv)
    if not matches:
        raise Unrealizable(f"vertex {v} cannot be glued back ({'; '.join(report)})", vertex=v)
    if len(matches) > 1 and np.linalg.norm(matches[0] - matches[1]) > CROSSCHECK_TOL * scale:
        raise InternalContradiction(f"both orientations glue vertex {v} back consistently", vertex=v)
    coords[v] = matches[0]


# ----------------------------------------------------------------------
# Main entry point
# ----------------------------------------------------------------------

RECONSTRUCTION_MODES = ("general", "convex")


def _general_sequence(
    g: GeometryKind,
    graph: PolyhedralGraph,
    dist: _DistanceTable,
    lengths: Mapping[Edge, float],
    angles: Mapping[Edge, float],
) -> tuple[list[SolvedStep], PolyhedralGraph, Mapping[Edge, float]]:
    """Solve along the combinatorial reduction sequence at strongly-rigid vertices."""
    steps = reduction_sequence(graph)
    logger.debug("reduction sequence: %s", [s.removed for s in steps])
    solved: list[SolvedStep] = []
    for step in steps:
        v = step.removed
        _, spec, figure, placement = _solve_at(g, step.graph, v, dist, angles)
        derived, flat_edges = derive_reduced_measurements(g, step, placement, lengths, angles, dist)
        solved.append(SolvedStep(v, spec, figure, MappingProxyType(placement), step, derived, flat_edges))
        lengths, angles = derived.lengths, derived.angles
        logger.debug("solved vertex %d (deg %d)", v, spec.n)
    return solved, (steps[-1].reduced if steps else graph), angles


def _bends_outward(step: ReductionStep, derived: Measurements) -> bool:
    n = len(step.boundary)
    touched = set(step.boundary_diagonals)
    touched |= {edge_key(step.boundary[k], step.boundary[(k + 1) % n]) for k in range(n)}
    return all(SINGULAR_BAND < derived.angles[e] < np.pi - SINGULAR_BAND for e in touched)


def _convex_sequence(
    g: GeometryKind,
    graph: PolyhedralGraph,
    dist: _DistanceTable,
    lengths: Mapping[Edge, float],
    angles: Mapping[Edge, float],
) -> tuple[list[SolvedStep], PolyhedralGraph, Mapping[Edge, float]]:
    """
    Strictly convex reduction: remove a rigid vertex and keep the boundary
    triangulation whose new edges all bend outward. That surface is the
    convex hull of the remaining vertices, so every later figure is convex too.
    """
    solved: list[SolvedStep] = []
    current = graph
    while terminal_vertex(current, strong=False) is None:
        v = find_rigid_vertex(current)
        _, spec, figure, placement = _solve_at(g, current, v, dist, angles, convex=True)
        for step in reductions_at(current, v):
            derived, flat_edges = derive_reduced_measurements(g, step, placement, lengths, angles, dist)
            if not flat_edges and _bends_outward(step, derived):
                break
        else:
            raise Unrealizable(
                f"vertex {v}: no boundary triangulation keeps the polyhedron strictly convex",
                vertex=v, obstruction="coplanar-link",
            )
        solved.append(SolvedStep(v, spec, figure, MappingProxyType(placement), step, derived))
        lengths, angles = derived.lengths, derived.angles
        current = step.reduced
        logger.debug("solved rigid vertex %d (deg %d)", v, spec.n)
    return solved, current, angles


def reconstruct(
    graph: PolyhedralGraph,
    measurements: Measurements,
    *,
    trace: bool = False,
    mode: str = "general",
):
    """
    The realization with the given edge lengths and dihedral angles, in
    normalized pose. With ``trace=True`` return the full ReconstructionTrace.

    ``mode="convex"`` is the strictly convex path: it needs every dihedral
    angle below pi, reduces at rigid vertices and solves each vertex figure
    as a convex n-gon.
    """
    if mode not in RECONSTRUCTION_MODES:
        raise ValueError(f"unknown reconstruction mode {mode!r}")
    require_valid(graph)
    measurements.require_graph(graph)
    flat = measurements.singular_edges()
    if flat:
        raise PartiallyFlatObstruction(
            f"input has flat edges {flat[:5]}; their endpoints are partially flat",
            edges=flat,
        )
    convex = mode == "convex"
    if convex:
        reflex = [e for e, x in measurements.angles.items() if x >= np.pi]
        if reflex:
            raise ConditionViolation(
                f"convex mode needs every dihedral angle below pi; reflex at {reflex[:5]}",
                edges=reflex,
            )
    g = measurements.geometry
    dist = _DistanceTable(measurements.lengths)
    sequence = _convex_sequence if convex else _general_sequence
    solved, final, angles = sequence(g, graph, dist, measurements.lengths, measurements.angles)

    t = terminal_vertex(final, strong=not convex)
    if t is None:
        raise InternalContradiction("reduction stopped before reaching a terminal graph")
    _, spec, figure, placement = _solve_at(g, final, t, dist, angles, convex=convex)
    terminal = SolvedStep(t, spec, figure, MappingProxyType(placement))

    coords = dict(placement)
    for record in reversed(solved):
        previous = record.step.graph
        if previous is graph:
            angles_before = measurements.angles
        else:
            angles_before = next(s.derived.angles for s in solved if s.step.reduced is previous)
        _glue(g, record, coords, angles_before)

    try:
        real = normalize_pose(Realization(g, coords))
        check = measure(real, graph)
    except (FaceNotPlanar, StructuralError) as e:
        raise Unrealizable(f"reconstructed polyhedron is inconsistent: {e}") from e
    deviation = check.max_deviation(measurements)
    if deviation > MEASURE_TOL:
        raise Unrealizable(f"reconstruction reproduces the measurements only to {deviation:.3e}",
                           deviation=deviation)
    if trace:
        return ReconstructionTrace(tuple(solved), terminal, real)
    return real


# ----------------------------------------------------------------------
# Conditions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionsReport:
    convex_faces: bool
    nonconvex_faces: tuple[tuple[int, ...], ...] = ()
    partially_flat_vertices: tuple[int, ...] = ()
    collinear_triples: tuple[tuple[int, int, int], ...] = ()
    flat_edges: tuple[Edge, ...] = ()
    seven_coplanar: bool = False
    coplanar_witness: tuple[int, ...] = ()
    weakly_convex: bool = False
    reflex_edges: tuple[Edge, ...] = field(default=())

    @property
    def theorem_main_applies(self) -> bool:
        return self.convex_faces and not self.partially_flat_vertices and not self.collinear_triples

    @property
    def theorem_seven_coplanar_applies(self) -> bool:
        return (
            self.convex_faces
            and not self.flat_edges
            and not self.seven_coplanar
            and not self.collinear_triples
        )

    @property
    def passes(self) -> bool:
        return self.theorem_main_applies


def _straightened(real: Realization) -> dict[int, np.ndarray]:
    """R^3 picture in which geodesics are straight: Klein model for H^3, gnomonic chart for S^3."""
    g = real.geometry
    if g is GeometryKind.EUCLIDEAN:
        return dict(real.coords)
    if g is GeometryKind.HYPERBOLIC:
        return {v: p[1:] / p[0] for v, p in real.coords.items()}
    center = real.array().sum(axis=0)
    center /= np.linalg.norm(center)
    frame = tangent_frame(g, center)
    out = {}
    for v, p in real.coords.items():
        height = float(np.dot(p, center))
        if height <= 1e-9:
            raise Unrealizable("spherical realization does not fit in an open hemisphere")
        out[v] = frame @ (p / height)
    return out


def _face_is_convex(pts: np.ndarray, tol: float) -> bool:
    normal = newell_normal(pts)
    norm = np.linalg.norm(normal)
    if norm < tol:
        return False
    normal /= norm
    k = len(pts)
    total = 0.0
    for i in range(k):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % k]
        u, w = b - a, c - b
        cross = float(np.dot(np.cross(u, w), normal))
        if cross < -tol * np.linalg.norm(u) * np.linalg.norm(w):
            return False
        total += np.arctan2(cross, float(np.dot(u, w)))
    return abs(total - 2 * np.pi) < 1e-6


def _homogeneous(real: Realization, ids: Sequence[int]) -> np.ndarray:
    pts = real.array(ids)
    if real.geometry is GeometryKind.EUCLIDEAN:
        pts = np.hstack([np.ones((len(pts), 1)), pts])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _triple_normals(rows: np.ndarray) -> np.ndarray:
    """Generalized cross product in R^4 of each stacked triple (T, 3, 4) -> (T, 4)."""
    out = np.empty((rows.shape[0], 4))
    for k in range(4):
        minor = np.delete(rows, k, axis=2)
        out[:, k] = (-1) ** (3 + k) * np.linalg.det(minor)
    return out


def check_conditions(real: Realization, graph: PolyhedralGraph, tol: float = PLANARITY_TOL) -> ConditionsReport:
    """Check the rigidity hypotheses on a realization."""
    g = real.geometry
    flat_pts = _straightened(real)

    nonconvex = []
    for face in graph.faces:
        pts = np.array([flat_pts[v] for v in face.vertices])
        if not _face_is_convex(pts, tol):
            nonconvex.append(face.vertices)

    ids = real.vertices
    index = {v: i for i, v in enumerate(ids)}
    hom = _homogeneous(real, ids)

    partially_flat = []
    for v in ids:
        faces = graph.faces_at(v)
        for f1, f2 in combinations(faces, 2):
            union = sorted(set(f1.vertices) | set(f2.vertices))
            sv = np.linalg.svd(hom[[index[u] for u in union]], compute_uv=False)
            if len(sv) >= 4 and sv[3] <= tol:
                partially_flat.append(v)
                break

    try:
        m = measure(real, graph)
        flat = tuple(m.singular_edges())
        reflex = tuple(e for e, x in m.angles.items() if x > np.pi + SINGULAR_BAND)
    except FaceNotPlanar:
        flat, reflex = (), ()

    triples = list(combinations(range(len(ids)), 3))
    collinear: list[tuple[int, int, int]] = []
    seven, witness = False, ()
    if triples:
        idx = np.array(triples)
        normals = _triple_normals(hom[idx])
        sizes = np.linalg.norm(normals, axis=1)
        for t in np.flatnonzero(sizes < tol):
            collinear.append(tuple(ids[i] for i in triples[t]))
        good = sizes >= tol
        if len(ids) >= 7 and np.any(good):
            units = normals[good] / sizes[good, None]
            counts = np.abs(units @ hom.T) <= tol
            best = int(np.argmax(counts.sum(axis=1)))
            if counts[best].sum() >= 7:
                seven = True
                witness = tuple(ids[i] for i in np.flatnonzero(counts[best]))

    weakly_convex = False
    try:
        hull = ConvexHull(np.array([flat_pts[v] for v in ids]))
        weakly_convex = len(hull.vertices) == len(ids)
    except (QhullError, ValueError):
        weakly_convex = False

    return ConditionsReport(
        convex_faces=not nonconvex,
        nonconvex_faces=tuple(nonconvex),
        partially_flat_vertices=tuple(partially_flat),
        collinear_triples=tuple(collinear),
        flat_edges=flat,
        seven_coplanar=seven,
        coplanar_witness=witness,
        weakly_convex=weakly_convex,
        reflex_edges=reflex,
    )


def require_conditions(real: Realization, graph: PolyhedralGraph) -> ConditionsReport:
    """check_conditions, raising the matching typed error when a hypothesis fails."""
    report = check_conditions(real, graph)
    if report.collinear_triples:
        raise CollinearViolation(f"collinear vertices {report.collinear_triples[0]}",
                                 witness=report.collinear_triples[0])
    if report.partially_flat_vertices:
        raise PartiallyFlatObstruction(
            f"partially flat vertices {list(report.partially_flat_vertices)}",
            witness=report.partially_flat_vertices,
        )
    if not report.convex_faces:
        raise ConditionViolation(f"non-convex faces {list(report.nonconvex_faces)}",
                                 witness=report.nonconvex_faces)
    return report
