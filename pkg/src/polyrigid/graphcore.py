# src/polyrigid/graphcore.py
"""
Polyhedral graphs as rotation systems, and every purely combinatorial
operation the reconstruction engine needs: face tracing, validation,
non-triangular degree, (strongly-)rigid vertices, the counting identity,
local triangulation, boundary triangulations and vertex reduction.

The rotation system is the single source of truth. Faces are always
traced from it, never stored independently.

Conventions: each vertex lists its neighbors counterclockwise as seen from
outside. The face to the left of the directed edge u->w continues with
w -> pred_w(u), so traced faces are counterclockwise from outside as well.
"""
from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import networkx as nx

from .errors import (
    DegenerateTriangulation,
    InternalContradiction,
    ReductionInvalid,
    StructuralError,
)

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def edge_key(a: int, b: int) -> Edge:
    """Canonical (min, max) key for an undirected edge."""
    return (a, b) if a < b else (b, a)


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FaceCycle:
    """A face as the cyclic list of its vertices in boundary order."""

    face_id: int
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_triangle(self) -> bool:
        return len(self.vertices) == 3

    def darts(self) -> Iterator[Edge]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]


@dataclass(frozen=True, eq=False)
class PolyhedralGraph:
    """
    A combinatorial polyhedron given by its rotation system.

    ``rotation`` maps each vertex id to its counterclockwise neighbor cycle.
    Vertex ids need not be contiguous: graphs produced by vertex reduction
    keep the ids of the surviving vertices.
    """

    rotation: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        frozen = {int(v): tuple(int(u) for u in nbrs) for v, nbrs in self.rotation.items()}
        for v, nbrs in frozen.items():
            if not nbrs:
                raise StructuralError(f"vertex {v} has an empty rotation", vertex=v)
            for u in nbrs:
                if u not in frozen:
                    raise StructuralError(
                        f"vertex {v} lists neighbor {u}, which is not a vertex",
                        vertex=v, neighbor=u,
                    )
        object.__setattr__(self, "rotation", MappingProxyType(dict(sorted(frozen.items()))))

    @classmethod
    def from_lists(cls, rotation: Sequence[Sequence[int]]) -> PolyhedralGraph:
        """Build from the JSON layout: list index = vertex id (0-based)."""
        return cls({v: tuple(nbrs) for v, nbrs in enumerate(rotation)})

    # -- basic accessors ------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self.rotation)

    def __contains__(self, v: object) -> bool:
        return v in self.rotation

    def _require(self, v: int) -> None:
        if v not in self.rotation:
            raise StructuralError(f"unknown vertex id {v}", vertex=v)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._require(v)
        return self.rotation[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted({edge_key(v, u) for v, nbrs in self.rotation.items() for u in nbrs}))

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edge_set

    @cached_property
    def _positions(self) -> dict[int, dict[int, int]]:
        return {v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in self.rotation.items()}

    def pred(self, w: int, u: int) -> int:
        """Neighbor of w immediately clockwise from u."""
        nbrs = self.rotation[w]
        return nbrs[(self._positions[w][u] - 1) % len(nbrs)]

    def succ(self, w: int, u: int) -> int:
        """Neighbor of w immediately counterclockwise from u."""
        nbrs = self.rotation[w]
        return nbrs[(self._positions[w][u] + 1) % len(nbrs)]

    # -- faces ------------------------------------------------------------

    @cached_property
    def _face_trace(self) -> tuple[tuple[FaceCycle, ...], dict[Edge, int]]:
        if not is_simple(self):
            raise StructuralError("face tracing requires a simple, symmetric rotation system")
        dart_face: dict[Edge, int] = {}
        faces: list[FaceCycle] = []
        for v in self.vertices:
            for u in self.rotation[v]:
                if (v, u) in dart_face:
                    continue
                cycle: list[int] = []
                a, b = v, u
                while (a, b) not in dart_face:
                    dart_face[(a, b)] = len(faces)
                    cycle.append(a)
                    a, b = b, self.pred(b, a)
                faces.append(FaceCycle(len(faces), tuple(cycle)))
        return tuple(faces), dart_face

    @property
    def faces(self) -> tuple[FaceCycle, ...]:
        return self._face_trace[0]

    def face_left_of(self, a: int, b: int) -> FaceCycle:
        """The face to the left of the directed edge a->b."""
        try:
            return self.faces[self._face_trace[1][(a, b)]]
        except KeyError:
            raise StructuralError(f"{a}->{b} is not an edge", edge=(a, b)) from None

    def faces_at(self, v: int) -> tuple[FaceCycle, ...]:
        """Faces incident to v, in the rotation order of v (face left of v->u_k)."""
        return tuple(self.face_left_of(v, u) for u in self.neighbors(v))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`; ``faces`` is filled whenever tracing was possible."""

    failures: tuple[str, ...]
    faces: tuple[FaceCycle, ...] = ()
    vertex_count: int = 0
    edge_count: int = 0

    @property
    def valid(self) -> bool:
        return not self.failures

    @property
    def face_count(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class ReductionStep:
    """
    One vertex reduction: ``graph`` at ``removed`` becomes ``reduced``.

    ``boundary`` is the cycle of N_v in rotation order of the removed vertex,
    ``local_diagonals`` are the edges added to form P_v and
    ``boundary_diagonals`` triangulate the boundary cycle.
    """

    removed: int
    graph: PolyhedralGraph = field(repr=False)
    local_graph: PolyhedralGraph = field(repr=False)
    local_diagonals: tuple[Edge, ...]
    boundary: tuple[int, ...]
    boundary_diagonals: tuple[Edge, ...]
    reduced: PolyhedralGraph = field(repr=False)

    def new_faces(self) -> tuple[tuple[int, int, int], ...]:
        """Triangles of the boundary triangulation, oriented like the boundary cycle."""
        return triangles_of(self.boundary, self.boundary_diagonals)


# ----------------------------------------------------------------------
# Validation
# ----------------------------------------------------------------------

def is_simple(graph: PolyhedralGraph) -> bool:
    """No self-loops, no repeated neighbor, symmetric adjacency."""
    for v, nbrs in graph.rotation.items():
        if v in nbrs or len(set(nbrs)) != len(nbrs):
            return False
        for u in nbrs:
            if v not in graph.rotation[u]:
                return False
    return True


def is_three_connected(graph: PolyhedralGraph) -> bool:
    """
    Removing any two vertices leaves the graph connected.

    Checked exhaustively: for every vertex a, the graph without a must be
    biconnected, which covers every pair (a, b).
    """
    if graph.vertex_count < 4:
        return False
    g = graph.to_networkx()
    if not nx.is_connected(g):
        return False
    for a in graph.vertices:
        rest = g.subgraph(v for v in graph.vertices if v != a)
        if not nx.is_biconnected(rest):
            return False
    return True


def validate(graph: PolyhedralGraph) -> ValidationReport:
    """Check every polyhedral-graph invariant and report each failure."""
    failures: list[str] = []
    if not is_simple(graph):
        failures.append("non-simple: self-loop, repeated neighbor or asymmetric adjacency")
        return ValidationReport(tuple(failures), vertex_count=graph.vertex_count)

    faces = graph.faces
    v_count, e_count, f_count = graph.vertex_count, len(graph.edges), len(faces)
    if v_count - e_count + f_count != 2:
        failures.append(
            f"non-planar: V - E + F = {v_count} - {e_count} + {f_count} "
            f"= {v_count - e_count + f_count}, expected 2"
        )
    short = [f.face_id for f in faces if len(f) < 3]
    if short:
        failures.append(f"bigon face(s): {short}")
    if not is_three_connected(graph):
        failures.append("not 3-connected")
    return ValidationReport(tuple(failures), faces, v_count, e_count)


def require_valid(graph: PolyhedralGraph) -> PolyhedralGraph:
    report = validate(graph)
    if not report.valid:
        raise StructuralError(
            "not a polyhedral graph: " + "; ".join(report.failures), failures=report.failures
        )
    return graph


# ----------------------------------------------------------------------
# Degrees, rigidity, counting
# ----------------------------------------------------------------------

def tau(graph: PolyhedralGraph, v: int) -> int:
    """Non-triangular degree: number of incident faces with more than 3 vertices."""
    return sum(1 for f in graph.faces_at(v) if len(f) > 3)


def is_rigid(graph: PolyhedralGraph, v: int) -> bool:
    return tau(graph, v) <= 3


def is_strongly_rigid(graph: PolyhedralGraph, v: int) -> bool:
    t = tau(graph, v)
    if graph.degree(v) <= 4:
        return t <= 3
    return t <= 1


def rigid_vertices(graph: PolyhedralGraph) -> list[int]:
    return [v for v in graph.vertices if is_rigid(graph, v)]


def strongly_rigid_vertices(graph: PolyhedralGraph) -> list[int]:
    return [v for v in graph.vertices if is_strongly_rigid(graph, v)]


def find_strongly_rigid_vertex(graph: PolyhedralGraph) -> int:
    """Smallest-id strongly-rigid vertex; one always exists for a polyhedral graph."""
    for v in graph.vertices:
        if is_strongly_rigid(graph, v):
            return v
    raise InternalContradiction(
        "no strongly-rigid vertex found; the input passed validation incorrectly"
    )


def find_rigid_vertex(graph: PolyhedralGraph) -> int:
    for v in graph.vertices:
        if is_rigid(graph, v):
            return v
    raise InternalContradiction("no rigid vertex found; the input passed validation incorrectly")


def degree_census(graph: PolyhedralGraph) -> tuple[Counter[int], Counter[int]]:
    """Histograms (V_n, F_n) of vertex degrees and face sizes."""
    vertex_degrees = Counter(graph.degree(v) for v in graph.vertices)
    face_sizes = Counter(len(f) for f in graph.faces)
    return vertex_degrees, face_sizes


def counting_identity_residual(graph: PolyhedralGraph) -> int:
    """V3 + F3 - sum_{n>=5} (n-4)(Vn + Fn) - 8; zero for every polyhedral graph."""
    v_n, f_n = degree_census(graph)
    high = sum((n - 4) * (v_n[n] + f_n[n]) for n in set(v_n) | set(f_n) if n >= 5)
    return v_n[3] + f_n[3] - high - 8


def star_covers_graph(graph: PolyhedralGraph, v: int) -> bool:
    """Terminal predicate V(N_v) = V(P)."""
    return graph.degree(v) + 1 == graph.vertex_count


def terminal_vertex(graph: PolyhedralGraph, *, strong: bool = True) -> int | None:
    """Smallest strongly-rigid (or rigid) vertex whose star covers the graph, if any."""
    for v in (strongly_rigid_vertices(graph) if strong else rigid_vertices(graph)):
        if star_covers_graph(graph, v):
            return v
    return None


# ----------------------------------------------------------------------
# Local triangulation and vertex reduction
# ----------------------------------------------------------------------

def _insert(seq: list[int], anchor: int, value: int, after: bool) -> None:
    i = seq.index(anchor)
    seq.insert(i + 1 if after else i, value)


def local_triangulation(graph: PolyhedralGraph, v: int) -> tuple[PolyhedralGraph, tuple[Edge, ...]]:
    """
    Add one diagonal per non-triangular face at v so that the star of v is
    all triangles. Returns P_v and the added diagonals.
    """
    nbrs = graph.neighbors(v)
    rotation = {w: list(r) for w, r in graph.rotation.items()}
    added: list[Edge] = []
    for k, u in enumerate(nbrs):
        face = graph.face_left_of(v, u)
        if len(face) == 3:
            continue
        # face = v, u_k, ..., u_{k+1}
        nxt = nbrs[(k + 1) % len(nbrs)]
        if graph.has_edge(u, nxt):
            raise DegenerateTriangulation(
                f"diagonal {edge_key(u, nxt)} at vertex {v} duplicates an existing edge",
                vertex=v, edge=edge_key(u, nxt),
            )
        _insert(rotation[u], v, nxt, after=False)
        _insert(rotation[nxt], v, u, after=True)
        added.append(edge_key(u, nxt))
    if not added:
        return graph, ()
    return PolyhedralGraph(rotation), tuple(added)


def _nested_product(parts: Sequence[Iterable[tuple[Edge, ...]]]) -> Iterator[tuple[Edge, ...]]:
    if not parts:
        yield ()
        return
    head, rest = parts[0], parts[1:]
    for first in head:
        for tail in _nested_product(rest):
            yield first + tail


def _fan_subsets(start: int, stop: int) -> Iterator[tuple[int, ...]]:
    """Increasing tuples from range(start, stop); extensions before their prefix, () last."""
    for x in range(start, stop):
        for rest in _fan_subsets(x + 1, stop):
            yield (x,) + rest
    yield ()


def _polygon_triangulations(poly: tuple[int, ...]) -> Iterator[tuple[Edge, ...]]:
    """
    Lazily enumerate triangulations of the convex polygon ``poly`` (increasing
    position labels) in lexicographic order of their sorted diagonal lists.

    Split by the fan at poly[0]: its diagonals come first in sorted order and
    the pieces between consecutive fan diagonals contribute disjoint, increasing
    ranges, so the order is a product of the pieces' orders.
    """
    n = len(poly)
    if n <= 3:
        yield ()
        return
    for fan in _fan_subsets(2, n - 1):
        bounds = (1, *fan, n - 1)
        fan_edges = tuple((poly[0], poly[i]) for i in fan)
        pieces = []
        for lo, hi in zip(bounds, bounds[1:]):
            if hi - lo < 2:
                continue
            sub = poly[lo:hi + 1]
            closing = (sub[0], sub[-1])
            pieces.append(
                tuple(sorted(t + (closing,))) for t in _polygon_triangulations(sub)
            )
        for rest in _nested_product(pieces):
            yield fan_edges + rest


def boundary_triangulations(
    boundary: Sequence[int],
    existing_edges: Iterable[Edge] = (),
) -> Iterator[tuple[Edge, ...]]:
    """
    Lazily enumerate the Catalan(n-2) triangulations of the boundary n-gon as
    diagonal sets, lexicographic on sorted position pairs (fan at the first
    boundary vertex first). Candidates with a diagonal that duplicates an
    existing edge are skipped.
    """
    boundary = tuple(boundary)
    if len(boundary) < 3:
        raise StructuralError(f"boundary cycle needs at least 3 vertices, got {len(boundary)}")
    taken = {edge_key(a, b) for a, b in existing_edges}
    for diagonals in _polygon_triangulations(tuple(range(len(boundary)))):
        mapped = tuple(edge_key(boundary[i], boundary[j]) for i, j in diagonals)
        if any(d in taken for d in mapped):
            continue
        yield mapped


def triangles_of(boundary: Sequence[int], diagonals: Iterable[Edge]) -> tuple[tuple[int, int, int], ...]:
    """Triangles of a boundary triangulation, each listed in boundary-cycle order."""
    pos = {u: i for i, u in enumerate(boundary)}
    n = len(boundary)
    adj: dict[int, set[int]] = {i: {(i - 1) % n, (i + 1) % n} for i in range(n)}
    for a, b in diagonals:
        adj[pos[a]].add(pos[b])
        adj[pos[b]].add(pos[a])
    triangles = []
    for i in range(n):
        for j in adj[i]:
            if j <= i:
                continue
            for k in adj[j] & adj[i]:
                if k > j:
                    triangles.append((boundary[i], boundary[j], boundary[k]))
    if len(triangles) != n - 2:
        raise ReductionInvalid(
            f"diagonals do not triangulate the {n}-gon boundary ({len(triangles)} triangles)",
            boundary=tuple(boundary),
        )
    return tuple(triangles)


def vertex_reduction(graph: PolyhedralGraph, v: int, diagonals: Iterable[Edge]) -> PolyhedralGraph:
    """
    P' = (P_v minus v) glued with the triangulated boundary of N_v.

    Raises ReductionInvalid when the result is not a polyhedral graph; the
    caller then moves on to the next candidate triangulation.
    """
    local, _ = local_triangulation(graph, v)
    boundary = local.neighbors(v)
    diagonals = tuple(edge_key(a, b) for a, b in diagonals)
    n = len(boundary)
    if len(diagonals) != max(n - 3, 0):
        raise ReductionInvalid(
            f"a triangulation of a {n}-gon needs {n - 3} diagonals, got {len(diagonals)}",
            vertex=v,
        )
    triangles_of(boundary, diagonals)
    pos = {u: i for i, u in enumerate(boundary)}
    for a, b in diagonals:
        if a not in pos or b not in pos:
            raise ReductionInvalid(f"diagonal {(a, b)} leaves the boundary of vertex {v}", vertex=v)
        if local.has_edge(a, b):
            raise ReductionInvalid(f"diagonal {(a, b)} duplicates an existing edge", vertex=v)

    extra: dict[int, list[int]] = {u: [] for u in boundary}
    for a, b in diagonals:
        extra[a].append(b)
        extra[b].append(a)

    rotation: dict[int, list[int]] = {}
    for w, nbrs in local.rotation.items():
        if w == v:
            continue
        if w not in pos:
            rotation[w] = list(nbrs)
            continue
        k = pos[w]
        fan = sorted(extra[w], key=lambda x: (pos[x] - k) % n)
        merged: list[int] = []
        for u in nbrs:
            merged.extend(fan if u == v else [u])
        rotation[w] = merged

    reduced = PolyhedralGraph(rotation)
    report = validate(reduced)
    if not report.valid:
        raise ReductionInvalid(
            f"reduction at {v} with diagonals {list(diagonals)} fails: "
            + "; ".join(report.failures),
            vertex=v, failures=report.failures,
        )
    return reduced


def reductions_at(graph: PolyhedralGraph, v: int) -> Iterator[ReductionStep]:
    """Every valid vertex reduction at ``v``, one per admissible boundary triangulation."""
    local, local_diagonals = local_triangulation(graph, v)
    boundary = local.neighbors(v)
    existing = [e for e in local.edges if v not in e]
    for tried, diagonals in enumerate(boundary_triangulations(boundary, existing)):
        try:
            reduced = vertex_reduction(graph, v, diagonals)
        except ReductionInvalid as e:
            logger.debug("candidate %d at vertex %d rejected: %s", tried, v, e)
            continue
        yield ReductionStep(
            removed=v,
            graph=graph,
            local_graph=local,
            local_diagonals=local_diagonals,
            boundary=boundary,
            boundary_diagonals=diagonals,
            reduced=reduced,
        )


def reduce_once(graph: PolyhedralGraph, *, strong: bool = True) -> ReductionStep | None:
    """
    Reduce at the smallest strongly-rigid vertex (rigid with ``strong=False``),
    or return None at the terminal graph.
    """
    if terminal_vertex(graph, strong=strong) is not None:
        return None
    v = find_strongly_rigid_vertex(graph) if strong else find_rigid_vertex(graph)
    step = next(reductions_at(graph, v), None)
    if step is None:
        raise InternalContradiction(
            f"every boundary triangulation at vertex {v} failed; a valid one always exists",
            vertex=v,
        )
    logger.debug(
        "reduced vertex %d (deg %d) with diagonals %s", v, len(step.boundary), list(step.boundary_diagonals)
    )
    return step


def reduction_sequence(graph: PolyhedralGraph, *, strong: bool = True) -> list[ReductionStep]:
    """
    Reduce at strongly-rigid (or, with ``strong=False``, rigid) vertices
    until such a vertex's star covers the whole graph.
    """
    steps: list[ReductionStep] = []
    current = graph
    while (step := reduce_once(current, strong=strong)) is not None:
        steps.append(step)
        current = step.reduced
    return steps
