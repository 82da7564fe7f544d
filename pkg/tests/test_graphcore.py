# tests/test_graphcore.py
from __future__ import annotations

import pytest

from polyrigid.errors import DegenerateTriangulation, ReductionInvalid, StructuralError
from polyrigid.fixtures import canonical, graph_from_faces, random_convex
from polyrigid.graphcore import (
    PolyhedralGraph,
    boundary_triangulations,
    counting_identity_residual,
    degree_census,
    find_rigid_vertex,
    find_strongly_rigid_vertex,
    is_rigid,
    is_strongly_rigid,
    local_triangulation,
    reduction_sequence,
    reductions_at,
    rigid_vertices,
    star_covers_graph,
    tau,
    terminal_vertex,
    triangles_of,
    validate,
    vertex_reduction,
)

from conftest import ALL_CANONICAL


def _without_edges(graph: PolyhedralGraph, *edges) -> PolyhedralGraph:
    rotation = {v: list(nbrs) for v, nbrs in graph.rotation.items()}
    for a, b in edges:
        rotation[a].remove(b)
        rotation[b].remove(a)
    return PolyhedralGraph(rotation)


# -- validation ---------------------------------------------------------

def test_tetrahedron_is_valid(tetrahedron):
    report = validate(tetrahedron[0])
    assert report.valid
    assert report.face_count == 4


def test_cube_is_valid(cube):
    report = validate(cube[0])
    assert report.valid
    assert report.face_count == 6
    assert all(len(f) == 4 for f in report.faces)


def test_scrambled_cube_rotation_fails_face_trace(cube):
    rotation = {v: list(nbrs) for v, nbrs in cube[0].rotation.items()}
    rotation[0] = rotation[0][::-1]
    report = validate(PolyhedralGraph(rotation))
    assert not report.valid
    assert report.face_count != 6
    assert any("non-planar" in f for f in report.failures)


def test_unknown_neighbor_is_structural():
    with pytest.raises(StructuralError):
        PolyhedralGraph.from_lists([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 7]])


def test_asymmetric_rotation_is_reported():
    report = validate(PolyhedralGraph.from_lists([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1]]))
    assert not report.valid
    assert "non-simple" in report.failures[0]


def test_faces_follow_darts(cube):
    graph = cube[0]
    for face in graph.faces:
        for a, b in face.darts():
            assert graph.face_left_of(a, b) == face


# -- degrees and rigidity ----------------------------------------------

def test_tau_values(cube, icosahedron):
    assert all(tau(cube[0], v) == 3 for v in cube[0].vertices)
    assert all(tau(icosahedron[0], v) == 0 for v in icosahedron[0].vertices)
    prism, _ = canonical("prism(5)")
    assert all(tau(prism, v) == 3 for v in prism.vertices)


def test_strongly_rigid_examples(cube, icosahedron):
    assert is_strongly_rigid(cube[0], 0)
    assert is_strongly_rigid(icosahedron[0], 0)


def test_deg5_vertex_with_two_quads_is_not_strongly_rigid(icosahedron):
    graph = icosahedron[0]
    v = 0
    u = graph.neighbors(v)
    reduced = _without_edges(graph, (u[0], u[1]), (u[2], u[3]))
    assert validate(reduced).valid
    assert reduced.degree(v) == 5
    assert tau(reduced, v) == 2
    assert not is_strongly_rigid(reduced, v)
    assert is_rigid(reduced, v)


def test_find_strongly_rigid_vertex(cube, dodecahedron):
    assert find_strongly_rigid_vertex(cube[0]) == 0
    v = find_strongly_rigid_vertex(dodecahedron[0])
    assert dodecahedron[0].degree(v) == 3
    assert tau(dodecahedron[0], v) == 3
    assert find_rigid_vertex(dodecahedron[0]) == 0


@pytest.mark.parametrize("name", ALL_CANONICAL)
def test_counting_identity_on_canonical_solids(name):
    graph, _ = canonical(name)
    assert counting_identity_residual(graph) == 0


def test_degree_census_icosahedron(icosahedron):
    vertex_degrees, face_sizes = degree_census(icosahedron[0])
    assert vertex_degrees == {5: 12}
    assert face_sizes == {3: 20}


@pytest.mark.parametrize("seed", range(10))
def test_counting_identity_on_random_graphs(seed):
    graph, _ = random_convex(seed, 8 + seed)
    assert counting_identity_residual(graph) == 0
    find_strongly_rigid_vertex(graph)


@pytest.mark.slow
def test_counting_identity_sweep():
    for seed in range(500):
        graph, _ = random_convex(seed, 8 + seed % 33)
        assert counting_identity_residual(graph) == 0
        find_strongly_rigid_vertex(graph)


# -- local triangulation ------------------------------------------------

def test_local_triangulation_cube(cube):
    local, added = local_triangulation(cube[0], 0)
    assert len(added) == 3
    assert all(len(f) == 3 for f in local.faces_at(0))
    boundary = local.neighbors(0)
    assert len(boundary) == 3
    assert all(local.has_edge(boundary[i], boundary[(i + 1) % 3]) for i in range(3))


def test_local_triangulation_icosahedron(icosahedron):
    local, added = local_triangulation(icosahedron[0], 0)
    assert added == ()
    assert local is icosahedron[0]


def test_local_triangulation_prism():
    prism, _ = canonical("prism(5)")
    _, added = local_triangulation(prism, 0)
    assert len(added) == 3


def test_local_triangulation_refuses_duplicate_diagonal():
    # quad face 0-1-2-3 whose diagonal 1-3 is already an edge elsewhere
    graph = graph_from_faces([(0, 1, 2, 3), (0, 3, 1), (1, 3, 2)])
    assert not validate(graph).valid
    with pytest.raises(DegenerateTriangulation):
        local_triangulation(graph, 0)


# -- boundary triangulations ---------------------------------------------

@pytest.mark.parametrize(("n", "count"), [(3, 1), (4, 2), (5, 5), (6, 14)])
def test_boundary_triangulation_counts(n, count):
    assert len(list(boundary_triangulations(range(n)))) == count


def test_boundary_triangulations_lexicographic():
    first = next(boundary_triangulations((0, 1, 2, 3, 4)))
    assert first == ((0, 2), (0, 3))


def test_boundary_triangulations_skip_existing_edges():
    candidates = list(boundary_triangulations((0, 1, 2, 3), existing_edges=[(0, 2)]))
    assert candidates == [((1, 3),)]


def test_triangles_of_rejects_partial_triangulation():
    with pytest.raises(ReductionInvalid):
        triangles_of((0, 1, 2, 3, 4), [(0, 2)])


# -- vertex reduction -----------------------------------------------------

def test_cube_corner_reduction(cube):
    reduced = vertex_reduction(cube[0], 0, ())
    report = validate(reduced)
    assert report.valid
    assert reduced.vertex_count == 7
    boundary = set(cube[0].neighbors(0))
    assert any(set(f.vertices) == boundary for f in reduced.faces)


def test_octahedron_both_diagonals_reduce(octahedron):
    graph = octahedron[0]
    local, _ = local_triangulation(graph, 0)
    boundary = local.neighbors(0)
    candidates = list(boundary_triangulations(boundary))
    assert len(candidates) == 2
    for diagonals in candidates:
        reduced = vertex_reduction(graph, 0, diagonals)
        assert validate(reduced).valid
        assert reduced.vertex_count == 5


def test_reduction_rejects_wrong_diagonal_count(octahedron):
    with pytest.raises(ReductionInvalid):
        vertex_reduction(octahedron[0], 0, ())


def test_tetrahedron_is_already_terminal(tetrahedron):
    assert reduction_sequence(tetrahedron[0]) == []
    assert star_covers_graph(tetrahedron[0], 0)
    assert terminal_vertex(tetrahedron[0]) == 0


def test_cube_reduction_sequence(cube):
    steps = reduction_sequence(cube[0])
    assert steps
    count = cube[0].vertex_count
    for step in steps:
        assert step.reduced.vertex_count == count - 1
        assert set(step.reduced.vertices) == set(step.graph.vertices) - {step.removed}
        assert all(len(t) == 3 for t in step.new_faces())
        count -= 1
    assert count >= 4
    assert terminal_vertex(steps[-1].reduced) is not None


def test_octahedron_vertex_has_two_reductions(octahedron):
    steps = list(reductions_at(octahedron[0], 0))
    assert len(steps) == 2
    assert steps[0].boundary_diagonals != steps[1].boundary_diagonals
    for step in steps:
        assert step.removed == 0
        assert validate(step.reduced).valid


def test_rigid_reduction_sequence(dodecahedron):
    graph = dodecahedron[0]
    assert set(rigid_vertices(graph)) == set(graph.vertices)
    steps = reduction_sequence(graph, strong=False)
    assert steps
    for step in steps:
        assert is_rigid(step.graph, step.removed)
    assert terminal_vertex(steps[-1].reduced, strong=False) is not None


def test_dodecahedron_intermediate_graphs_are_polyhedral(dodecahedron):
    steps = reduction_sequence(dodecahedron[0])
    assert steps
    for step in steps:
        assert validate(step.reduced).valid
        find_strongly_rigid_vertex(step.reduced)
        assert counting_identity_residual(step.reduced) == 0


@pytest.mark.parametrize("name", ALL_CANONICAL)
def test_strong_rigidity_implies_rigidity(name):
    graph, _ = canonical(name)
    for v in graph.vertices:
        assert is_rigid(graph, v)
        if is_strongly_rigid(graph, v):
            assert tau(graph, v) <= 3
