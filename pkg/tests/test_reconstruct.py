# tests/test_reconstruct.py
from __future__ import annotations

import numpy as np
import pytest

from polyrigid.errors import (
    CollinearViolation,
    ConditionViolation,
    FaceNotPlanar,
    PartiallyFlatObstruction,
    PolyrigidError,
    StructuralError,
    Unrealizable,
)
from polyrigid.fixtures import (
    canonical,
    dented,
    graph_from_faces,
    oriented_faces,
    random_convex,
    twisted_cube_pair,
)
from polyrigid.geometry3 import GeometryKind, Realization, congruent, distance
from polyrigid.graphcore import edge_key, is_rigid, reduction_sequence
from polyrigid.reconstruct import (
    Measurements,
    ReconstructionTrace,
    check_conditions,
    measure,
    place_neighborhood,
    reconstruct,
    require_conditions,
    solve_vertex_figure,
    vertex_figure_spec,
)
from polyrigid.sphpolygon import QuadCase, SphericalPolygonSpec, random_quadrilateral

from conftest import ALL_CANONICAL, lift

E = GeometryKind.EUCLIDEAN
TETRA_DIHEDRAL = np.arccos(1 / 3)
ICOSA_DIHEDRAL = np.arccos(-np.sqrt(5) / 3)


def _round_trip(graph, real):
    result = reconstruct(graph, measure(real, graph))
    verdict = congruent(result, real)
    assert verdict.congruent, verdict.describe()
    return result


@pytest.fixture(scope="module")
def twisted():
    return twisted_cube_pair()


# -- measurements ---------------------------------------------------------------

def test_measure_cube(cube):
    m = measure(cube[1], cube[0])
    assert len(m.edges) == 12
    np.testing.assert_allclose(list(m.lengths.values()), 1.0, atol=1e-12)
    np.testing.assert_allclose(list(m.angles.values()), np.pi / 2, atol=1e-12)
    assert m.singular_edges() == []


def test_measure_tetrahedron(tetrahedron):
    m = measure(tetrahedron[1], tetrahedron[0])
    np.testing.assert_allclose(list(m.lengths.values()), 1.0, atol=1e-12)
    np.testing.assert_allclose(list(m.angles.values()), TETRA_DIHEDRAL, atol=1e-12)


def test_measure_rejects_a_bent_face(cube):
    graph, real = cube
    coords = dict(real.coords)
    coords[0] = coords[0] + np.array([0.0, 0.0, 0.1])
    with pytest.raises(FaceNotPlanar):
        measure(Realization(E, coords), graph)


def test_measurements_must_match_the_graph(cube, tetrahedron):
    m = measure(tetrahedron[1], tetrahedron[0])
    with pytest.raises(StructuralError):
        m.require_graph(cube[0])


def test_measurements_reject_bad_values():
    with pytest.raises(StructuralError):
        Measurements(E, {(0, 1): -1.0}, {(0, 1): 1.0})
    with pytest.raises(StructuralError):
        Measurements(GeometryKind.SPHERICAL, {(0, 1): 3.5}, {(0, 1): 1.0})
    with pytest.raises(StructuralError):
        Measurements(E, {(0, 1): 1.0}, {(1, 2): 1.0})


def test_max_deviation(cube):
    m = measure(cube[1], cube[0])
    bumped = Measurements(E, {e: x + (0.01 if i == 0 else 0.0) for i, (e, x) in enumerate(m.lengths.items())}, m.angles)
    assert m.max_deviation(m) == 0.0
    assert m.max_deviation(bumped) == pytest.approx(0.01)


# -- vertex figures ---------------------------------------------------------------

def test_cube_corner_figure(cube):
    graph, real = cube
    spec = vertex_figure_spec(graph, measure(real, graph), 0)
    assert spec.n == 3
    np.testing.assert_allclose(spec.angles, np.pi / 2, atol=1e-12)
    # every side closes a diagonal of a square face
    assert spec.lengths == (None, None, None)
    figure = solve_vertex_figure(spec, 3)
    np.testing.assert_allclose(figure.lengths, np.pi / 2, atol=1e-12)


def test_tetrahedron_corner_figure(tetrahedron):
    graph, real = tetrahedron
    spec = vertex_figure_spec(graph, measure(real, graph), 0)
    np.testing.assert_allclose(spec.angles, TETRA_DIHEDRAL, atol=1e-12)
    np.testing.assert_allclose(spec.lengths, np.pi / 3, atol=1e-12)


def test_icosahedron_corner_figure(icosahedron):
    graph, real = icosahedron
    spec = vertex_figure_spec(graph, measure(real, graph), 0)
    assert spec.n == 5
    np.testing.assert_allclose(spec.angles, ICOSA_DIHEDRAL, atol=1e-12)
    np.testing.assert_allclose(spec.lengths, np.pi / 3, atol=1e-12)
    withheld = spec.with_lengths([*spec.lengths[:2], None, *spec.lengths[3:]])
    figure = solve_vertex_figure(withheld)
    np.testing.assert_allclose(figure.lengths, np.pi / 3, atol=1e-9)


def test_four_valent_figure_uses_the_quadrilateral_solver(rng):
    real, j = random_quadrilateral(rng, QuadCase.SPLIT)
    spec = real.spec([i == j for i in range(4)])
    figure = solve_vertex_figure(spec, 4)
    assert figure.case is QuadCase.SPLIT
    np.testing.assert_allclose(figure.lengths, real.lengths, atol=1e-8)


def test_place_cube_corner(cube):
    graph, real = cube
    figure = solve_vertex_figure(vertex_figure_spec(graph, measure(real, graph), 0), 3)
    center, points = place_neighborhood(E, figure, [1.0, 1.0, 1.0])
    np.testing.assert_allclose(center, 0.0)
    gram = np.array(points) @ np.array(points).T
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)


def test_place_tetrahedron_corner(tetrahedron):
    graph, real = tetrahedron
    figure = solve_vertex_figure(vertex_figure_spec(graph, measure(real, graph), 0), 3)
    _, points = place_neighborhood(E, figure, [1.0, 1.0, 1.0])
    for i in range(3):
        assert np.linalg.norm(points[i] - points[(i + 1) % 3]) == pytest.approx(1.0)


def test_place_spherical_corner(cube):
    graph, real = cube
    figure = solve_vertex_figure(vertex_figure_spec(graph, measure(real, graph), 0), 3)
    g = GeometryKind.SPHERICAL
    center, points = place_neighborhood(g, figure, [np.pi / 4] * 3)
    for p in points:
        assert np.linalg.norm(p) == pytest.approx(1.0)
        assert distance(g, center, p) == pytest.approx(np.pi / 4)
    # cos d = cos^2(pi/4) at a right corner
    for i in range(3):
        assert distance(g, points[i], points[(i + 1) % 3]) == pytest.approx(np.pi / 3)


# -- derived measurements -----------------------------------------------------------

def test_cube_corner_cut_is_measured_correctly(cube):
    graph, real = cube
    trace = reconstruct(graph, measure(real, graph), trace=True)
    assert isinstance(trace, ReconstructionTrace)
    first = trace.steps[0]
    step = first.step
    assert step.removed == 0
    (new_face,) = step.new_faces()
    for a, b in zip(new_face, (*new_face[1:], new_face[0])):
        assert first.derived.length(a, b) == pytest.approx(np.sqrt(2))
    # the truncated cube measured directly agrees with the derived data
    cut = Realization(E, {v: real.point(v) for v in step.reduced.vertices})
    assert measure(cut, step.reduced).max_deviation(first.derived) < 1e-9


def test_trace_follows_the_reduction_sequence(dodecahedron):
    graph, real = dodecahedron
    trace = reconstruct(graph, measure(real, graph), trace=True)
    assert [s.vertex for s in trace.steps] == [s.removed for s in reduction_sequence(graph)]
    assert congruent(trace.realization, real).congruent
    assert len(list(trace)) == len(trace.steps) + 1


def _check_flat_edge_principle(trace):
    for solved in trace.steps:
        triangles = {frozenset(t) for t in solved.step.new_faces()}
        reduced = solved.step.reduced
        for a, b in solved.flat_edges:
            sides = (reduced.face_left_of(a, b).vertices, reduced.face_left_of(b, a).vertices)
            assert any(len(f) == 3 and frozenset(f) in triangles for f in sides)


@pytest.mark.parametrize("name", ALL_CANONICAL)
def test_flat_edges_always_border_a_new_triangle(name):
    graph, real = canonical(name)
    _check_flat_edge_principle(reconstruct(graph, measure(real, graph), trace=True))


# -- round trips -------------------------------------------------------------------

@pytest.mark.parametrize("name", ALL_CANONICAL)
def test_canonical_round_trip(name):
    graph, real = canonical(name)
    result = _round_trip(graph, real)
    assert measure(result, graph).max_deviation(measure(real, graph)) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_random_convex_round_trip(seed):
    _round_trip(*random_convex(seed, 8 + 2 * seed))


@pytest.mark.parametrize("seed", range(3))
def test_random_dual_round_trip(seed):
    _round_trip(*random_convex(seed, 8 + seed, dual=True))


# -- strictly convex path -------------------------------------------------------------

@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("dual", [False, True])
def test_convex_mode_round_trip(seed, dual):
    graph, real = random_convex(seed, 8 + 2 * seed, dual=dual)
    result = reconstruct(graph, measure(real, graph), mode="convex")
    verdict = congruent(result, real)
    assert verdict.congruent, verdict.describe()


def test_convex_mode_reduces_at_rigid_vertices_and_stays_convex():
    graph, real = random_convex(1, 10, dual=True)
    trace = reconstruct(graph, measure(real, graph), trace=True, mode="convex")
    assert trace.steps
    for solved in trace.steps:
        assert is_rigid(solved.step.graph, solved.vertex)
        assert all(0.0 < x < np.pi for x in solved.derived.angles.values())
    # simple polytopes hide a length per corner face: the convex n-gon solver does the work
    assert any(len(s.spec.unknown_indices) >= 2 for s in trace)


def test_convex_mode_refuses_reflex_angles():
    graph, real = dented(0)
    with pytest.raises(ConditionViolation):
        reconstruct(graph, measure(real, graph), mode="convex")


def test_convex_mode_stops_at_a_coplanar_link(octahedron):
    # the four neighbors of any octahedron vertex span a square
    graph, real = octahedron
    with pytest.raises(Unrealizable) as info:
        reconstruct(graph, measure(real, graph), mode="convex")
    assert info.value.obstruction == "coplanar-link"


def test_convex_mode_tetrahedron_is_terminal(tetrahedron):
    graph, real = tetrahedron
    trace = reconstruct(graph, measure(real, graph), trace=True, mode="convex")
    assert trace.steps == ()
    assert congruent(trace.realization, real).congruent


def test_unknown_reconstruction_mode(cube):
    graph, real = cube
    with pytest.raises(ValueError):
        reconstruct(graph, measure(real, graph), mode="weakly-convex")


def test_convex_figure_solver_refuses_reflex_angles():
    spec = SphericalPolygonSpec((4.0, 1.0, 1.0, 1.0), (0.5, None, None, None))
    with pytest.raises(Unrealizable):
        solve_vertex_figure(spec, convex=True)


@pytest.mark.parametrize("seed", range(3))
def test_dented_round_trip(seed):
    graph, real = dented(seed)
    m = measure(real, graph)
    assert any(x > np.pi for x in m.angles.values())
    _round_trip(graph, real)


def test_dented_octahedron_round_trip():
    _round_trip(*dented(4, "octahedron", 0.3))


@pytest.mark.parametrize("g", [GeometryKind.SPHERICAL, GeometryKind.HYPERBOLIC])
@pytest.mark.parametrize("name", ["cube", "octahedron", "icosahedron"])
def test_non_euclidean_round_trip(name, g):
    graph, real = canonical(name)
    _round_trip(graph, lift(real, g, 0.4))


@pytest.mark.slow
def test_random_convex_sweep():
    for seed in range(200):
        graph, real = random_convex(seed, 8 + seed % 33, dual=seed % 4 == 3)
        trace = reconstruct(graph, measure(real, graph), trace=True)
        _check_flat_edge_principle(trace)
        assert congruent(trace.realization, real).residual < 1e-6


@pytest.mark.slow
def test_dented_sweep():
    for seed in range(100):
        graph, real = dented(seed, "icosahedron" if seed % 3 else "octahedron")
        trace = reconstruct(graph, measure(real, graph), trace=True)
        _check_flat_edge_principle(trace)
        assert congruent(trace.realization, real).residual < 1e-6


# -- failure paths --------------------------------------------------------------------

def test_twisted_cube_is_obstructed(twisted):
    graph, first, _ = twisted
    with pytest.raises(PartiallyFlatObstruction):
        reconstruct(graph, measure(first, graph))


def test_perturbed_length_is_unrealizable_or_different(cube):
    graph, real = cube
    m = measure(real, graph)
    target = edge_key(*graph.edges[0])
    lengths = {e: x * (1.1 if e == target else 1.0) for e, x in m.lengths.items()}
    try:
        result = reconstruct(graph, Measurements(E, lengths, m.angles))
    except PolyrigidError:
        return
    assert not congruent(result, real).congruent


# -- conditions ---------------------------------------------------------------------

def test_cube_passes_the_conditions(cube):
    report = check_conditions(cube[1], cube[0])
    assert report.passes
    assert report.theorem_seven_coplanar_applies
    assert report.weakly_convex
    assert not report.reflex_edges
    assert require_conditions(cube[1], cube[0]) == report


def test_dented_icosahedron_is_not_weakly_convex():
    graph, real = dented(0)
    report = check_conditions(real, graph)
    assert report.passes
    assert report.reflex_edges
    assert not report.weakly_convex


def test_twisted_cube_fails_the_conditions(twisted):
    graph, first, _ = twisted
    report = check_conditions(first, graph)
    assert report.flat_edges
    assert report.partially_flat_vertices
    assert not report.passes
    assert not report.theorem_seven_coplanar_applies
    with pytest.raises(PartiallyFlatObstruction):
        require_conditions(first, graph)


def _prism_with_split_edge():
    points = np.array([
        [0, 0, 0], [1, 0, 0], [0.5, 0.8, 0],
        [0, 0, 1], [1, 0, 1], [0.5, 0.8, 1],
        [0, 0, 0.5],
    ], dtype=float)
    faces = [(0, 1, 2), (3, 4, 5), (0, 1, 4, 3, 6), (1, 2, 5, 4), (2, 0, 6, 3, 5)]
    graph = graph_from_faces(oriented_faces(points, faces))
    return graph, Realization.from_array(E, points)


def test_collinear_triple_is_reported():
    graph, real = _prism_with_split_edge()
    report = check_conditions(real, graph)
    assert (0, 3, 6) in report.collinear_triples
    assert report.convex_faces
    assert not report.passes
    with pytest.raises(CollinearViolation):
        require_conditions(real, graph)


def test_seven_coplanar_vertices_are_found():
    graph, real = canonical("prism(7)")
    report = check_conditions(real, graph)
    assert report.seven_coplanar
    assert len(report.coplanar_witness) == 7
    assert report.passes
    assert not report.theorem_seven_coplanar_applies
