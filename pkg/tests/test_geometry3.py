# tests/test_geometry3.py
from __future__ import annotations

import numpy as np
import pytest

from polyrigid.errors import CollinearViolation, FaceNotPlanar, StructuralError, Unrealizable
from polyrigid.geometry3 import (
    GeometryKind,
    Realization,
    align,
    basepoint,
    check_planar,
    congruent,
    dihedral_angle,
    distance,
    exp_map,
    facial_angles_from_sides,
    normalize_pose,
    project_to_model,
    tangent_project,
)
from polyrigid.sphpolygon import random_rotation

from conftest import lift

E, S, H = GeometryKind.EUCLIDEAN, GeometryKind.SPHERICAL, GeometryKind.HYPERBOLIC


def _random_point(rng: np.random.Generator, g: GeometryKind) -> np.ndarray:
    if g is E:
        return rng.normal(size=3)
    if g is S:
        return project_to_model(g, rng.normal(size=4))
    return project_to_model(g, np.concatenate([[0.0], rng.normal(size=3)]))


def _random_direction(rng: np.random.Generator, g: GeometryKind, p: np.ndarray) -> np.ndarray:
    return tangent_project(g, p, rng.normal(size=g.dim))


def _lorentz(rapidity: float, rotation: np.ndarray) -> np.ndarray:
    boost = np.eye(4)
    boost[:2, :2] = [[np.cosh(rapidity), np.sinh(rapidity)], [np.sinh(rapidity), np.cosh(rapidity)]]
    turn = np.eye(4)
    turn[1:, 1:] = rotation
    return boost @ turn


def _orthogonal4(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(4, 4)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# -- distances and the exponential map ------------------------------------

def test_distance_basics():
    assert distance(E, np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(1.0)
    assert distance(S, np.array([0, 0, 0, 1.0]), np.array([1.0, 0, 0, 0])) == pytest.approx(np.pi / 2)
    p = basepoint(H)
    q = np.array([np.cosh(2.0), np.sinh(2.0), 0, 0])
    assert distance(H, p, q) == pytest.approx(2.0)


def test_exp_from_the_pole_reaches_the_equator():
    north = np.array([0, 0, 0, 1.0])
    q = exp_map(S, north, np.array([1.0, 0, 0, 0]), np.pi / 2)
    np.testing.assert_allclose(q, [1, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("g", list(GeometryKind))
def test_exp_and_distance_agree(rng, g):
    for _ in range(200):
        p = _random_point(rng, g)
        d = _random_direction(rng, g, p)
        t = rng.uniform(0.1, 3.0)
        q = exp_map(g, p, d, t)
        assert distance(g, p, q) == pytest.approx(t, abs=1e-9)
        assert distance(g, q, p) == pytest.approx(t, abs=1e-9)


def test_exp_rejects_non_positive_length():
    with pytest.raises(ValueError):
        exp_map(E, np.zeros(3), np.array([1.0, 0, 0]), 0.0)


# -- facial angles ----------------------------------------------------------

def test_equilateral_facial_angles():
    assert facial_angles_from_sides(E, 1, 1, 1) == pytest.approx((np.pi / 3,) * 3)
    assert facial_angles_from_sides(S, np.pi / 2, np.pi / 2, np.pi / 2) == pytest.approx((np.pi / 2,) * 3)
    expected = np.arccos((np.cosh(1) ** 2 - np.cosh(1)) / np.sinh(1) ** 2)
    angles = facial_angles_from_sides(H, 1, 1, 1)
    assert angles == pytest.approx((expected,) * 3)
    assert angles[0] < np.pi / 3


def test_degenerate_sides():
    with pytest.raises(CollinearViolation):
        facial_angles_from_sides(E, 1, 1, 2)
    with pytest.raises(Unrealizable):
        facial_angles_from_sides(E, 1, 1, 3)
    with pytest.raises(Unrealizable):
        facial_angles_from_sides(S, 1, 1, np.pi)


@pytest.mark.parametrize("g", list(GeometryKind))
def test_angle_sum_follows_curvature(rng, g):
    for _ in range(100):
        a, b, c = (_random_point(rng, g) for _ in range(3))
        if g is S:
            # keep the triangle small enough that every side is below pi
            a, b, c = (project_to_model(g, basepoint(g) + 0.4 * x) for x in (a, b, c))
        sides = distance(g, b, c), distance(g, a, c), distance(g, a, b)
        try:
            total = sum(facial_angles_from_sides(g, *sides))
        except CollinearViolation:
            continue
        if g is E:
            assert total == pytest.approx(np.pi)
        elif g is S:
            assert total > np.pi
        else:
            assert total < np.pi


# -- dihedral angles ---------------------------------------------------------

def _dihedrals(graph, real, at_second=False):
    out = []
    for a, b in graph.edges:
        left = graph.face_left_of(a, b).vertices
        right = graph.face_left_of(b, a).vertices
        out.append(dihedral_angle(real, (a, b), left, right, at=b if at_second else None))
    return np.array(out)


def test_cube_dihedrals(cube):
    np.testing.assert_allclose(_dihedrals(*cube), np.pi / 2, atol=1e-12)


def test_tetrahedron_dihedrals(tetrahedron):
    np.testing.assert_allclose(_dihedrals(*tetrahedron), np.arccos(1 / 3), atol=1e-12)


@pytest.mark.parametrize("g", [S, H])
def test_dihedral_does_not_depend_on_the_endpoint(icosahedron, g):
    graph, real = icosahedron
    lifted = lift(real, g, 0.4)
    np.testing.assert_allclose(_dihedrals(graph, lifted), _dihedrals(graph, lifted, True), atol=1e-9)


def test_non_planar_face_is_reported():
    quad = [np.array(p, dtype=float) for p in ([0, 0, 0], [1, 0, 0], [1, 1, 0.2], [0, 1, 0])]
    with pytest.raises(FaceNotPlanar) as info:
        check_planar(E, quad, face=(0, 1, 2, 3))
    assert info.value.face == (0, 1, 2, 3)


# -- realizations -------------------------------------------------------------

def test_coincident_vertices_are_rejected():
    with pytest.raises(StructuralError):
        Realization.from_array(E, [[0, 0, 0], [1, 0, 0], [0, 0, 0]])


def test_antipodal_vertices_are_rejected():
    with pytest.raises(StructuralError):
        Realization.from_array(S, [[1, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 0, 0]])


def test_off_model_points_are_rejected():
    with pytest.raises(StructuralError):
        Realization.from_array(H, [[1, 0, 0, 0], [2, 0, 0, 0], [1, 1, 0, 0]])


def test_normalize_pose_moves_first_vertex_to_basepoint(cube):
    real = normalize_pose(cube[1])
    np.testing.assert_allclose(real.point(0), basepoint(E), atol=1e-12)


# -- alignment and congruence ---------------------------------------------------

def test_align_identity(cube):
    pts = cube[1].array()
    result = align(E, pts, pts)
    assert result.residual < 1e-12
    assert not result.reflected


def test_align_recovers_a_rigid_motion(rng, cube):
    pts = cube[1].array()
    moved = pts @ random_rotation(rng).T + np.array([0.3, -2.0, 5.0])
    result = align(E, pts, moved)
    assert result.residual < 1e-12
    assert not result.reflected
    images = np.array([result.isometry.apply(p) for p in pts])
    np.testing.assert_allclose(images, moved, atol=1e-12)


def test_mirrored_tetrahedron_needs_a_reflection(tetrahedron):
    pts = tetrahedron[1].array()
    mirrored = pts * np.array([-1.0, 1.0, 1.0])
    assert align(E, pts, mirrored, allow_reflection=False).residual > 0.1
    best = align(E, pts, mirrored)
    assert best.residual < 1e-12
    assert best.reflected


def test_collinear_alignment_is_refused():
    line = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    with pytest.raises(CollinearViolation):
        align(E, line, line)


def test_spherical_alignment(rng, cube):
    lifted = lift(cube[1], S)
    pts = lifted.array()
    moved = pts @ _orthogonal4(rng).T
    result = align(S, pts, moved)
    assert result.residual < 1e-10
    assert not result.reflected


def test_hyperbolic_alignment(rng, cube):
    lifted = lift(cube[1], H)
    pts = lifted.array()
    moved = pts @ _lorentz(0.7, random_rotation(rng)).T
    result = align(H, pts, moved)
    assert result.residual < 1e-10
    assert not result.reflected
    before = [distance(H, pts[0], q) for q in pts[1:]]
    after = [distance(H, moved[0], q) for q in moved[1:]]
    np.testing.assert_allclose(before, after, atol=1e-10)


@pytest.mark.parametrize("g", [S, H])
def test_alignment_spreads_noise_over_every_point(rng, cube, g):
    pts = lift(cube[1], g).array()
    transform = _orthogonal4(rng) if g is S else _lorentz(0.0, random_rotation(rng))
    moved = pts @ transform.T
    noise = 1e-3
    moved[0] = exp_map(g, moved[0], _random_direction(rng, g, moved[0]), noise)
    result = align(g, pts, moved)
    assert not result.reflected
    squared = sum(distance(g, result.isometry.apply(p), q) ** 2 for p, q in zip(pts, moved))
    # pinning the frame to the noisy point would shift all eight vertices by about the noise
    assert squared < 1.5 * noise**2
    assert result.residual < noise


def test_translated_cube_is_congruent(cube):
    real = cube[1]
    moved = Realization.from_array(E, real.array() + np.array([1.0, 2.0, 3.0]))
    result = congruent(real, moved)
    assert result.congruent
    assert result.describe() == "congruent (direct)"


def test_mirrored_cube_is_congruent_by_reflection(cube):
    real = cube[1]
    mirrored = Realization.from_array(E, real.array() * np.array([1.0, 1.0, -1.0]))
    result = congruent(real, mirrored)
    assert result.congruent
    assert result.describe() == "congruent (reflected)"


def test_scaled_cube_is_not_congruent(cube):
    real = cube[1]
    scaled = Realization.from_array(E, 1.1 * real.array())
    result = congruent(real, scaled)
    assert not result.congruent
    assert result.witness is not None
    assert result.describe().startswith("not congruent")


def test_congruence_needs_matching_vertex_sets(cube, tetrahedron):
    with pytest.raises(ValueError):
        congruent(cube[1], tetrahedron[1])
