# tests/test_fixtures.py
from __future__ import annotations

import numpy as np
import pytest

from polyrigid.errors import FixtureError
from polyrigid.fixtures import (
    FixtureRecipe,
    canonical,
    dented,
    export_bundle,
    quad_counterexample,
    random_convex,
    twisted_cube_pair,
)
from polyrigid.geometry3 import congruent
from polyrigid.graphcore import validate
from polyrigid.reconstruct import check_conditions, measure
from polyrigid.serialize import bundle_from_json, read_json, realization_from_json


@pytest.mark.parametrize(
    ("name", "counts"),
    [
        ("tetrahedron", (4, 6, 4)),
        ("cube", (8, 12, 6)),
        ("octahedron", (6, 12, 8)),
        ("dodecahedron", (20, 30, 12)),
        ("icosahedron", (12, 30, 20)),
        ("prism(5)", (10, 15, 7)),
        ("antiprism(4)", (8, 16, 10)),
    ],
)
def test_canonical_counts(name, counts):
    graph, real = canonical(name)
    assert (graph.vertex_count, len(graph.edges), len(graph.faces)) == counts
    assert len(real.vertices) == counts[0]
    assert validate(graph).valid


def test_platonic_edges_have_unit_length():
    for name in ("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron"):
        graph, real = canonical(name)
        m = measure(real, graph)
        np.testing.assert_allclose(list(m.lengths.values()), 1.0, atol=1e-12)


def test_unknown_solid():
    with pytest.raises(FixtureError) as info:
        canonical("rhombicuboctahedron")
    assert info.value.exit_code == 2


def test_prism_needs_three_sides():
    with pytest.raises(FixtureError):
        canonical("prism(2)")


# -- random convex ---------------------------------------------------------

def test_random_convex_meets_the_hypotheses():
    graph, real = random_convex(1, 8)
    assert graph.vertex_count == 8
    assert validate(graph).valid
    report = check_conditions(real, graph)
    assert report.theorem_main_applies
    assert not report.flat_edges


def test_random_convex_is_deterministic():
    _, first = random_convex(3, 10)
    _, second = random_convex(3, 10)
    np.testing.assert_array_equal(first.array(), second.array())


def test_random_convex_needs_four_points():
    with pytest.raises(FixtureError):
        random_convex(0, 3)


def test_dual_random_convex_is_simple():
    graph, _ = random_convex(2, 8, dual=True)
    assert len(graph.faces) == 8
    assert all(graph.degree(v) == 3 for v in graph.vertices)


# -- dented ------------------------------------------------------------------

def test_dented_icosahedron_has_reflex_edges():
    graph, real = dented(0)
    report = check_conditions(real, graph)
    assert report.reflex_edges
    assert not report.weakly_convex
    assert report.theorem_main_applies


@pytest.mark.parametrize("factor", [0.0, 0.5, -0.1])
def test_dent_factor_range(factor):
    with pytest.raises(FixtureError):
        dented(0, factor=factor)


def test_dent_needs_a_triangulated_base():
    with pytest.raises(FixtureError):
        dented(0, base="cube")


# -- twisted cubes --------------------------------------------------------------

def test_twisted_pair_shares_every_measurement():
    graph, first, second = twisted_cube_pair()
    assert measure(first, graph).max_deviation(measure(second, graph)) < 1e-9
    result = congruent(first, second)
    assert not result.congruent
    assert result.residual > 1e-2


def test_identical_twists_are_congruent():
    choices = (True, False, True, False, True, False)
    _, first, second = twisted_cube_pair(choices, choices)
    assert congruent(first, second).congruent


def test_twists_related_by_a_rotation_are_refused():
    # a half turn about z swaps the +x and -x faces
    with pytest.raises(FixtureError):
        twisted_cube_pair((False,) + (True,) * 5, (True, False) + (True,) * 4)


def test_twists_related_by_a_mirror_are_refused():
    with pytest.raises(FixtureError):
        twisted_cube_pair((True,) * 6, (False,) * 6)


def test_twist_choices_need_six_entries():
    with pytest.raises(FixtureError):
        twisted_cube_pair((True,) * 5, (False,) * 5)


# -- spherical counterexample -------------------------------------------------------

@pytest.mark.parametrize(("theta", "phi"), [(0.0, 0.1), (0.1, 0.3), (-0.1, 0.1)])
def test_quad_counterexample_parameter_range(theta, phi):
    with pytest.raises(FixtureError):
        quad_counterexample(theta, phi)


# -- recipes and export -------------------------------------------------------------

def test_recipe_dispatch():
    graph, _ = FixtureRecipe("cube").build()
    assert graph.vertex_count == 8
    graph, _ = FixtureRecipe("random_convex", 4, {"n": 9}).build()
    assert graph.vertex_count == 9
    graph, first = FixtureRecipe("twisted_cube").build()
    _, second = FixtureRecipe("twisted_cube", params={"which": 1}).build()
    assert not congruent(first, second).congruent


def test_recipe_build_is_repeatable():
    recipe = FixtureRecipe("dented", 1, {"factor": 0.25})
    np.testing.assert_array_equal(recipe.build()[1].array(), recipe.build()[1].array())


def test_export_bundle(tmp_path):
    bundle_path, real_path = export_bundle(FixtureRecipe("prism(6)", 3), tmp_path / "out")
    assert bundle_path.name == "prism_6_-3.bundle.json"
    assert real_path.name == "prism_6_-3.realization.json"

    graph, m = bundle_from_json(read_json(bundle_path))
    real, embedded = realization_from_json(read_json(real_path))
    assert embedded is not None
    assert dict(embedded.rotation) == dict(graph.rotation)
    assert measure(real, graph).max_deviation(m) < 1e-12
