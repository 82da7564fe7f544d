# tests/conftest.py
from __future__ import annotations

import numpy as np
import pytest

from polyrigid.fixtures import CANONICAL_NAMES, canonical
from polyrigid.geometry3 import GeometryKind, Realization

ALL_CANONICAL = (*CANONICAL_NAMES, "prism(5)", "antiprism(4)")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240613)


@pytest.fixture(scope="session")
def cube():
    return canonical("cube")


@pytest.fixture(scope="session")
def tetrahedron():
    return canonical("tetrahedron")


@pytest.fixture(scope="session")
def icosahedron():
    return canonical("icosahedron")


@pytest.fixture(scope="session")
def octahedron():
    return canonical("octahedron")


@pytest.fixture(scope="session")
def dodecahedron():
    return canonical("dodecahedron")



def lift(real: Realization, geometry: GeometryKind, scale: float = 0.5) -> Realization:
    """Central projection of a Euclidean realization into S^3 or H^3; faces stay planar."""
    out = {}
    for v, p in real.coords.items():
        x = scale * np.asarray(p)
        if geometry is GeometryKind.SPHERICAL:
            q = np.concatenate([[1.0], x])
            out[v] = q / np.linalg.norm(q)
        else:
            out[v] = np.concatenate([[1.0], x]) / np.sqrt(1.0 - np.dot(x, x))
    return Realization(geometry, out)
