# src/polyrigid/errors.py
"""
Exception hierarchy.

Every error carries a stable ``exit_code`` so the CLI can map failures
without inspecting messages. Structured context (vertex, face, witness, ...)
is kept as attributes.
"""
from __future__ import annotations

from typing import Any


class PolyrigidError(Exception):
    """Base class for every error raised by polyrigid."""

    exit_code: int = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context: dict[str, Any] = context

    def __getattr__(self, name: str) -> Any:
        context = self.__dict__.get("context", {})
        if name in context:
            return context[name]
        raise AttributeError(name)


# ----------------------------------------------------------------------
# Combinatorial layer
# ----------------------------------------------------------------------

class StructuralError(PolyrigidError, ValueError):
    """Malformed input: neighbor id out of range, unknown vertex, bad JSON shape."""

    exit_code = 2


class DegenerateTriangulation(PolyrigidError):
    """A local-triangulation diagonal would duplicate an existing edge."""


class ReductionInvalid(PolyrigidError):
    """A vertex reduction produced a graph that is not polyhedral."""


class InternalContradiction(PolyrigidError, RuntimeError):
    """Something the theory rules out happened; always a bug."""

    exit_code = 70


# ----------------------------------------------------------------------
# Trigonometry / polygons
# ----------------------------------------------------------------------

class Unrealizable(PolyrigidError):
    """The data admits no realization (cosine out of range, closure fails, ...)."""

    exit_code = 4


class SingularCase(PolyrigidError):
    """A generic solver met a singular value; route to classify_singular."""

    exit_code = 4


class RejectedTuple(PolyrigidError):
    """A triangle tuple fails the generalized trigonometry residual check."""

    exit_code = 4


class Degenerate(PolyrigidError):
    """A polygon has repeated vertices."""

    exit_code = 4


# ----------------------------------------------------------------------
# Rigidity conditions
# ----------------------------------------------------------------------

class ConditionViolation(PolyrigidError):
    """The input breaks one of the hypotheses the uniqueness result needs."""

    exit_code = 3


class CollinearViolation(ConditionViolation):
    """Three vertices lie on one geodesic."""


class PartiallyFlatObstruction(ConditionViolation):
    """
    Flat edges alternate around a 4-valent vertex, or singular dihedral
    angles reach the solver.
    """


class FaceNotPlanar(PolyrigidError):
    """Face vertices do not lie on one totally geodesic plane."""

    exit_code = 2


# ----------------------------------------------------------------------
# Fixtures
# ----------------------------------------------------------------------

class FixtureError(PolyrigidError, ValueError):
    """Unknown fixture, rejected parameters, or exhausted rejection budget."""

    exit_code = 2
