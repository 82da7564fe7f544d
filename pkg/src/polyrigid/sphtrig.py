# src/polyrigid/sphtrig.py
"""
Generalized spherical trigonometry on the unit 2-sphere.

Triangles may have edge lengths in (0, 2pi) and interior angles in [0, 2pi],
so they can be nonconvex or self-intersecting. The sine, cosine and dual
cosine rules still hold for every such triangle; the congruence solvers
below therefore return two tuples each, related by a fixed involution.

Also home of the low-level arc primitives shared with sphpolygon:
great-circle normals, tangents, turning angles.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from itertools import permutations

import numpy as np

from .config import ARCCOS_SLACK, RESIDUAL_TOL, SINGULAR_BAND
from .errors import RejectedTuple, SingularCase, Unrealizable

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


# ----------------------------------------------------------------------
# Scalar helpers
# ----------------------------------------------------------------------

def wrap(x: float) -> float:
    """Angle in [0, 2pi)."""
    y = float(np.mod(x, TWO_PI))
    return 0.0 if y >= TWO_PI else y


def angle_gap(x: float, y: float) -> float:
    """Distance between two angles on the circle."""
    d = abs(wrap(x) - wrap(y))
    return min(d, TWO_PI - d)


def is_singular_angle(x: float, band: float = SINGULAR_BAND) -> bool:
    """True within ``band`` of 0, pi or 2pi."""
    return min(abs(x), abs(x - np.pi), abs(x - TWO_PI)) < band


def checked_cos(value: float, what: str) -> float:
    """Clamp a cosine to [-1, 1], refusing values that are out of range beyond rounding."""
    if not np.isfinite(value) or abs(value) > 1.0 + ARCCOS_SLACK:
        raise Unrealizable(f"cos({what}) = {value!r} is outside [-1, 1]", quantity=what)
    return float(np.clip(value, -1.0, 1.0))


def _check_length(x: float, name: str) -> None:
    if not 0.0 < x < TWO_PI:
        raise Unrealizable(f"length {name} = {x!r} must lie in (0, 2pi)", quantity=name)
    if x < SINGULAR_BAND or TWO_PI - x < SINGULAR_BAND or abs(x - np.pi) < SINGULAR_BAND:
        raise SingularCase(f"length {name} = {x!r} is singular", quantity=name)


def _check_angle(x: float, name: str) -> None:
    if not -SINGULAR_BAND <= x <= TWO_PI + SINGULAR_BAND:
        raise Unrealizable(f"angle {name} = {x!r} must lie in [0, 2pi]", quantity=name)
    if is_singular_angle(x):
        raise SingularCase(f"angle {name} = {x!r} is singular", quantity=name)


def _from_sin_cos(s: float, c: float, what: str) -> float:
    x = wrap(np.arctan2(s, c))
    if is_singular_angle(x):
        raise SingularCase(f"derived {what} = {x!r} is singular", quantity=what)
    return x


# ----------------------------------------------------------------------
# Arc primitives on S^2
# ----------------------------------------------------------------------

def unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise Unrealizable("cannot normalize a zero vector")
    return v / norm


def rotate_about(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotate ``v`` counterclockwise about the unit ``axis`` (Rodrigues)."""
    c, s = np.cos(angle), np.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1.0 - c)


def arc_normal(p: np.ndarray, q: np.ndarray, long_arc: bool = False) -> np.ndarray:
    """Normal of the great circle carrying the arc p->q, oriented so the arc runs counterclockwise."""
    n = unit(np.cross(p, q))
    return -n if long_arc else n


def arc_length(p: np.ndarray, q: np.ndarray, normal: np.ndarray) -> float:
    """Length of the arc from p counterclockwise about ``normal`` to q, in (0, 2pi)."""
    return wrap(np.arctan2(np.dot(np.cross(p, q), normal), np.dot(p, q)))


def turning_angle(t_in: np.ndarray, t_out: np.ndarray, v: np.ndarray) -> float:
    """Signed left turn from t_in to t_out at v, in (-pi, pi]."""
    return float(np.arctan2(np.dot(np.cross(t_in, t_out), v), np.dot(t_in, t_out)))


def interior_angle(v: np.ndarray, n_in: np.ndarray, n_out: np.ndarray) -> float:
    """Interior angle at v between incoming and outgoing arcs, interior on the left."""
    t_in = np.cross(n_in, v)
    t_out = np.cross(n_out, v)
    return wrap(np.pi - turning_angle(t_in, t_out, v))


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

class TriangleClass(Enum):
    """Which edges exceed pi."""

    SHORT_SHORT_SHORT = "short,short,short"
    LONG_SHORT_SHORT = "long,short,short"
    LONG_LONG_SHORT = "long,long,short"
    LONG_LONG_LONG = "long,long,long"


class SingularPattern(Enum):
    ALL_PI = "(pi,pi,pi)"
    ZERO_ZERO_PI = "(0,0,pi)"
    TWO_PI_TWO_PI_PI = "(2pi,2pi,pi)"
    LUNE = "(theta,theta,pi)"


@dataclass(frozen=True)
class SphericalTriangleTuple:
    """(a, b, c; A, B, C) with side a opposite angle A, etc."""

    a: float
    b: float
    c: float
    A: float
    B: float
    C: float

    @property
    def sides(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    @property
    def angles(self) -> tuple[float, float, float]:
        return (self.A, self.B, self.C)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.A, self.B, self.C)

    @classmethod
    def from_values(cls, sides, angles) -> SphericalTriangleTuple:
        a, b, c = (float(x) for x in sides)
        A, B, C = (float(wrap(x)) for x in angles)
        return cls(a, b, c, A, B, C)

    def max_gap(self, other: SphericalTriangleTuple) -> float:
        """Largest entrywise circular distance to ``other``."""
        return max(angle_gap(x, y) for x, y in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class SingularClass:
    """Result of :func:`classify_singular`."""

    pattern: SingularPattern
    singular_vertex: str
    angles: tuple[float | None, float | None, float | None]
    theta: float | None = None


@dataclass(frozen=True, eq=False)
class PlacedTriangle:
    """Coordinates of a triangle A, B, C on S^2 plus the normals of arcs AB, BC, CA."""

    points: np.ndarray
    normals: np.ndarray

    def arc_midpoint(self, i: int) -> np.ndarray:
        p, q, n = self.points[i], self.points[(i + 1) % 3], self.normals[i]
        return rotate_about(p, n, arc_length(p, q, n) / 2.0)


# ----------------------------------------------------------------------
# Residuals and classification
# ----------------------------------------------------------------------

def trig_residuals(t: SphericalTriangleTuple) -> np.ndarray:
    """Three sine-rule, three cosine-rule and three dual-cosine-rule residuals."""
    s = np.sin(t.sides)
    c = np.cos(t.sides)
    S = np.sin(t.angles)
    C = np.cos(t.angles)
    out = np.empty(9)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out[i] = s[i] * S[j] - S[i] * s[j]
        out[3 + i] = c[i] - (c[j] * c[k] + s[j] * s[k] * C[i])
        out[6 + i] = C[i] - (-C[j] * C[k] + S[j] * S[k] * c[i])
    return out


def max_residual(t: SphericalTriangleTuple) -> float:
    return float(np.max(np.abs(trig_residuals(t))))


def classify_triangle(t: SphericalTriangleTuple) -> TriangleClass:
    long_count = sum(1 for x in t.sides if x > np.pi)
    return list(TriangleClass)[long_count]


def class_change(t: SphericalTriangleTuple, kind: TriangleClass, index: int = 0) -> SphericalTriangleTuple:
    """
    Apply one of the substitutions relating the four triangle classes.

    ``index`` picks the distinguished side: the long one for LONG_SHORT_SHORT,
    the short one for LONG_LONG_SHORT. SHORT_SHORT_SHORT is the identity.
    """
    sides = list(t.sides)
    angles = list(t.angles)
    others = [j for j in range(3) if j != index]
    if kind is TriangleClass.SHORT_SHORT_SHORT:
        return t
    if kind is TriangleClass.LONG_LONG_LONG:
        sides = [TWO_PI - x for x in sides]
        angles = [TWO_PI - x for x in angles]
    else:
        angles[index] = TWO_PI - angles[index]
        for j in others:
            angles[j] = np.pi - angles[j]
        if kind is TriangleClass.LONG_SHORT_SHORT:
            sides[index] = TWO_PI - sides[index]
        else:
            for j in others:
                sides[j] = TWO_PI - sides[j]
    return SphericalTriangleTuple.from_values(sides, angles)


def _verified(t: SphericalTriangleTuple, mode: str) -> SphericalTriangleTuple:
    r = max_residual(t)
    if r > RESIDUAL_TOL:
        raise Unrealizable(f"{mode} solution fails trigonometry check (residual {r:.3e})", residual=r)
    return t


# ----------------------------------------------------------------------
# Congruence solvers: each returns exactly two tuples
# ----------------------------------------------------------------------

def solve_sss(a: float, b: float, c: float) -> tuple[SphericalTriangleTuple, SphericalTriangleTuple]:
    """Second solution replaces every angle by 2pi - angle."""
    for x, name in ((a, "a"), (b, "b"), (c, "c")):
        _check_length(x, name)
    sa, sb, sc = np.sin([a, b, c])
    ca, cb, cc = np.cos([a, b, c])
    cos_A = checked_cos((ca - cb * cc) / (sb * sc), "A")
    sin_A_abs = np.sqrt(1.0 - cos_A * cos_A)
    cos_B = checked_cos((cb - ca * cc) / (sa * sc), "B")
    cos_C = checked_cos((cc - ca * cb) / (sa * sb), "C")
    out = []
    for sign in (1.0, -1.0):
        sin_A = sign * sin_A_abs
        A = _from_sin_cos(sin_A, cos_A, "A")
        B = _from_sin_cos(sin_A * sb / sa, cos_B, "B")
        C = _from_sin_cos(sin_A * sc / sa, cos_C, "C")
        out.append(_verified(SphericalTriangleTuple(a, b, c, A, B, C), "SSS"))
    return out[0], out[1]


def solve_aaa(A: float, B: float, C: float) -> tuple[SphericalTriangleTuple, SphericalTriangleTuple]:
    """Second solution replaces every side by 2pi - side."""
    for x, name in ((A, "A"), (B, "B"), (C, "C")):
        _check_angle(x, name)
    SA, SB, SC = np.sin([A, B, C])
    CA, CB, CC = np.cos([A, B, C])
    cos_a = checked_cos((CA + CB * CC) / (SB * SC), "a")
    sin_a_abs = np.sqrt(1.0 - cos_a * cos_a)
    cos_b = checked_cos((CB + CA * CC) / (SA * SC), "b")
    cos_c = checked_cos((CC + CA * CB) / (SA * SB), "c")
    out = []
    for sign in (1.0, -1.0):
        sin_a = sign * sin_a_abs
        a = _from_sin_cos(sin_a, cos_a, "a")
        b = _from_sin_cos(sin_a * SB / SA, cos_b, "b")
        c = _from_sin_cos(sin_a * SC / SA, cos_c, "c")
        out.append(_verified(SphericalTriangleTuple(a, b, c, wrap(A), wrap(B), wrap(C)), "AAA"))
    return out[0], out[1]


def solve_sas(b: float, A: float, c: float) -> tuple[SphericalTriangleTuple, SphericalTriangleTuple]:
    """Second solution is (2pi - a, b, c; A, B + pi, C + pi)."""
    _check_length(b, "b")
    _check_length(c, "c")
    _check_angle(A, "A")
    sb, sc, SA = np.sin(b), np.sin(c), np.sin(A)
    cb, cc, CA = np.cos(b), np.cos(c), np.cos(A)
    cos_a = checked_cos(cb * cc + sb * sc * CA, "a")
    sin_a_abs = np.sqrt(1.0 - cos_a * cos_a)
    out = []
    for sign in (1.0, -1.0):
        sin_a = sign * sin_a_abs
        a = _from_sin_cos(sin_a, cos_a, "a")
        if sin_a_abs < SINGULAR_BAND:
            raise SingularCase("derived side a is singular", quantity="a")
        B = _from_sin_cos(SA * sb / sin_a, (cb - cos_a * cc) / (sin_a * sc), "B")
        C = _from_sin_cos(SA * sc / sin_a, (cc - cos_a * cb) / (sin_a * sb), "C")
        out.append(_verified(SphericalTriangleTuple(a, b, c, wrap(A), B, C), "SAS"))
    return out[0], out[1]


def solve_asa(A: float, c: float, B: float) -> tuple[SphericalTriangleTuple, SphericalTriangleTuple]:
    """Second solution is (a + pi, b + pi, c; A, B, 2pi - C)."""
    _check_angle(A, "A")
    _check_angle(B, "B")
    _check_length(c, "c")
    SA, SB, sc = np.sin(A), np.sin(B), np.sin(c)
    CA, CB, cc = np.cos(A), np.cos(B), np.cos(c)
    cos_C = checked_cos(-CA * CB + SA * SB * cc, "C")
    sin_C_abs = np.sqrt(1.0 - cos_C * cos_C)
    if sin_C_abs < SINGULAR_BAND:
        raise SingularCase("derived angle C is singular", quantity="C")
    out = []
    for sign in (1.0, -1.0):
        sin_C = sign * sin_C_abs
        C = _from_sin_cos(sin_C, cos_C, "C")
        a = _from_sin_cos(SA * sc / sin_C, (CA + CB * cos_C) / (SB * sin_C), "a")
        b = _from_sin_cos(SB * sc / sin_C, (CB + CA * cos_C) / (SA * sin_C), "b")
        out.append(_verified(SphericalTriangleTuple(a, b, c, wrap(A), wrap(B), C), "ASA"))
    return out[0], out[1]


SOLVERS = {
    "sss": solve_sss,
    "sas": solve_sas,
    "asa": solve_asa,
    "aaa": solve_aaa,
}


def mate(t: SphericalTriangleTuple, mode: str) -> SphericalTriangleTuple:
    """The documented partner of ``t`` for the given congruence mode."""
    a, b, c, A, B, C = t.as_tuple()
    if mode == "sss":
        return SphericalTriangleTuple(a, b, c, wrap(-A), wrap(-B), wrap(-C))
    if mode == "aaa":
        return SphericalTriangleTuple(wrap(-a), wrap(-b), wrap(-c), A, B, C)
    if mode == "sas":
        return SphericalTriangleTuple(wrap(-a), b, c, A, wrap(B + np.pi), wrap(C + np.pi))
    if mode == "asa":
        return SphericalTriangleTuple(wrap(a + np.pi), wrap(b + np.pi), c, A, B, wrap(-C))
    raise ValueError(f"unknown mode {mode!r}")


# ----------------------------------------------------------------------
# Singular triangles
# ----------------------------------------------------------------------

_NAMES = ("A", "B", "C")


def _near(x: float, target: float) -> bool:
    return abs(x - target) < SINGULAR_BAND


def classify_singular(
    A: float | None = None,
    B: float | None = None,
    C: float | None = None,
    a: float | None = None,
    b: float | None = None,
    c: float | None = None,
) -> SingularClass:
    """
    Classify a triangle with a singular angle (or a side of length pi).

    The only realizable angle patterns, up to relabeling, are (pi, pi, pi),
    (0, 0, pi), (2pi, 2pi, pi) and (theta, theta, pi). Partial data is
    matched against each pattern; when several fit, the lune (theta, theta, pi)
    wins because it contains the others as special values of theta.
    """
    given = (A, B, C)
    sides = (a, b, c)
    singular_given = any(x is not None and is_singular_angle(x) for x in given)
    pi_side = [i for i, x in enumerate(sides) if x is not None and _near(x, np.pi)]
    if not singular_given and not pi_side:
        raise ValueError("classify_singular needs a singular angle or a side of length pi")

    fixed = {
        SingularPattern.ALL_PI: (np.pi, np.pi, np.pi),
        SingularPattern.ZERO_ZERO_PI: (0.0, 0.0, np.pi),
        SingularPattern.TWO_PI_TWO_PI_PI: (TWO_PI, TWO_PI, np.pi),
    }
    matches: list[SingularClass] = []
    for pattern, values in fixed.items():
        for perm in set(permutations(range(3))):
            target = tuple(values[p] for p in perm)
            if all(g is None or _near(g, t) for g, t in zip(given, target)):
                vertex = _NAMES[target.index(np.pi)] if pattern is not SingularPattern.ALL_PI else "C"
                matches.append(SingularClass(pattern, vertex, target))
                break

    for k in range(3):
        if given[k] is not None and not _near(given[k], np.pi):
            continue
        if pi_side and k not in pi_side:
            continue
        rest = [given[j] for j in range(3) if j != k]
        known = [x for x in rest if x is not None]
        if len(known) == 2 and abs(known[0] - known[1]) > SINGULAR_BAND:
            continue
        theta = known[0] if known else None
        angles = tuple(np.pi if j == k else theta for j in range(3))
        matches.append(SingularClass(SingularPattern.LUNE, _NAMES[k], angles, theta))
        break

    if not matches:
        raise Unrealizable(
            f"angles {given} match no singular pattern",
            obstruction="singular-pattern",
        )
    full = all(g is not None for g in given)
    chosen = matches[0] if full else next(
        (m for m in matches if m.pattern is SingularPattern.LUNE), matches[0]
    )
    _check_singular_sides(chosen, sides)
    logger.debug("singular triangle %s -> %s", given, chosen.pattern.value)
    return chosen


def _check_singular_sides(cls: SingularClass, sides: tuple[float | None, ...]) -> None:
    k = _NAMES.index(cls.singular_vertex)
    opposite = sides[k]
    adjacent = [sides[j] for j in range(3) if j != k]
    if cls.pattern is SingularPattern.LUNE:
        if opposite is not None and not _near(opposite, np.pi):
            raise Unrealizable("a (theta, theta, pi) triangle has its long side equal to pi")
        if all(x is not None for x in adjacent) and not _near(sum(adjacent), np.pi):
            raise Unrealizable("the two sides at the straight vertex must sum to pi")
    elif cls.pattern is SingularPattern.ALL_PI:
        if all(x is not None for x in sides) and not _near(sum(sides), TWO_PI):
            raise Unrealizable("a (pi, pi, pi) triangle is a great circle: sides sum to 2pi")
    elif all(x is not None for x in sides):
        if angle_gap(opposite, sum(adjacent)) > SINGULAR_BAND:
            raise Unrealizable("a folded triangle has the long side equal to the other two")


# ----------------------------------------------------------------------
# Coordinates
# ----------------------------------------------------------------------

def triangle_from_tuple(t: SphericalTriangleTuple) -> PlacedTriangle:
    """
    Realize ``t`` on S^2 in normalized pose: A at the north pole, B on the
    prime meridian (x >= 0 side for c < pi) and the interior to the left of
    A->B->C.
    """
    for x, name in zip(t.sides, ("a", "b", "c")):
        _check_length(x, name)
    for x, name in zip(t.angles, _NAMES):
        _check_angle(x, name)
    r = max_residual(t)
    if r > RESIDUAL_TOL:
        raise RejectedTuple(f"tuple violates generalized trigonometry (residual {r:.3e})", residual=r)
    pa = np.array([0.0, 0.0, 1.0])
    pb = np.array([np.sin(t.c), 0.0, np.cos(t.c)])
    pc = np.array([np.sin(t.b) * np.cos(t.A), np.sin(t.b) * np.sin(t.A), np.cos(t.b)])
    n_ab = np.array([0.0, 1.0, 0.0])
    # C->A runs back down the meridian at azimuth A
    n_ca = -np.array([-np.sin(t.A), np.cos(t.A), 0.0])
    n_bc = arc_normal(pb, pc, long_arc=t.a > np.pi)
    return PlacedTriangle(np.vstack([pa, pb, pc]), np.vstack([n_ab, n_bc, n_ca]))


def measure_triangle(points: np.ndarray, normals: np.ndarray | None = None) -> SphericalTriangleTuple:
    """
    Read (a, b, c; A, B, C) off coordinates. ``normals`` selects the arcs;
    by default every arc is the short one.
    """
    pts = np.asarray(points, dtype=float)
    if normals is None:
        normals = np.vstack([arc_normal(pts[i], pts[(i + 1) % 3]) for i in range(3)])
    lengths = [arc_length(pts[i], pts[(i + 1) % 3], normals[i]) for i in range(3)]
    angles = [interior_angle(pts[i], normals[i - 1], normals[i]) for i in range(3)]
    # edge i joins vertex i and i+1, so it is opposite vertex i+2
    c, a, b = lengths
    return SphericalTriangleTuple(a, b, c, *angles)


def with_long_arc(t: SphericalTriangleTuple, index: int) -> SphericalTriangleTuple:
    """Same three points, the complementary arc for side ``index`` (0=a, 1=b, 2=c)."""
    sides = list(t.sides)
    angles = list(t.angles)
    sides[index] = TWO_PI - sides[index]
    for j in range(3):
        if j != index:
            angles[j] = wrap(angles[j] + np.pi)
    return replace(t, a=sides[0], b=sides[1], c=sides[2], A=angles[0], B=angles[1], C=angles[2])
