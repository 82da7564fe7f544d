# src/polyrigid/sphpolygon.py
"""
Spherical polygons on S^2: measurement, hemisphere containment,
self-intersection, and the rigidity solvers that turn a vertex figure's
angles and (some of) its side lengths into coordinates.

Conventions: vertices are listed in boundary order with the interior on the
left. Edge i runs from vertex i to vertex i+1 along the great circle with
normal ``normals[i]``, counterclockwise about that normal.
"""
from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.transform import Rotation

from .config import ARC_INTERSECT_TOL, DEFAULT_REJECTION_BUDGET, MEASURE_TOL, SINGULAR_BAND
from .errors import (
    Degenerate,
    FixtureError,
    InternalContradiction,
    PartiallyFlatObstruction,
    SingularCase,
    Unrealizable,
)
from .sphtrig import (
    TWO_PI,
    angle_gap,
    arc_length,
    arc_normal,
    interior_angle,
    is_singular_angle,
    rotate_about,
    solve_aaa,
    solve_asa,
    unit,
    wrap,
)

logger = logging.getLogger(__name__)

NORTH = np.array([0.0, 0.0, 1.0])


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

class QuadCase(Enum):
    """Configuration of a solved quadrilateral after index normalization."""

    BOTH_CONVEX = "i"
    HEMISPHERE = "ii-b"
    SPLIT = "ii-c"
    CROSSED = "iii-d"


class Containment(Enum):
    STRICTLY_INSIDE = "strictly_inside"
    ON_BOUNDARY_EDGE = "on_boundary_edge"
    NOT_CONTAINED = "not_contained"


@dataclass(frozen=True)
class SphericalPolygonSpec:
    """Interior angles (all known) and side lengths (None where unknown)."""

    angles: tuple[float, ...]
    lengths: tuple[float | None, ...]

    def __post_init__(self):
        angles = tuple(float(x) for x in self.angles)
        lengths = tuple(None if x is None else float(x) for x in self.lengths)
        if len(angles) != len(lengths):
            raise ValueError(f"{len(angles)} angles but {len(lengths)} lengths")
        if len(angles) < 3:
            raise ValueError("a spherical polygon needs at least 3 vertices")
        for x in angles:
            if not -SINGULAR_BAND <= x <= TWO_PI + SINGULAR_BAND:
                raise Unrealizable(f"interior angle {x!r} outside [0, 2pi]")
        for x in lengths:
            if x is not None and not 0.0 < x < TWO_PI:
                raise Unrealizable(f"edge length {x!r} outside (0, 2pi)")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "lengths", lengths)

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def known(self) -> tuple[bool, ...]:
        return tuple(x is not None for x in self.lengths)

    @property
    def unknown_indices(self) -> list[int]:
        return [i for i, x in enumerate(self.lengths) if x is None]

    @property
    def singular(self) -> tuple[bool, ...]:
        return tuple(is_singular_angle(x) for x in self.angles)

    def rotated(self, shift: int) -> SphericalPolygonSpec:
        """Relabel so that new index j is old index j + shift."""
        n = self.n
        return SphericalPolygonSpec(
            tuple(self.angles[(j + shift) % n] for j in range(n)),
            tuple(self.lengths[(j + shift) % n] for j in range(n)),
        )

    def with_lengths(self, lengths: Sequence[float | None]) -> SphericalPolygonSpec:
        return SphericalPolygonSpec(self.angles, tuple(lengths))


@dataclass(frozen=True, eq=False)
class SphericalPolygonRealization:
    """
    Unit vectors in boundary order plus the great-circle normal of each edge,
    which fixes the chosen (short or long) arc.
    """

    points: np.ndarray
    normals: np.ndarray
    case: QuadCase | None = None
    normalization: str | None = None
    auxiliary: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_points(cls, points, long_arcs: Sequence[bool] | None = None) -> SphericalPolygonRealization:
        pts = np.array([unit(p) for p in np.asarray(points, dtype=float)])
        n = len(pts)
        long_arcs = long_arcs or [False] * n
        normals = np.array([arc_normal(pts[i], pts[(i + 1) % n], long_arcs[i]) for i in range(n)])
        return cls(pts, normals)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def lengths(self) -> np.ndarray:
        n = self.n
        return np.array([
            arc_length(self.points[i], self.points[(i + 1) % n], self.normals[i]) for i in range(n)
        ])

    @property
    def angles(self) -> np.ndarray:
        return np.array([
            interior_angle(self.points[i], self.normals[i - 1], self.normals[i])
            for i in range(self.n)
        ])

    @property
    def long_arcs(self) -> tuple[bool, ...]:
        return tuple(bool(x > np.pi) for x in self.lengths)

    def transformed(self, matrix: np.ndarray) -> SphericalPolygonRealization:
        aux = None if self.auxiliary is None else matrix @ self.auxiliary
        return SphericalPolygonRealization(
            self.points @ matrix.T, self.normals @ matrix.T, self.case, self.normalization, aux
        )

    def rolled(self, shift: int) -> SphericalPolygonRealization:
        """Relabel so that new index i is old index i - shift."""
        return SphericalPolygonRealization(
            np.roll(self.points, shift, axis=0),
            np.roll(self.normals, shift, axis=0),
            self.case, self.normalization, self.auxiliary,
        )

    def spec(self, known: Sequence[bool] | None = None) -> SphericalPolygonSpec:
        """The measured spec, optionally withholding lengths where ``known`` is False."""
        angles, lengths = measure_polygon(self)
        known = known if known is not None else [True] * self.n
        return SphericalPolygonSpec(
            tuple(angles), tuple(float(x) if k else None for x, k in zip(lengths, known))
        )


# ----------------------------------------------------------------------
# Measurement and pose
# ----------------------------------------------------------------------

def measure_polygon(real: SphericalPolygonRealization) -> tuple[np.ndarray, np.ndarray]:
    """Interior angles and arc lengths."""
    return real.angles, real.lengths


def spec_deviation(real: SphericalPolygonRealization, spec: SphericalPolygonSpec) -> float:
    """Largest mismatch between a realization and the angles/known lengths of ``spec``."""
    angles, lengths = measure_polygon(real)
    worst = max(angle_gap(a, b) for a, b in zip(angles, spec.angles))
    for got, want in zip(lengths, spec.lengths):
        if want is not None:
            worst = max(worst, abs(got - want))
    return worst


def pose_matrix(points: np.ndarray) -> np.ndarray:
    """Rotation taking points[0] to the north pole and points[1] onto the x >= 0 meridian."""
    e3 = unit(points[0])
    ref = None
    for p in points[1:]:
        w = p - np.dot(p, e3) * e3
        if np.linalg.norm(w) > 1e-9:
            ref = w
            break
    if ref is None:
        ref = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        ref = ref - np.dot(ref, e3) * e3
    e1 = unit(ref)
    e2 = np.cross(e3, e1)
    return np.vstack([e1, e2, e3])


def normalize_pose(real: SphericalPolygonRealization) -> SphericalPolygonRealization:
    return real.transformed(pose_matrix(real.points))


# ----------------------------------------------------------------------
# Self-intersection and hemisphere containment
# ----------------------------------------------------------------------

def _param(x: np.ndarray, start: np.ndarray, normal: np.ndarray) -> float:
    return arc_length(start, x, normal)


def _on_arc(x: np.ndarray, p: np.ndarray, n: np.ndarray, length: float, tol: float) -> bool:
    if abs(np.dot(x, n)) > tol:
        return False
    s = _param(x, p, n)
    return s <= length + tol or s >= TWO_PI - tol


def _cyclic_overlap(l1: float, offset: float, l2: float) -> float:
    total = 0.0
    for shift in (0.0, -TWO_PI):
        lo, hi = offset + shift, offset + shift + l2
        total += max(0.0, min(l1, hi) - max(0.0, lo))
    return total


def _arcs_cross(real: SphericalPolygonRealization, i: int, k: int, adjacent_at: int | None,
                tol: float) -> bool:
    n = real.n
    p1, q1, n1 = real.points[i], real.points[(i + 1) % n], real.normals[i]
    p2, q2, n2 = real.points[k], real.points[(k + 1) % n], real.normals[k]
    l1, l2 = arc_length(p1, q1, n1), arc_length(p2, q2, n2)
    axis = np.cross(n1, n2)
    if np.linalg.norm(axis) < tol:
        # same great circle: compare parameter intervals
        start2 = p2 if np.dot(n1, n2) > 0 else q2
        offset = _param(start2, p1, n1)
        overlap = _cyclic_overlap(l1, offset, l2)
        return overlap > tol
    x = unit(axis)
    for cand in (x, -x):
        if adjacent_at is not None and np.linalg.norm(cand - real.points[adjacent_at]) < 1e-7:
            continue
        if adjacent_at is not None:
            s1, s2 = _param(cand, p1, n1), _param(cand, p2, n2)
            inside = tol < s1 < l1 - tol and tol < s2 < l2 - tol
        else:
            inside = _on_arc(cand, p1, n1, l1, tol) and _on_arc(cand, p2, n2, l2, tol)
        if inside:
            return True
    return False


def is_self_intersecting(real: SphericalPolygonRealization, tol: float = ARC_INTERSECT_TOL) -> bool:
    """Pairwise great-arc test; adjacent edges touching at their shared vertex do not count."""
    n = real.n
    for i in range(n):
        for k in range(i + 1, n):
            if k == i + 1:
                shared = k
            elif i == 0 and k == n - 1:
                shared = 0
            else:
                shared = None
            if _arcs_cross(real, i, k, shared, tol):
                return True
    return False


def hemisphere_margin(points: np.ndarray) -> tuple[float, np.ndarray | None]:
    """
    Smallest height of the points over a pole found by a linear program,
    as the sine of an angle. The program runs over a box, so its pole is
    rescaled to unit length before the heights are read. The result is a
    lower bound on the best pole's margin and is positive exactly when some
    open hemisphere holds every point.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    # variables (p_x, p_y, p_z, t): maximize t subject to v.p >= t, |p_k| <= 1
    c = np.array([0.0, 0.0, 0.0, -1.0])
    a_ub = np.hstack([-pts, np.ones((n, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(n), bounds=[(-1, 1)] * 4, method="highs")
    if not res.success or -res.fun <= 0.0:
        return 0.0, None
    pole = res.x[:3]
    norm = float(np.linalg.norm(pole))
    if norm < 1e-12:
        return 0.0, None
    pole = pole / norm
    return float(np.min(pts @ pole)), pole


def hemisphere_containment(real: SphericalPolygonRealization, tol: float = 1e-12) -> Containment:
    """
    Find a hemisphere holding the polygon. Strictly inside when the vertex
    margin over the best pole beats ``tol``; otherwise the edge poles are
    tried, since a convex polygon that fits only in a closed hemisphere has
    exactly one edge on its boundary.
    """
    pts = real.points
    n = real.n
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) < 1e-9:
                raise Degenerate(f"vertices {i} and {j} coincide", vertices=(i, j))
    if any(length > np.pi + 1e-9 for length in real.lengths):
        return Containment.NOT_CONTAINED

    height, _ = hemisphere_margin(pts)
    if height > tol:
        return Containment.STRICTLY_INSIDE
    for i in range(n):
        others = [pts[j] for j in range(n) if j not in (i, (i + 1) % n)]
        if all(np.dot(real.normals[i], p) > tol for p in others):
            return Containment.ON_BOUNDARY_EDGE
    return Containment.NOT_CONTAINED


# ----------------------------------------------------------------------
# Chain construction
# ----------------------------------------------------------------------

def _walk(angles: Sequence[float], lengths: Sequence[float]):
    """
    Draw the first n-1 edges from the north pole, turning by pi - angle at
    each vertex. Returns points, normals of the drawn edges and the outgoing
    tangent at the last vertex.
    """
    v = NORTH.copy()
    t = np.array([1.0, 0.0, 0.0])
    points = [v]
    normals = []
    for i, length in enumerate(lengths):
        normals.append(np.cross(v, t))
        v_next = unit(np.cos(length) * v + np.sin(length) * t)
        t_arr = -np.sin(length) * v + np.cos(length) * t
        t_arr = unit(t_arr - np.dot(t_arr, v_next) * v_next)
        t = rotate_about(t_arr, v_next, np.pi - angles[i + 1])
        v = v_next
        points.append(v)
    return np.array(points), normals, t


def _close_chain(spec: SphericalPolygonSpec, tol: float) -> SphericalPolygonRealization:
    """Chain construction with the last edge closing the polygon."""
    n = spec.n
    known = spec.lengths[: n - 1]
    if any(x is None for x in known):
        raise ValueError("chain construction needs every edge but the last")
    points, normals, t = _walk(spec.angles, known)
    v_last, v0 = points[-1], points[0]
    closing = np.cross(v_last, t)
    off = abs(float(np.dot(v0, closing)))
    if off > tol:
        raise Unrealizable(
            f"chain does not close: first vertex is {off:.3e} off the closing great circle",
            obstruction="seam",
        )
    length = arc_length(v_last, v0, closing)
    if length < SINGULAR_BAND or length > TWO_PI - SINGULAR_BAND:
        raise Unrealizable("closing edge has zero length", obstruction="seam")
    seam_angle = interior_angle(v0, closing, normals[0])
    if angle_gap(seam_angle, spec.angles[0]) > tol:
        raise Unrealizable(
            f"angle at the seam is {seam_angle:.9f}, expected {spec.angles[0]:.9f}",
            obstruction="seam",
        )
    if spec.lengths[-1] is not None and abs(length - spec.lengths[-1]) > tol:
        raise Unrealizable(
            f"closing edge is {length:.9f}, expected {spec.lengths[-1]:.9f}", obstruction="seam"
        )
    normals.append(closing)
    return SphericalPolygonRealization(points, np.array(normals))


def solve_ngon_one_unknown_length(spec: SphericalPolygonSpec, tol: float = MEASURE_TOL) -> SphericalPolygonRealization:
    """
    Draw the known edges one after another, turning at each vertex by its
    interior angle, and read the single unknown length off the closing arc.
    Singular angles are fine here: a straight vertex just continues the arc.
    """
    unknown = spec.unknown_indices
    if len(unknown) > 1:
        raise Unrealizable(f"{len(unknown)} unknown lengths; chain construction handles one")
    last = unknown[0] if unknown else spec.n - 1
    shift = (last + 1) % spec.n
    real = _close_chain(spec.rotated(shift), tol).rolled(shift)
    return normalize_pose(real)


# ----------------------------------------------------------------------
# Convex n-gons
# ----------------------------------------------------------------------

def _convex_lengths(angles: list[float], lengths: list[float | None]) -> list[float]:
    n = len(angles)
    if n == 3:
        if all(x is not None for x in lengths):
            return list(lengths)
        first, second = solve_aaa(*angles)
        t = first if max(first.sides) < np.pi else second
        # edge i joins vertices i and i+1, so it is opposite vertex i+2
        return [t.c, t.a, t.b]
    k = next((i for i, x in enumerate(lengths) if x is not None), None)
    if k is None:
        raise Unrealizable(f"convex {n}-gon needs {n - 3} known lengths")
    angles = angles[k:] + angles[:k]
    lengths = lengths[k:] + lengths[:k]
    # extend edges n-1 and 1 beyond the known edge 0 until they meet at u
    ext, _ = solve_asa(np.pi - angles[0], lengths[0], np.pi - angles[1])
    x, y, psi = ext.b, ext.a, ext.C
    merged_first = None if lengths[1] is None else lengths[1] + y
    merged_last = None if lengths[-1] is None else lengths[-1] + x
    sub = _convex_lengths(
        [psi] + angles[2:],
        [merged_first] + lengths[2:-1] + [merged_last],
    )
    l1 = sub[0] - y
    l_last = sub[-1] - x
    if l1 <= SINGULAR_BAND or l_last <= SINGULAR_BAND:
        raise Unrealizable("extension triangle swallows a neighboring edge")
    out = [lengths[0], l1] + sub[1:-1] + [l_last]
    return out[-k:] + out[:-k] if k else out


def solve_convex_ngon(spec: SphericalPolygonSpec, tol: float = MEASURE_TOL) -> SphericalPolygonRealization:
    """
    Strictly convex n-gon from all angles and n-3 lengths: extend the two
    neighbors of a known edge to a triangle, recurse on the (n-1)-gon, and
    end with the convex branch of AAA.
    """
    if any(not SINGULAR_BAND < x < np.pi - SINGULAR_BAND for x in spec.angles):
        raise Unrealizable("convex solver needs every interior angle in (0, pi)")
    if sum(spec.known) < spec.n - 3:
        raise Unrealizable(f"convex {spec.n}-gon needs {spec.n - 3} known lengths")
    lengths = _convex_lengths(list(spec.angles), list(spec.lengths))
    real = ngon_from_lengths(spec, lengths, tol)
    if any(x >= np.pi for x in real.lengths):
        raise Unrealizable("convex solution has an edge of length >= pi")
    return real


def ngon_from_lengths(spec: SphericalPolygonSpec, lengths: Sequence[float], tol: float = MEASURE_TOL) -> SphericalPolygonRealization:
    """Chain construction with every length filled in, checked against the original spec."""
    full = spec.with_lengths(lengths)
    real = normalize_pose(_close_chain(full, tol))
    if spec_deviation(real, spec) > tol:
        raise Unrealizable("reconstructed polygon does not reproduce the given data")
    return real


def solve_triangle_figure(spec: SphericalPolygonSpec, tol: float = MEASURE_TOL) -> SphericalPolygonRealization:
    """Triangle from its three angles, taking the branch with every side below pi."""
    if spec.n != 3:
        raise ValueError("solve_triangle_figure needs a triangle")
    first, second = solve_aaa(*spec.angles)
    for t in (first, second):
        if max(t.sides) < np.pi:
            return ngon_from_lengths(spec, [t.c, t.a, t.b], tol)
    raise Unrealizable("no AAA branch has every side below pi")


# ----------------------------------------------------------------------
# Quadrilaterals
# ----------------------------------------------------------------------

def _normalized_angles(angles: Sequence[float]) -> tuple[list[float], str]:
    """
    Relabel so the known edge comes first and its start angle is below pi:
    mirror when only that angle is reflex, take the complementary polygon
    when both known-edge angles are.
    """
    phi = [float(x) for x in angles]
    how = "none"
    if phi[0] > np.pi and phi[1] > np.pi:
        phi = [TWO_PI - phi[1], TWO_PI - phi[0], TWO_PI - phi[3], TWO_PI - phi[2]]
        how = "complemented"
    if phi[0] > np.pi:
        phi = [phi[1], phi[0], phi[3], phi[2]]
        how = "reflected" if how == "none" else "complemented+reflected"
    return phi, how


def quadrilateral_cases(angles: Sequence[float]) -> list[QuadCase]:
    """Cases left open by the sign pattern of the normalized angles about pi."""
    phi, _ = _normalized_angles(angles)
    if phi[1] < np.pi:
        return [QuadCase.BOTH_CONVEX]
    if phi[2] < np.pi:
        return [QuadCase.SPLIT]
    if phi[3] < np.pi:
        return [QuadCase.HEMISPHERE, QuadCase.CROSSED]
    return [QuadCase.HEMISPHERE]


def classify_quadrilateral(angles: Sequence[float], self_intersecting: bool) -> tuple[QuadCase, str]:
    """Case label of a realized quadrilateral, with the relabeling that exposes it."""
    phi, how = _normalized_angles(angles)
    if phi[1] < np.pi:
        return QuadCase.BOTH_CONVEX, how
    if self_intersecting:
        return QuadCase.CROSSED, how
    return (QuadCase.HEMISPHERE if phi[2] > np.pi else QuadCase.SPLIT), how


# None: either way
_CROSSING: dict[QuadCase, bool | None] = {
    QuadCase.BOTH_CONVEX: None,
    QuadCase.HEMISPHERE: False,
    QuadCase.SPLIT: False,
    QuadCase.CROSSED: True,
}


@dataclass(frozen=True, eq=False)
class _QuadFrame:
    """Known edge from the north pole, the circles of its two neighbors, and one point where they meet."""

    v0: np.ndarray
    v1: np.ndarray
    n0: np.ndarray
    n1: np.ndarray
    n3: np.ndarray
    meet: np.ndarray

    @classmethod
    def build(cls, length: float, angles: Sequence[float]) -> _QuadFrame:
        v0 = NORTH.copy()
        v1 = np.array([np.sin(length), 0.0, np.cos(length)])
        n0 = np.array([0.0, 1.0, 0.0])
        n1 = rotate_about(n0, v1, np.pi - angles[1])
        n3 = rotate_about(n0, v0, -(np.pi - angles[0]))
        axis = np.cross(n1, n3)
        if np.linalg.norm(axis) < 1e-12:
            raise Unrealizable(
                "neighbors of the known edge lie on one great circle", obstruction="degenerate"
            )
        return cls(v0, v1, n0, n1, n3, unit(axis))


def _cut_triangles(
    frame: _QuadFrame, spec: SphericalPolygonSpec, tol: float
) -> tuple[list[tuple[SphericalPolygonRealization, np.ndarray]], Counter[str]]:
    """
    Quadrilaterals whose fourth side cuts a triangle off the two neighbor
    circles at one of their meeting points v5.

    The triangle lies on one side of each of the three circles. Picking the
    sides fixes its angles, AAA gives its sides, and stepping from v5 along
    the neighbor circles places v2 and v3. Both arcs between v2 and v3 are
    tried. Returns every realization reproducing the data, tagged with its
    v5, and a tally of the misses.
    """
    th = spec.angles
    c13 = float(np.dot(frame.n1, frame.n3))
    found: list[tuple[SphericalPolygonRealization, np.ndarray]] = []
    misses: Counter[str] = Counter()
    signs = (1.0, -1.0)
    for v5, e1, e12, e23 in product((frame.meet, -frame.meet), signs, signs, signs):
        e3 = e1 * e12 * e23
        corners = (
            np.pi - np.arccos(np.clip(e12 * e23 * c13, -1.0, 1.0)),
            np.pi - np.arccos(np.clip(-e12 * np.cos(th[2]), -1.0, 1.0)),
            np.pi - np.arccos(np.clip(-e23 * np.cos(th[3]), -1.0, 1.0)),
        )
        try:
            tri, _ = solve_aaa(*corners)
        except (Unrealizable, SingularCase):
            misses["no-triangle"] += 1
            continue
        # side c joins v5 to v2 on circle 1, side b joins v5 to v3 on circle 3
        t1, t3 = np.cross(frame.n1, v5), np.cross(frame.n3, v5)
        v2 = np.cos(tri.c) * v5 + np.sin(tri.c) * np.sign(e3 * np.dot(frame.n3, t1)) * t1
        v3 = np.cos(tri.b) * v5 + np.sin(tri.b) * np.sign(e1 * np.dot(frame.n1, t3)) * t3
        chord = np.cross(v2, v3)
        if np.linalg.norm(chord) < 1e-12:
            misses["degenerate"] += 1
            continue
        for arc in signs:
            real = SphericalPolygonRealization(
                np.vstack([frame.v0, frame.v1, v2, v3]),
                np.vstack([frame.n0, frame.n1, arc * unit(chord), frame.n3]),
            )
            if spec_deviation(real, spec) > tol:
                misses["mismatch"] += 1
            elif not any(
                np.allclose(real.points, seen.points, atol=1e-7)
                and np.allclose(real.normals, seen.normals, atol=1e-7)
                for seen, _ in found
            ):
                found.append((real, v5))
    return found, misses


def _known_edge_first(spec: SphericalPolygonSpec) -> tuple[int, SphericalPolygonSpec]:
    if spec.n != 4:
        raise ValueError("solve_quadrilateral needs n = 4")
    if any(spec.singular):
        raise SingularCase("quadrilateral solver needs non-singular angles")
    if not any(spec.known):
        raise Unrealizable("quadrilateral solver needs one known length")
    j = spec.known.index(True)
    rot = spec.rotated(j)
    if not 0.0 < rot.lengths[0] < np.pi:
        raise Unrealizable("known edge must be shorter than pi", obstruction="long-edge")
    return j, rot


def _short(real: SphericalPolygonRealization) -> bool:
    lengths = real.lengths
    return bool(np.all(lengths > SINGULAR_BAND) and np.all(lengths < np.pi - SINGULAR_BAND))


def quadrilateral_candidates(spec: SphericalPolygonSpec, tol: float = MEASURE_TOL) -> list[SphericalPolygonRealization]:
    """
    Every realization of the data over all cut-off triangles and arc
    choices, long edges included. The auxiliary vertex is the v5 it was
    built from.
    """
    j, rot = _known_edge_first(spec)
    found, _ = _cut_triangles(_QuadFrame.build(rot.lengths[0], rot.angles), rot, tol)
    return [
        normalize_pose(SphericalPolygonRealization(r.points, r.normals, auxiliary=v5).rolled(j))
        for r, v5 in found
    ]


def solve_quadrilateral_case(
    spec: SphericalPolygonSpec, case: QuadCase, tol: float = MEASURE_TOL
) -> SphericalPolygonRealization:
    """
    Solve under one case hypothesis. The normalized angles must show the
    case's sign pattern, and exactly one cut-off-triangle realization may
    have every edge below pi and the case's crossing behavior. A failure
    raises Unrealizable with an obstruction of the form ``<case>:<reason>``.
    """
    j, rot = _known_edge_first(spec)
    if case not in quadrilateral_cases(rot.angles):
        raise Unrealizable(
            f"angles do not show the sign pattern of case {case.value}",
            obstruction=f"{case.value}:sign-pattern",
        )
    found, misses = _cut_triangles(_QuadFrame.build(rot.lengths[0], rot.angles), rot, tol)
    short = [(r, v5) for r, v5 in found if _short(r)]
    want = _CROSSING[case]
    fits = [(r, v5) for r, v5 in short if want is None or is_self_intersecting(r) == want]
    if not fits:
        if short:
            reason = "crossing" if want is False else "simple"
        elif found:
            reason = "long-edge"
        elif misses and misses["no-triangle"] == sum(misses.values()):
            reason = "no-triangle"
        else:
            reason = "no-fit"
        raise Unrealizable(
            f"case {case.value}: no quadrilateral with every edge below pi ({reason})",
            obstruction=f"{case.value}:{reason}",
        )
    if len(fits) > 1:
        raise InternalContradiction(f"case {case.value} accepted two quadrilaterals")
    real, v5 = fits[0]
    _, how = _normalized_angles(rot.angles)
    real = SphericalPolygonRealization(real.points, real.normals, case, how, v5).rolled(j)
    return normalize_pose(real)


def solve_quadrilateral(spec: SphericalPolygonSpec, tol: float = MEASURE_TOL) -> SphericalPolygonRealization:
    """
    Quadrilateral from all four (non-singular) angles and one edge length,
    every edge shorter than pi.

    The sign pattern of the normalized angles names the candidate cases and
    each one is solved on its own terms. At most one may accept.
    """
    _, rot = _known_edge_first(spec)
    accepted: list[SphericalPolygonRealization] = []
    reasons: list[str] = []
    for case in quadrilateral_cases(rot.angles):
        try:
            accepted.append(solve_quadrilateral_case(spec, case, tol))
        except Unrealizable as exc:
            reasons.append(exc.context.get("obstruction", case.value))
    if len(accepted) > 1:
        raise InternalContradiction(
            "cases " + " and ".join(r.case.value for r in accepted) + " both accepted the same data"
        )
    if not accepted:
        raise Unrealizable(
            "no quadrilateral with every edge below pi fits: " + ", ".join(reasons),
            obstruction=",".join(reasons),
        )
    logger.debug("quadrilateral solved as case %s (%s)", accepted[0].case.value, accepted[0].normalization)
    return accepted[0]


# ----------------------------------------------------------------------
# Flat edges
# ----------------------------------------------------------------------

_FUSE_TOL = 1e-7


def _straight(x: float) -> bool:
    return abs(x - np.pi) < SINGULAR_BAND


def solve_flat_edge_cases(
    spec: SphericalPolygonSpec,
    flat_flags: Sequence[bool] | None = None,
    tol: float = MEASURE_TOL,
) -> SphericalPolygonRealization:
    """
    Triangles and quadrilaterals with singular angles.

    Runs of singular vertices are fused: the edges through them lie on one
    great circle, so they act as a single edge of a smaller polygon whose
    corners are the non-singular vertices. Each run may hide at most one
    unknown length; the smaller polygon is a bigon (both sides pi) or a
    triangle, and its solution gives the hidden lengths back.
    """
    flat = list(flat_flags) if flat_flags is not None else list(spec.singular)
    n = spec.n
    if n not in (3, 4):
        raise ValueError("flat-edge cases cover triangles and quadrilaterals")
    if len(spec.unknown_indices) <= 1:
        return solve_ngon_one_unknown_length(spec, tol)
    if all(flat):
        unknown = spec.unknown_indices
        if n == 4 and len(unknown) == 2 and (unknown[1] - unknown[0]) % 4 == 2:
            raise PartiallyFlatObstruction(
                "all-flat 4-valent figure with alternating unknown sides",
                obstruction="alternating-flat",
            )
        raise Unrealizable("all-flat figure with more than one unknown side", obstruction="flat")

    corners = [i for i in range(n) if not flat[i]]
    runs = []
    for a_idx, start in enumerate(corners):
        end = corners[(a_idx + 1) % len(corners)]
        edges = []
        signs = []
        sigma = 1.0
        i = start
        while True:
            edges.append(i)
            signs.append(sigma)
            i = (i + 1) % n
            if i == end:
                break
            if not _straight(spec.angles[i]):
                sigma = -sigma
        hidden = [e for e in edges if spec.lengths[e] is None]
        if len(hidden) > 1:
            raise Unrealizable("a flat run hides two unknown lengths", obstruction="flat")
        runs.append((start, end, edges, signs, hidden))

    options = []
    for start, end, edges, signs, hidden in runs:
        known_sum = sum(s * spec.lengths[e] for e, s in zip(edges, signs) if e not in hidden)
        if hidden:
            options.append([1.0, -1.0])
        else:
            options.append([1.0 if known_sum > 0 else -1.0])

    solutions: list[SphericalPolygonRealization] = []
    for choice in product(*options):
        lengths = _fused_candidates(spec, runs, choice)
        for full in lengths:
            try:
                real = ngon_from_lengths(spec, full, tol)
            except Unrealizable:
                continue
            if not any(np.allclose(real.lengths, s.lengths, atol=1e-9) for s in solutions):
                solutions.append(real)

    if not solutions:
        raise Unrealizable("no realization fits the flat-edge data", obstruction="flat")
    short = [s for s in solutions if np.all(s.lengths < np.pi)]
    pool = short or solutions
    if len(pool) > 1:
        raise InternalContradiction("flat-edge data admits two realizations")
    return pool[0]


def _fused_candidates(spec: SphericalPolygonSpec, runs, choice) -> list[list[float]]:
    """Full length vectors consistent with one direction choice per fused run."""
    m = len(runs)
    angles = []
    fused: list[float | None] = []
    for k, (start, end, edges, signs, hidden) in enumerate(runs):
        angle = spec.angles[start]
        if choice[k] < 0:
            angle += np.pi
        prev_signs = runs[k - 1][3]
        if prev_signs[-1] != choice[k - 1]:
            angle += np.pi
        angles.append(wrap(angle))
        if hidden:
            fused.append(None)
        else:
            fused.append(abs(sum(s * spec.lengths[e] for e, s in zip(edges, signs))))
    if any(is_singular_angle(x) for x in angles):
        return []

    reduced: list[list[float]] = []
    if m == 2:
        if abs(angles[0] - angles[1]) > _FUSE_TOL:
            return []
        if any(x is not None and abs(x - np.pi) > _FUSE_TOL for x in fused):
            return []
        reduced.append([np.pi, np.pi])
    elif m == 3:
        if sum(x is None for x in fused) <= 1:
            try:
                sub = solve_ngon_one_unknown_length(SphericalPolygonSpec(tuple(angles), tuple(fused)))
            except (Unrealizable, SingularCase):
                return []
            reduced.append(list(sub.lengths))
        else:
            try:
                pair = solve_aaa(*angles)
            except (Unrealizable, SingularCase):
                return []
            for t in pair:
                cand = [t.c, t.a, t.b]
                if all(f is None or abs(f - c) < _FUSE_TOL for f, c in zip(fused, cand)):
                    reduced.append(cand)
    else:
        return []

    out = []
    for red in reduced:
        lengths = list(spec.lengths)
        ok = True
        for k, (start, end, edges, signs, hidden) in enumerate(runs):
            if not hidden:
                continue
            e = hidden[0]
            s_e = signs[edges.index(e)]
            known_sum = sum(s * spec.lengths[x] for x, s in zip(edges, signs) if x != e)
            value = (choice[k] * red[k] - known_sum) / s_e
            if not SINGULAR_BAND < value < TWO_PI - SINGULAR_BAND:
                ok = False
                break
            lengths[e] = value
        if ok:
            out.append(lengths)
    return out


# ----------------------------------------------------------------------
# Random generators
# ----------------------------------------------------------------------

def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.from_quat(unit(rng.normal(size=4))).as_matrix()


def random_convex_polygon(rng: np.random.Generator, n: int, budget: int = DEFAULT_REJECTION_BUDGET) -> SphericalPolygonRealization:
    """n points on a small circle at random azimuths, in random pose."""
    for _ in range(budget):
        radius = rng.uniform(0.15, 1.3)
        gaps = rng.uniform(0.35, 1.0, size=n)
        azimuth = np.cumsum(gaps / gaps.sum() * TWO_PI)
        pts = np.column_stack([
            np.sin(radius) * np.cos(azimuth),
            np.sin(radius) * np.sin(azimuth),
            np.full(n, np.cos(radius)),
        ])
        real = SphericalPolygonRealization.from_points(pts)
        angles = real.angles
        if np.all(angles > 1e-3) and np.all(angles < np.pi - 1e-3):
            return real.transformed(random_rotation(rng))
    raise FixtureError(f"no convex {n}-gon within {budget} samples")


def random_quadrilateral(
    rng: np.random.Generator,
    case: QuadCase | None = None,
    budget: int = 20_000,
    margin: float = 1e-3,
) -> tuple[SphericalPolygonRealization, int]:
    """
    Rejection-sample a quadrilateral with short arcs and clearly non-singular
    angles, and a known-edge index, whose case label matches ``case``.
    """
    for _ in range(budget):
        pts = rng.normal(size=(4, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        real = SphericalPolygonRealization.from_points(pts)
        lengths, angles = real.lengths, real.angles
        if np.any(lengths < margin) or np.any(lengths > np.pi - margin):
            continue
        if any(min(abs(a), abs(a - np.pi), abs(a - TWO_PI)) < margin for a in angles):
            continue
        j = int(rng.integers(4))
        rolled = [angles[(j + i) % 4] for i in range(4)]
        label, _ = classify_quadrilateral(rolled, is_self_intersecting(real))
        if case is None or label is case:
            return real, j
    raise FixtureError(f"no quadrilateral of case {case} within {budget} samples")

