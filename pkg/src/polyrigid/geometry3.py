# src/polyrigid/geometry3.py
"""
Ambient geometry for E^3, S^3 and H^3.

Points are numpy arrays: 3 coordinates in Euclidean space, 4 on the unit
sphere S^3 in R^4, and 4 on the upper sheet of the hyperboloid
<x, x> = -1 with the Minkowski form J = diag(-1, 1, 1, 1).

Orientation in S^3 and H^3 is det[p, a, b, c] for tangent vectors a, b, c
at p; at the basepoint e0 this is the ordinary det[a, b, c] of the last
three coordinates, so all three geometries share one convention.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from .config import ARCCOS_SLACK, MODEL_TOL, PLANARITY_TOL, SINGULAR_BAND, get_congruence_tol
from .errors import CollinearViolation, FaceNotPlanar, StructuralError, Unrealizable

logger = logging.getLogger(__name__)


class GeometryKind(str, Enum):
    EUCLIDEAN = "euclidean"
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"

    @property
    def dim(self) -> int:
        return 3 if self is GeometryKind.EUCLIDEAN else 4

    @property
    def form(self) -> np.ndarray:
        if self is GeometryKind.HYPERBOLIC:
            return MINKOWSKI
        return np.eye(self.dim)


MINKOWSKI = np.diag([-1.0, 1.0, 1.0, 1.0])


def basepoint(g: GeometryKind) -> np.ndarray:
    if g is GeometryKind.EUCLIDEAN:
        return np.zeros(3)
    return np.array([1.0, 0.0, 0.0, 0.0])


def tangent_at_basepoint(g: GeometryKind, direction: np.ndarray) -> np.ndarray:
    """Embed a direction of R^3 into the tangent space at the basepoint."""
    direction = np.asarray(direction, dtype=float)
    if g is GeometryKind.EUCLIDEAN:
        return direction
    return np.concatenate([[0.0], direction])


# ----------------------------------------------------------------------
# Model arithmetic
# ----------------------------------------------------------------------

def inner(g: GeometryKind, x: np.ndarray, y: np.ndarray) -> float:
    if g is GeometryKind.HYPERBOLIC:
        return float(-x[0] * y[0] + np.dot(x[1:], y[1:]))
    return float(np.dot(x, y))


def tangent_norm(g: GeometryKind, v: np.ndarray) -> float:
    return float(np.sqrt(max(inner(g, v, v), 0.0)))


def model_error(g: GeometryKind, p: np.ndarray) -> float:
    if g is GeometryKind.EUCLIDEAN:
        return 0.0
    if g is GeometryKind.SPHERICAL:
        return abs(float(np.dot(p, p)) - 1.0)
    err = abs(inner(g, p, p) + 1.0)
    return err if p[0] > 0 else np.inf


def project_to_model(g: GeometryKind, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if g is GeometryKind.SPHERICAL:
        return p / np.linalg.norm(p)
    if g is GeometryKind.HYPERBOLIC:
        rest = p[1:]
        return np.concatenate([[np.sqrt(1.0 + np.dot(rest, rest))], rest])
    return p


def tangent_project(g: GeometryKind, p: np.ndarray, v: np.ndarray) -> np.ndarray:
    if g is GeometryKind.EUCLIDEAN:
        return v
    if g is GeometryKind.SPHERICAL:
        return v - np.dot(p, v) * p
    return v + inner(g, p, v) * p


def distance(g: GeometryKind, p: np.ndarray, q: np.ndarray) -> float:
    """Geodesic distance, in the half-angle forms that stay accurate for close points."""
    if g is GeometryKind.EUCLIDEAN:
        return float(np.linalg.norm(q - p))
    d = q - p
    if g is GeometryKind.SPHERICAL:
        return float(2.0 * np.arctan2(np.linalg.norm(d), np.linalg.norm(p + q)))
    return float(2.0 * np.arcsinh(np.sqrt(max(inner(g, d, d), 0.0)) / 2.0))


def exp_map(g: GeometryKind, p: np.ndarray, direction: np.ndarray, t: float) -> np.ndarray:
    """Point at distance t from p along the geodesic with the given unit initial direction."""
    if t <= 0:
        raise ValueError(f"geodesic length must be positive, got {t!r}")
    d = tangent_project(g, p, np.asarray(direction, dtype=float))
    norm = tangent_norm(g, d)
    if norm < MODEL_TOL:
        raise ValueError("direction has no component tangent to p")
    d = d / norm
    if g is GeometryKind.EUCLIDEAN:
        return p + t * d
    if g is GeometryKind.SPHERICAL:
        return project_to_model(g, np.cos(t) * p + np.sin(t) * d)
    return project_to_model(g, np.cosh(t) * p + np.sinh(t) * d)


def log_map(g: GeometryKind, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Tangent vector at p pointing to q, with length distance(p, q)."""
    if g is GeometryKind.EUCLIDEAN:
        return q - p
    if g is GeometryKind.SPHERICAL:
        w = q - np.dot(p, q) * p
    else:
        w = q + inner(g, p, q) * p
    norm = tangent_norm(g, w)
    if norm < MODEL_TOL:
        return np.zeros_like(p)
    return distance(g, p, q) * w / norm


def tangent_angle(g: GeometryKind, p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    """Angle at p between the geodesics to q and to r."""
    u, v = log_map(g, p, q), log_map(g, p, r)
    uu, vv, uv = inner(g, u, u), inner(g, v, v), inner(g, u, v)
    return float(np.arctan2(np.sqrt(max(uu * vv - uv * uv, 0.0)), uv))


def _det4(p, a, b, c) -> float:
    return float(np.linalg.det(np.vstack([p, a, b, c])))


def _complement(g: GeometryKind, p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unit tangent c at p orthogonal to a, b with det[p, a, b, c] > 0."""
    if g is GeometryKind.EUCLIDEAN:
        return np.cross(a, b)
    cof = np.array([_det4(p, a, b, e) for e in np.eye(4)])
    c = MINKOWSKI @ cof if g is GeometryKind.HYPERBOLIC else cof
    return c / tangent_norm(g, c)


def tangent_frame(g: GeometryKind, p: np.ndarray) -> np.ndarray:
    """Rows: a positively oriented orthonormal basis of the tangent space at p."""
    if g is GeometryKind.EUCLIDEAN:
        return np.eye(3)
    basis: list[np.ndarray] = []
    for e in np.eye(4)[[1, 2, 3, 0]]:
        v = tangent_project(g, p, e)
        for b in basis:
            v = v - inner(g, v, b) * b
        norm = tangent_norm(g, v)
        if norm > 1e-6:
            basis.append(v / norm)
        if len(basis) == 2:
            break
    basis.append(_complement(g, p, basis[0], basis[1]))
    return np.vstack(basis)


def chart(g: GeometryKind, p: np.ndarray, points: Iterable[np.ndarray]) -> np.ndarray:
    """R^3 coordinates of log_p of each point in an oriented tangent basis at p."""
    frame = tangent_frame(g, p)
    rows = []
    for q in points:
        v = log_map(g, p, q)
        rows.append([inner(g, v, b) for b in frame])
    return np.array(rows, dtype=float).reshape(-1, 3)


# ----------------------------------------------------------------------
# Triangles, faces, dihedral angles
# ----------------------------------------------------------------------

def facial_angles_from_sides(g: GeometryKind, l1: float, l2: float, l3: float) -> tuple[float, float, float]:
    """Interior angles opposite l1, l2, l3 by the law of cosines of ``g``."""
    sides = (float(l1), float(l2), float(l3))
    if min(sides) <= 0:
        raise Unrealizable(f"side lengths must be positive, got {sides}")
    if g is GeometryKind.SPHERICAL and max(sides) >= np.pi:
        raise Unrealizable(f"spherical face sides must be below pi, got {sides}")
    scale = max(sides)
    for i in range(3):
        slack = sides[(i + 1) % 3] + sides[(i + 2) % 3] - sides[i]
        if slack < -1e-12 * scale:
            raise Unrealizable(f"sides {sides} break the triangle inequality")
        if slack <= 1e-12 * scale:
            raise CollinearViolation(f"sides {sides} describe collinear vertices", sides=sides)
    if g is GeometryKind.SPHERICAL:
        excess = 2 * np.pi - sum(sides)
        if excess < -1e-12:
            raise Unrealizable(f"spherical perimeter {sum(sides)} exceeds 2pi")
        if excess <= 1e-12:
            raise CollinearViolation(f"sides {sides} lie on one great circle", sides=sides)

    angles = []
    for i in range(3):
        a, b, c = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
        if g is GeometryKind.EUCLIDEAN:
            cos = (b * b + c * c - a * a) / (2 * b * c)
        elif g is GeometryKind.SPHERICAL:
            cos = (np.cos(a) - np.cos(b) * np.cos(c)) / (np.sin(b) * np.sin(c))
        else:
            cos = (np.cosh(b) * np.cosh(c) - np.cosh(a)) / (np.sinh(b) * np.sinh(c))
        if abs(cos) > 1 + ARCCOS_SLACK:
            raise Unrealizable(f"sides {sides} give cosine {cos} out of range")
        angles.append(float(np.arccos(np.clip(cos, -1.0, 1.0))))
    if min(angles) < MODEL_TOL or max(angles) > np.pi - MODEL_TOL:
        raise CollinearViolation(f"sides {sides} describe collinear vertices", sides=sides)
    return angles[0], angles[1], angles[2]


def newell_normal(coords: np.ndarray) -> np.ndarray:
    """Area-weighted normal of a closed polygon in R^3; outward for counterclockwise-from-outside cycles."""
    nxt = np.roll(coords, -1, axis=0)
    return np.array([
        np.sum((coords[:, 1] - nxt[:, 1]) * (coords[:, 2] + nxt[:, 2])),
        np.sum((coords[:, 2] - nxt[:, 2]) * (coords[:, 0] + nxt[:, 0])),
        np.sum((coords[:, 0] - nxt[:, 0]) * (coords[:, 1] + nxt[:, 1])),
    ])


def planarity_error(g: GeometryKind, points: Sequence[np.ndarray]) -> float:
    """Smallest singular value of the face's point cloud (centered in E^3, linear in S^3/H^3)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) <= 3:
        return 0.0
    if g is GeometryKind.EUCLIDEAN:
        pts = pts - pts.mean(axis=0)
        scale = max(1.0, float(np.abs(pts).max()))
        return float(np.linalg.svd(pts, compute_uv=False)[-1]) / scale
    return float(np.linalg.svd(pts, compute_uv=False)[-1])


def check_planar(g: GeometryKind, points: Sequence[np.ndarray], face=None, tol: float = PLANARITY_TOL) -> None:
    err = planarity_error(g, points)
    if err > tol:
        raise FaceNotPlanar(f"face {face} is not planar (deviation {err:.3e})", face=face, deviation=err)


def wedge_angle(w_left: np.ndarray, w_right: np.ndarray, e: np.ndarray) -> float:
    """Angle in [0, 2pi) from the right half-plane to the left one, through the interior."""
    return float(np.mod(np.arctan2(np.linalg.det(np.vstack([w_right, w_left, e])), np.dot(w_left, w_right)), 2 * np.pi))


def dihedral_at(g: GeometryKind, a: np.ndarray, b: np.ndarray,
                left_face: Sequence[np.ndarray], right_face: Sequence[np.ndarray]) -> float:
    """
    Interior dihedral angle at the edge a-b. ``left_face`` is the face on the
    left of the dart a->b seen from outside, ``right_face`` the other one;
    both listed counterclockwise from outside. Computed in the tangent chart at a.
    """
    left = chart(g, a, left_face)
    right = chart(g, a, right_face)
    e = chart(g, a, [b])[0]
    e = e / np.linalg.norm(e)
    n_left = newell_normal(left)
    n_right = newell_normal(right)
    n_left /= np.linalg.norm(n_left)
    n_right /= np.linalg.norm(n_right)
    return wedge_angle(np.cross(n_left, e), np.cross(e, n_right), e)


def is_singular(theta: float, band: float = SINGULAR_BAND) -> bool:
    return min(abs(theta), abs(theta - np.pi), abs(theta - 2 * np.pi)) < band


# ----------------------------------------------------------------------
# Realizations and isometries
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Realization:
    """Vertex id -> point in the model of ``geometry``."""

    geometry: GeometryKind
    coords: Mapping[int, np.ndarray]

    def __post_init__(self):
        g = GeometryKind(self.geometry)
        coords = {}
        for v in sorted(self.coords):
            p = np.asarray(self.coords[v], dtype=float)
            if p.shape != (g.dim,):
                raise StructuralError(f"vertex {v}: expected {g.dim} coordinates, got {p.shape}", vertex=v)
            err = model_error(g, p)
            if err > 1e-6:
                raise StructuralError(f"vertex {v} is off the {g.value} model by {err:.3e}", vertex=v)
            coords[int(v)] = project_to_model(g, p)
        ids = list(coords)
        pts = np.array([coords[v] for v in ids]).reshape(len(ids), g.dim)
        for i in range(len(ids)):
            close = np.linalg.norm(pts[i + 1:] - pts[i], axis=1) < MODEL_TOL
            if np.any(close):
                j = ids[i + 1 + int(np.argmax(close))]
                raise StructuralError(f"vertices {ids[i]} and {j} coincide", vertices=(ids[i], j))
            if g is GeometryKind.SPHERICAL:
                anti = np.linalg.norm(pts[i + 1:] + pts[i], axis=1) < 1e-9
                if np.any(anti):
                    j = ids[i + 1 + int(np.argmax(anti))]
                    raise StructuralError(f"vertices {ids[i]} and {j} are antipodal", vertices=(ids[i], j))
        object.__setattr__(self, "geometry", g)
        object.__setattr__(self, "coords", MappingProxyType(coords))

    @classmethod
    def from_array(cls, geometry: GeometryKind, array, ids: Sequence[int] | None = None) -> Realization:
        array = np.asarray(array, dtype=float)
        ids = list(range(len(array))) if ids is None else list(ids)
        return cls(GeometryKind(geometry), dict(zip(ids, array)))

    @property
    def vertices(self) -> list[int]:
        return list(self.coords)

    def point(self, v: int) -> np.ndarray:
        return self.coords[v]

    def array(self, order: Sequence[int] | None = None) -> np.ndarray:
        order = self.vertices if order is None else order
        return np.array([self.coords[v] for v in order])

    def transformed(self, iso: Isometry) -> Realization:
        return Realization(self.geometry, {v: iso.apply(p) for v, p in self.coords.items()})

    def distance(self, u: int, v: int) -> float:
        return distance(self.geometry, self.coords[u], self.coords[v])


@dataclass(frozen=True, eq=False)
class Isometry:
    """x -> matrix @ x + translation (translation only for E^3)."""

    geometry: GeometryKind
    matrix: np.ndarray
    translation: np.ndarray | None = None

    def apply(self, p: np.ndarray) -> np.ndarray:
        out = self.matrix @ p
        if self.translation is not None:
            out = out + self.translation
        return project_to_model(self.geometry, out)

    @property
    def reflected(self) -> bool:
        return bool(np.linalg.det(self.matrix) < 0)

    @classmethod
    def identity(cls, g: GeometryKind) -> Isometry:
        return cls(g, np.eye(g.dim), np.zeros(3) if g is GeometryKind.EUCLIDEAN else None)


@dataclass(frozen=True, eq=False)
class AlignResult:
    isometry: Isometry
    reflected: bool
    residual: float


def _frame_triple(g: GeometryKind, pts: np.ndarray) -> tuple[int, int, int]:
    """Anchor 0, the point farthest from it, and the point farthest off their geodesic."""
    far = [distance(g, pts[0], q) for q in pts]
    j = int(np.argmax(far))
    best, k = -1.0, -1
    if far[j] > MODEL_TOL:
        e = log_map(g, pts[0], pts[j])
        e = e / tangent_norm(g, e)
        for idx, q in enumerate(pts):
            w = log_map(g, pts[0], q)
            off = tangent_norm(g, w - inner(g, w, e) * e)
            if off > best:
                best, k = off, idx
    if best < 1e-9:
        raise CollinearViolation("alignment points are collinear")
    return 0, j, k


def point_frame(g: GeometryKind, p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """
    Columns: p (S^3/H^3 only) followed by an orthonormal tangent frame at p
    whose first vector points to q and second toward r.
    """
    a = log_map(g, p, q)
    a = a / tangent_norm(g, a)
    b = log_map(g, p, r)
    b = b - inner(g, b, a) * a
    norm = tangent_norm(g, b)
    if norm < 1e-12:
        raise CollinearViolation("frame points are collinear")
    b = b / norm
    c = _complement(g, p, a, b)
    cols = [a, b, c] if g is GeometryKind.EUCLIDEAN else [p, a, b, c]
    return np.column_stack(cols)


def _residual(g: GeometryKind, iso: Isometry, src: np.ndarray, dst: np.ndarray) -> float:
    return max(distance(g, iso.apply(s), t) for s, t in zip(src, dst))


_GENERATORS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _lie_element(g: GeometryKind, x: np.ndarray) -> np.ndarray:
    skew = np.zeros((4, 4))
    for (a, b), c in zip(_GENERATORS, x):
        skew[a, b], skew[b, a] = c, -c
    # J @ skew stays in the Lie algebra of the form J
    return g.form @ skew


def _fit_all_points(g: GeometryKind, matrix: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """
    Least-squares correction of a frame-based isometry over every point pair.

    The frame only sees three points, so noise on those three would otherwise
    decide the whole alignment. The correction is matrix @ expm(X) with X in
    the Lie algebra of the ambient form, which keeps the result an isometry.
    """
    def residuals(x):
        moved = src @ (matrix @ expm(_lie_element(g, x))).T
        return (moved - dst).ravel()

    fit = least_squares(residuals, np.zeros(len(_GENERATORS)), method="lm")
    return matrix @ expm(_lie_element(g, fit.x))


def align_candidates(g: GeometryKind, source, target) -> list[AlignResult]:
    """Best direct and best reflected isometry taking ``source`` onto ``target``."""
    src = np.asarray(source, dtype=float)
    dst = np.asarray(target, dtype=float)
    if src.shape != dst.shape or len(src) < 3:
        raise ValueError("align needs two equal-length lists of at least 3 points")
    out = []
    if g is GeometryKind.EUCLIDEAN:
        ca, cb = src.mean(axis=0), dst.mean(axis=0)
        centered = src - ca
        sv = np.linalg.svd(centered, compute_uv=False)
        if sv[1] < 1e-9 * max(1.0, sv[0]):
            raise CollinearViolation("alignment points are collinear")
        h = centered.T @ (dst - cb)
        u, _, vt = np.linalg.svd(h)
        v = vt.T
        d = np.sign(np.linalg.det(v @ u.T)) or 1.0
        for flip in (1.0, -1.0):
            rot = v @ np.diag([1.0, 1.0, d * flip]) @ u.T
            iso = Isometry(g, rot, cb - rot @ ca)
            out.append(AlignResult(iso, flip < 0, _residual(g, iso, src, dst)))
        return out

    i, j, k = _frame_triple(g, src)
    fs = point_frame(g, src[i], src[j], src[k])
    ft = point_frame(g, dst[i], dst[j], dst[k])
    form = g.form
    for flip in (1.0, -1.0):
        target_frame = ft.copy()
        target_frame[:, 3] *= flip
        matrix = _fit_all_points(g, target_frame @ form @ fs.T @ form, src, dst)
        iso = Isometry(g, matrix)
        out.append(AlignResult(iso, flip < 0, _residual(g, iso, src, dst)))
    return out


def align(g: GeometryKind, source, target, allow_reflection: bool = True) -> AlignResult:
    candidates = align_candidates(g, source, target)
    if not allow_reflection:
        candidates = [c for c in candidates if not c.reflected]
    return min(candidates, key=lambda c: c.residual)


def pose_isometry(g: GeometryKind, p: np.ndarray, q: np.ndarray, r: np.ndarray) -> Isometry:
    """Isometry taking p to the basepoint, q onto the first axis and r into the first quadrant."""
    frame = point_frame(g, p, q, r)
    if g is GeometryKind.EUCLIDEAN:
        rot = frame.T
        return Isometry(g, rot, -rot @ p)
    form = g.form
    return Isometry(g, np.eye(4) @ form @ frame.T @ form)


def normalize_pose(real: Realization) -> Realization:
    """Move the smallest vertex id to the basepoint and the next ones onto fixed axes."""
    ids = real.vertices
    pts = real.array(ids)
    _, j, k = _frame_triple(real.geometry, pts)
    iso = pose_isometry(real.geometry, pts[0], pts[j], pts[k])
    return real.transformed(iso)


@dataclass(frozen=True)
class CongruenceResult:
    congruent: bool
    reflected: bool
    residual: float
    witness: int | None = None

    def describe(self) -> str:
        if self.congruent:
            return f"congruent ({'reflected' if self.reflected else 'direct'})"
        return f"not congruent (residual {self.residual:.3e}, witness vertex {self.witness})"


def congruent(r1: Realization, r2: Realization, tol: float | None = None) -> CongruenceResult:
    """Decide whether an isometry of the model carries r1's vertices onto r2's."""
    tol = get_congruence_tol() if tol is None else tol
    if r1.geometry is not r2.geometry:
        raise ValueError("realizations live in different geometries")
    if set(r1.vertices) != set(r2.vertices):
        raise ValueError("realizations have different vertex sets")
    ids = r1.vertices
    best = align(r1.geometry, r1.array(ids), r2.array(ids))
    witness = None
    if best.residual > tol:
        for v in ids:
            if distance(r1.geometry, best.isometry.apply(r1.point(v)), r2.point(v)) > tol:
                witness = v
                break
    return CongruenceResult(best.residual <= tol, best.reflected, best.residual, witness)


def dihedral_angle(
    real: Realization,
    edge: tuple[int, int],
    left_face: Sequence[int],
    right_face: Sequence[int],
    at: int | None = None,
) -> float:
    """
    Dihedral angle of ``real`` at ``edge`` = (a, b), where ``left_face`` lies
    left of the dart a->b. ``at`` picks the endpoint the angle is evaluated
    from; both give the same value on planar faces.
    """
    g = real.geometry
    for face in (left_face, right_face):
        check_planar(g, [real.point(v) for v in face], face=tuple(face))
    a, b = edge
    left = [real.point(v) for v in left_face]
    right = [real.point(v) for v in right_face]
    if at is None or at == a:
        return dihedral_at(g, real.point(a), real.point(b), left, right)
    # seen from b the dart is b->a, which swaps the sides
    return dihedral_at(g, real.point(b), real.point(a), right, left)
