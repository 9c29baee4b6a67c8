"""Coordinate systems, detector arrays, and beam-axis triangulation.

Directions are plain numpy 3-vectors of unit length; the transverse
plane of a camera gets a deterministic orthonormal basis so measurement
grids and ridge directions are reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateRidgeError,
    DegenerateTriangulationError,
    DomainError,
    NoSignalError,
)

UNIT_TOL = 1e-12
RIDGE_EIGENVALUE_RATIO = 1.05
PARALLEL_NORMAL_TOL = 1e-9


def unit_vector(v) -> np.ndarray:
    """Normalize ``v``; zero vectors are a domain error."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise DomainError("cannot normalize the zero vector")
    return v / n


def ensure_unit(v, tol: float = 1e-9) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError("direction must be a unit vector")
    return v


def stereographic_project(theta) -> np.ndarray:
    """Map a unit direction to the plane: (t1, t2) / (1 + t3).

    The south pole (0, 0, -1) is excluded.
    """
    theta = np.asarray(theta, dtype=float)
    denom = 1.0 + theta[..., 2]
    if np.any(np.abs(denom) < UNIT_TOL):
        raise DomainError("stereographic projection undefined at the south pole")
    return theta[..., :2] / denom[..., None]


def stereographic_inverse(v) -> np.ndarray:
    """Inverse map: (2 v, 1 - |v|^2) / (1 + |v|^2); always unit length."""
    v = np.asarray(v, dtype=float)
    sq = 1.0 + np.sum(v * v, axis=-1)
    out = np.empty(v.shape[:-1] + (3,))
    out[..., :2] = 2.0 * v / sq[..., None]
    out[..., 2] = (2.0 - sq) / sq
    return out


def to_pencil_coords(x, theta, eps: float):
    """Stretched coordinates: X = (x'/(2 eps), x3), V = S(theta)/eps."""
    if eps <= 0:
        raise DomainError("beam-width parameter must be positive")
    x = np.asarray(x, dtype=float)
    X = np.array([x[0] / (2.0 * eps), x[1] / (2.0 * eps), x[2]])
    V = stereographic_project(theta) / eps
    return X, V


def from_pencil_coords(X, V, eps: float):
    """Inverse of :func:`to_pencil_coords`."""
    if eps <= 0:
        raise DomainError("beam-width parameter must be positive")
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    x = np.array([2.0 * eps * X[0], 2.0 * eps * X[1], X[2]])
    theta = stereographic_inverse(eps * V)
    return x, theta


def orthonormal_basis(direction) -> tuple:
    """Two unit vectors spanning the plane orthogonal to ``direction``.

    Deterministic: the reference axis is the coordinate axis least
    aligned with the direction.
    """
    d = ensure_unit(direction)
    ref = np.zeros(3)
    ref[int(np.argmin(np.abs(d)))] = 1.0
    e1 = unit_vector(np.cross(d, ref))
    e2 = np.cross(d, e1)
    return e1, e2


@dataclass(frozen=True)
class Camera:
    """Circular detector array: disk of ``radius`` orthogonal to
    ``orientation`` centered at ``center``, sampled at ``pitch``."""

    center: np.ndarray
    orientation: np.ndarray
    radius: float
    pitch: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "orientation", ensure_unit(self.orientation))
        if self.radius <= 0:
            raise DomainError("camera radius must be positive")
        if not 0 < self.pitch < self.radius:
            raise DomainError("camera pitch must lie in (0, radius)")

    def in_plane_basis(self) -> tuple:
        return orthonormal_basis(self.orientation)

    def to_dict(self) -> dict:
        return {
            "center": list(map(float, self.center)),
            "orientation": list(map(float, self.orientation)),
            "radius": float(self.radius),
            "pitch": float(self.pitch),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(
            center=np.asarray(d["center"], dtype=float),
            orientation=unit_vector(d["orientation"]),
            radius=float(d["radius"]),
            pitch=float(d["pitch"]),
        )


@dataclass(frozen=True)
class DetectorPlane:
    """Plane through ``point`` with unit ``normal``."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "normal", ensure_unit(self.normal))


@dataclass(frozen=True)
class BeamAxis:
    """Line through ``point`` with unit ``direction``."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", ensure_unit(self.direction))


def camera_points(camera: Camera):
    """Measurement positions on the camera disk paired with its orientation.

    Returns (points, thetas): uniform in-plane grid at the camera pitch,
    clipped strictly inside the disk; every point satisfies
    (x - center) . orientation = 0.
    """
    e1, e2 = camera.in_plane_basis()
    k = np.arange(-int(np.floor(camera.radius / camera.pitch)),
                  int(np.floor(camera.radius / camera.pitch)) + 1)
    u, v = np.meshgrid(k * camera.pitch, k * camera.pitch, indexing="ij")
    keep = u**2 + v**2 < camera.radius**2
    u, v = u[keep], v[keep]
    points = camera.center[None, :] + u[:, None] * e1[None, :] + v[:, None] * e2[None, :]
    thetas = np.broadcast_to(camera.orientation, points.shape).copy()
    return points, thetas


def ridge_direction(camera: Camera, intensities) -> np.ndarray:
    """In-plane unit direction along which the measured spot extends.

    Intensity-weighted principal axis of the measurement grid; raises
    DegenerateRidgeError when the eigenvalue ratio falls below
    RIDGE_EIGENVALUE_RATIO (no preferred direction), NoSignalError on an
    all-zero input.  The sign is canonicalized; callers should treat the
    result as defined up to sign.
    """
    w = np.asarray(intensities, dtype=float)
    if np.any(w < 0):
        raise DomainError("intensities must be nonnegative")
    total = w.sum()
    if total == 0:
        raise NoSignalError("all measured intensities are zero")
    points, _ = camera_points(camera)
    if len(points) != len(w):
        raise DomainError("intensity count does not match the camera grid")
    e1, e2 = camera.in_plane_basis()
    rel = points - camera.center[None, :]
    uv = np.stack([rel @ e1, rel @ e2], axis=-1)
    mean = (w[:, None] * uv).sum(axis=0) / total
    centered = uv - mean
    cov = (w[:, None, None] * centered[:, :, None] * centered[:, None, :]).sum(axis=0) / total
    vals, vecs = np.linalg.eigh(cov)
    if vals[0] <= 0 or vals[1] / vals[0] < RIDGE_EIGENVALUE_RATIO:
        if vals[1] <= 0:
            raise NoSignalError("spot has no measurable extent")
        raise DegenerateRidgeError(
            f"eigenvalue ratio {vals[1] / max(vals[0], 1e-300):.4f} below "
            f"{RIDGE_EIGENVALUE_RATIO}; spot is rotationally symmetric"
        )
    principal = vecs[:, 1]
    direction = principal[0] * e1 + principal[1] * e2
    # canonical sign: largest-magnitude component positive
    lead = np.argmax(np.abs(direction))
    if direction[lead] < 0:
        direction = -direction
    return unit_vector(direction)


def detector_plane(camera: Camera, ridge) -> DetectorPlane:
    """Plane containing the beam axis, spanned by the camera orientation
    and the measured ridge direction."""
    n = np.cross(camera.orientation, np.asarray(ridge, dtype=float))
    norm = np.linalg.norm(n)
    if norm < PARALLEL_NORMAL_TOL:
        raise DegenerateTriangulationError("ridge parallel to camera orientation")
    return DetectorPlane(point=camera.center, normal=n / norm)


def intersect_planes(p: DetectorPlane, q: DetectorPlane) -> BeamAxis:
    """Line of intersection of two planes (minimum-norm point chosen)."""
    cross = np.cross(p.normal, q.normal)
    norm = np.linalg.norm(cross)
    if norm <= PARALLEL_NORMAL_TOL:
        raise DegenerateTriangulationError("detector planes are (nearly) parallel")
    direction = cross / norm
    A = np.stack([p.normal, q.normal])
    b = np.array([p.normal @ p.point, q.normal @ q.point])
    point, *_ = np.linalg.lstsq(A, b, rcond=None)
    return BeamAxis(point=point, direction=direction)


def triangulate_axis(planes) -> BeamAxis:
    """Beam axis from two or more detector planes.

    Pairwise plane intersections are combined by an equally weighted
    least-squares line fit; two planes reduce to a single intersection.
    """
    planes = list(planes)
    if len(planes) < 2:
        raise DomainError("triangulation needs at least two detector planes")
    lines = []
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            lines.append(intersect_planes(planes[i], planes[j]))
    if len(lines) == 1:
        return lines[0]
    ref = lines[0].direction
    dirs = np.array(
        [ln.direction if ln.direction @ ref >= 0 else -ln.direction for ln in lines]
    )
    direction = unit_vector(dirs.mean(axis=0))
    M = np.zeros((3, 3))
    rhs = np.zeros(3)
    for ln in lines:
        proj = np.eye(3) - np.outer(ln.direction, ln.direction)
        M += proj
        rhs += proj @ ln.point
    point, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    point = point - (point @ direction) * direction
    return BeamAxis(point=point, direction=direction)


def closest_point_between_lines(p1, d1, p2, d2):
    """Parameters (t1, t2) of the closest points ``p1 + t1 d1`` and
    ``p2 + t2 d2``; raises for parallel lines."""
    d1 = ensure_unit(d1)
    d2 = ensure_unit(d2)
    r = np.asarray(p2, dtype=float) - np.asarray(p1, dtype=float)
    a = d1 @ d2
    denom = 1.0 - a * a
    if denom < 1e-14:
        raise DegenerateTriangulationError("lines are (nearly) parallel")
    t1 = (r @ d1 - a * (r @ d2)) / denom
    t2 = (a * (r @ d1) - r @ d2) / denom
    return t1, t2
