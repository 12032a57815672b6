"""Geometric predicates and measurements on analytic B-rep models.

Every function here is a pure function of a ``Model`` and a ``Tolerances``
record.  Per-face parameter-space polygons are memoised on the model's
private cache because ray casting tests them repeatedly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .brep import (
    ROTATIONAL,
    CircularArc,
    Coedge,
    Cone,
    Cylinder,
    Edge,
    Face,
    LoopKind,
    Model,
    Plane,
    Sphere,
    Surface,
    Torus,
    adjacent_faces,
)

TWO_PI = 2.0 * math.pi


class Convexity(str, Enum):
    CONVEX = "CONVEX"
    CONCAVE = "CONCAVE"


class ContinuityClass(str, Enum):
    C0 = "C0"
    HIGHER = "HIGHER"


class AngleClass(str, Enum):
    PARALLEL = "PARALLEL"
    PERPENDICULAR = "PERPENDICULAR"
    ACUTE = "ACUTE"
    OBTUSE = "OBTUSE"


class NotAdjacent(ValueError):
    pass


class ZeroVector(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    angular_tol: float = 1e-6
    length_tol_rel: float = 1e-7
    ray_epsilon: float = 1e-6

    def __post_init__(self):
        for name in ("angular_tol", "length_tol_rel", "ray_epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def length(self, model: Model) -> float:
        return self.length_tol_rel * model.diagonal()


DEFAULT_TOL = Tolerances()


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ZeroVector("zero-length vector")
    return v / n


def frame(axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic right-handed frame (e1, e2, axis)."""
    a = _unit(axis)
    helper = np.eye(3)[int(np.argmin(np.abs(a)))]
    e1 = _unit(helper - a * (helper @ a))
    e2 = np.cross(a, e1)
    return e1, e2, a


# --------------------------------------------------------------------------
# Surfaces
# --------------------------------------------------------------------------


def natural_normal(surface: Surface, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if isinstance(surface, Plane):
        return np.array(surface.normal)
    if isinstance(surface, Cylinder):
        a = np.array(surface.axis)
        d = p - surface.origin
        return _unit(d - a * (d @ a))
    if isinstance(surface, Cone):
        a = np.array(surface.axis)
        d = p - surface.apex
        radial = _unit(d - a * (d @ a))
        return math.cos(surface.half_angle) * radial - math.sin(surface.half_angle) * a
    if isinstance(surface, Sphere):
        return _unit(p - surface.center)
    if isinstance(surface, Torus):
        a = np.array(surface.axis)
        d = p - surface.center
        radial = _unit(d - a * (d @ a))
        tube = np.asarray(surface.center) + surface.major_radius * radial
        return _unit(p - tube)
    raise TypeError(surface)


def face_normal(face: Face, p) -> np.ndarray:
    """Outward (out-of-material) unit normal of ``face`` at ``p``."""
    n = natural_normal(face.surface, p)
    return n if face.sense else -n


def project(surface: Surface, p) -> np.ndarray:
    """Closest point on the (untrimmed) surface."""
    p = np.asarray(p, dtype=float)
    if isinstance(surface, Plane):
        n = np.array(surface.normal)
        return p - n * ((p - surface.origin) @ n)
    if isinstance(surface, Cylinder):
        a = np.array(surface.axis)
        d = p - surface.origin
        h = d @ a
        return np.asarray(surface.origin) + a * h + surface.radius * _unit(d - a * h)
    if isinstance(surface, Cone):
        a = np.array(surface.axis)
        d = p - surface.apex
        radial = _unit(d - a * (d @ a))
        g = math.cos(surface.half_angle) * a + math.sin(surface.half_angle) * radial
        return np.asarray(surface.apex) + g * max(0.0, float(d @ g))
    if isinstance(surface, Sphere):
        return np.asarray(surface.center) + surface.radius * _unit(p - surface.center)
    if isinstance(surface, Torus):
        a = np.array(surface.axis)
        d = p - surface.center
        radial = _unit(d - a * (d @ a))
        tube = np.asarray(surface.center) + surface.major_radius * radial
        return tube + surface.minor_radius * _unit(p - tube)
    raise TypeError(surface)


@lru_cache(maxsize=4096)
def _surface_frame(surface: Surface):
    if isinstance(surface, Plane):
        return frame(surface.normal)
    if isinstance(surface, Sphere):
        return frame((0.0, 0.0, 1.0))
    return frame(surface.axis)


def to_uv(surface: Surface, pts) -> np.ndarray:
    """Map points (N, 3) to surface parameters (N, 2).

    The parameter frame is oriented so that d/du x d/dv points along the
    natural normal; the first coordinate of rotational surfaces is an angle.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    e1, e2, a = _surface_frame(surface)
    if isinstance(surface, Plane):
        d = pts - surface.origin
        return np.stack([d @ e1, d @ e2], axis=1)
    if isinstance(surface, Cylinder):
        d = pts - surface.origin
        return np.stack([np.arctan2(d @ e2, d @ e1), d @ a], axis=1)
    if isinstance(surface, Cone):
        d = pts - surface.apex
        return np.stack([np.arctan2(d @ e2, d @ e1), d @ a], axis=1)
    if isinstance(surface, Sphere):
        d = pts - surface.center
        z = np.clip((d @ a) / surface.radius, -1.0, 1.0)
        return np.stack([np.arctan2(d @ e2, d @ e1), np.arcsin(z)], axis=1)
    if isinstance(surface, Torus):
        d = pts - surface.center
        h = d @ a
        rho = np.hypot(d @ e1, d @ e2)
        return np.stack([np.arctan2(d @ e2, d @ e1), np.arctan2(h, rho - surface.major_radius)], axis=1)
    raise TypeError(surface)


def from_uv(surface: Surface, u: float, v: float) -> np.ndarray:
    e1, e2, a = _surface_frame(surface)
    if isinstance(surface, Plane):
        return np.asarray(surface.origin) + u * e1 + v * e2
    radial = math.cos(u) * e1 + math.sin(u) * e2
    if isinstance(surface, Cylinder):
        return np.asarray(surface.origin) + surface.radius * radial + v * a
    if isinstance(surface, Cone):
        return np.asarray(surface.apex) + v * a + v * math.tan(surface.half_angle) * radial
    if isinstance(surface, Sphere):
        return np.asarray(surface.center) + surface.radius * (math.cos(v) * radial + math.sin(v) * a)
    if isinstance(surface, Torus):
        return (
            np.asarray(surface.center)
            + (surface.major_radius + surface.minor_radius * math.cos(v)) * radial
            + surface.minor_radius * math.sin(v) * a
        )
    raise TypeError(surface)


def _periods(surface: Surface) -> tuple[float | None, float | None]:
    if isinstance(surface, Plane):
        return None, None
    if isinstance(surface, Torus):
        return TWO_PI, TWO_PI
    return TWO_PI, None


# --------------------------------------------------------------------------
# Edges
# --------------------------------------------------------------------------


def _arc_frame(model: Model, edge: Edge):
    key = ("arc", edge.id)
    if key not in model._cache:
        model._cache[key] = _arc_frame_uncached(model, edge)
    return model._cache[key]


def _arc_frame_uncached(model: Model, edge: Edge):
    arc = edge.curve
    c = np.array(arc.center)
    a = np.array(arc.axis)
    u0 = _unit(model.point(edge.start) - c)
    v0 = np.cross(a, u0)
    if edge.start == edge.end:
        sweep = TWO_PI
    else:
        d = model.point(edge.end) - c
        sweep = math.atan2(float(d @ v0), float(d @ u0))
        if sweep <= 1e-12:
            sweep += TWO_PI
    return c, u0, v0, sweep


def edge_point(model: Model, edge: Edge, t: float) -> np.ndarray:
    if isinstance(edge.curve, CircularArc):
        c, u0, v0, sw = _arc_frame(model, edge)
        ang = t * sw
        return c + edge.curve.radius * (math.cos(ang) * u0 + math.sin(ang) * v0)
    p0, p1 = model.point(edge.start), model.point(edge.end)
    return p0 + t * (p1 - p0)


def edge_tangent(model: Model, edge: Edge, t: float) -> np.ndarray:
    if isinstance(edge.curve, CircularArc):
        _, u0, v0, sw = _arc_frame(model, edge)
        ang = t * sw
        return -math.sin(ang) * u0 + math.cos(ang) * v0
    return _unit(model.point(edge.end) - model.point(edge.start))


def edge_length(model: Model, edge: Edge) -> float:
    if isinstance(edge.curve, CircularArc):
        return edge.curve.radius * _arc_frame(model, edge)[3]
    return float(np.linalg.norm(model.point(edge.end) - model.point(edge.start)))


def coedge_samples(model: Model, ce: Coedge, per_turn: int = 96) -> np.ndarray:
    """Points along the coedge in its direction, end point excluded."""
    edge = model.edge_map[ce.edge]
    if isinstance(edge.curve, CircularArc):
        n = max(8, int(math.ceil(_arc_frame(model, edge)[3] / TWO_PI * per_turn)))
    else:
        n = 4
    ts = np.linspace(0.0, 1.0, n + 1)[:-1]
    if ce.reversed:
        ts = 1.0 - np.linspace(0.0, 1.0, n + 1)[:-1]
    return np.array([edge_point(model, edge, t) for t in ts])


def loop_points(model: Model, face: Face, loop_index: int) -> np.ndarray:
    return np.vstack([coedge_samples(model, ce) for ce in face.loops[loop_index].coedges])


def _unwrap(uv: np.ndarray, surface: Surface) -> np.ndarray:
    pu, pv = _periods(surface)
    uv = uv.copy()
    if pu:
        uv[:, 0] = np.unwrap(uv[:, 0], period=pu)
    if pv:
        uv[:, 1] = np.unwrap(uv[:, 1], period=pv)
    return uv


def face_uv_loops(model: Model, face: Face) -> list[np.ndarray]:
    """Parameter-space polygons of each loop, unwrapped and aligned so that
    inner loops sit inside the outer loop's period window."""
    key = ("uv", face.id)
    if key in model._cache:
        return model._cache[key]
    polys = []
    for li in range(len(face.loops)):
        polys.append(_unwrap(to_uv(face.surface, loop_points(model, face, li)), face.surface))
    outer_idx = next((i for i, lp in enumerate(face.loops) if lp.kind is LoopKind.OUTER), 0)
    pu, pv = _periods(face.surface)
    ref = polys[outer_idx]
    for i, poly in enumerate(polys):
        if i == outer_idx:
            continue
        for k, period in ((0, pu), (1, pv)):
            if period:
                lo = ref[:, k].min()
                shift = math.floor((poly[:, k].mean() - lo) / period) * period
                poly[:, k] -= shift
    model._cache[key] = polys
    return polys


def _crossings(poly: np.ndarray, pt) -> bool:
    x, y = pt
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cond = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return bool(np.count_nonzero(cond & (x < xi)) % 2)


def point_in_face(model: Model, face: Face, p) -> bool:
    """Is the surface point ``p`` inside the trimmed face (even-odd rule)?"""
    return _uv_in_face(model, face, to_uv(face.surface, p)[0])


def _uv_in_face(model: Model, face: Face, uv) -> bool:
    polys = face_uv_loops(model, face)
    pu, pv = _periods(face.surface)
    allpts = np.vstack(polys)
    cand_u = [uv[0]]
    cand_v = [uv[1]]
    if pu:
        cand_u = _shifted(uv[0], allpts[:, 0], pu)
    if pv:
        cand_v = _shifted(uv[1], allpts[:, 1], pv)
    for cu in cand_u:
        for cv in cand_v:
            if sum(_crossings(poly, (cu, cv)) for poly in polys) % 2:
                return True
    return False


def _shifted(x: float, values: np.ndarray, period: float) -> list[float]:
    lo, hi = values.min(), values.max()
    k0 = math.floor((lo - x) / period)
    out = []
    for k in range(k0, k0 + 3):
        c = x + k * period
        if lo - 1e-12 <= c <= hi + 1e-12:
            out.append(c)
    return out or [x]


def face_center(model: Model, face: Face) -> np.ndarray:
    """Surface point at the centre of the outer loop's parameter box."""
    key = ("center", face.id)
    if key not in model._cache:
        outer = next(i for i, lp in enumerate(face.loops) if lp.kind is LoopKind.OUTER)
        poly = face_uv_loops(model, face)[outer]
        u = 0.5 * (poly[:, 0].min() + poly[:, 0].max())
        v = 0.5 * (poly[:, 1].min() + poly[:, 1].max())
        model._cache[key] = from_uv(face.surface, u, v)
    return model._cache[key]


# --------------------------------------------------------------------------
# Ray casting
# --------------------------------------------------------------------------


def _quadratic(a: float, b: float, c: float) -> list[float]:
    if abs(a) < 1e-300:
        return [] if abs(b) < 1e-300 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(s, b))
    roots = [q / a]
    if q != 0:
        roots.append(c / q)
    return roots


def ray_surface(surface: Surface, p, d) -> list[float]:
    """Ray parameters of all intersections with the untrimmed surface."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    if isinstance(surface, Plane):
        n = np.array(surface.normal)
        den = float(d @ n)
        if abs(den) < 1e-15:
            return []
        return [float((np.asarray(surface.origin) - p) @ n) / den]
    if isinstance(surface, Cylinder):
        a = np.array(surface.axis)
        q = p - surface.origin
        qp = q - a * (q @ a)
        dp = d - a * (d @ a)
        return _quadratic(float(dp @ dp), 2 * float(qp @ dp), float(qp @ qp) - surface.radius**2)
    if isinstance(surface, Cone):
        a = np.array(surface.axis)
        q = p - surface.apex
        c2 = math.cos(surface.half_angle) ** 2
        da, qa = float(d @ a), float(q @ a)
        roots = _quadratic(da * da - c2 * float(d @ d), 2 * (da * qa - c2 * float(d @ q)), qa * qa - c2 * float(q @ q))
        return [t for t in roots if qa + t * da > 0]
    if isinstance(surface, Sphere):
        q = p - surface.center
        return _quadratic(float(d @ d), 2 * float(q @ d), float(q @ q) - surface.radius**2)
    if isinstance(surface, Torus):
        a = np.array(surface.axis)
        q = p - surface.center
        R, r = surface.major_radius, surface.minor_radius
        dd = float(d @ d)
        b = float(q @ d)
        c0 = float(q @ q) + R * R - r * r
        dperp = d - a * (d @ a)
        qperp = q - a * (q @ a)
        al, be, ga = float(dperp @ dperp), float(qperp @ dperp), float(qperp @ qperp)
        coeffs = [
            dd * dd,
            4 * b * dd,
            4 * b * b + 2 * c0 * dd - 4 * R * R * al,
            4 * b * c0 - 8 * R * R * be,
            c0 * c0 - 4 * R * R * ga,
        ]
        roots = np.roots(coeffs)
        scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
        return [float(t.real) for t in roots if abs(t.imag) <= 1e-7 * scale]
    raise TypeError(surface)


def ray_hits(model: Model, origin, direction, exclude: frozenset[int] = frozenset(), t_min: float | None = None):
    """Sorted (t, face_id) for every trimmed-face hit with t > t_min."""
    if t_min is None:
        t_min = 1e-9 * model.diagonal()
    d = _unit(direction)
    hits = []
    for f in model.faces:
        if f.id in exclude:
            continue
        for t in ray_surface(f.surface, origin, d):
            if t > t_min and point_in_face(model, f, np.asarray(origin) + t * d):
                hits.append((t, f.id))
    hits.sort()
    return hits


_PARITY_DIRS = (
    _unit((0.5377, 0.2294, 0.8117)),
    _unit((-0.3119, 0.8731, -0.3747)),
    _unit((0.7071, -0.4183, -0.5702)),
)


def point_in_solid(model: Model, p) -> bool:
    """Ray-parity inside test, majority vote over three skew directions."""
    votes = 0
    for d in _PARITY_DIRS:
        hits = ray_hits(model, p, d, t_min=0.0)
        # coincident hits (ray through an edge) count once
        ts = []
        for t, _ in hits:
            if not ts or t - ts[-1] > 1e-9 * model.diagonal():
                ts.append(t)
        votes += len(ts) % 2
    return votes >= 2


# --------------------------------------------------------------------------
# Predicates
# --------------------------------------------------------------------------


def _coedge_on(model: Model, face_id: int, edge_id: int) -> Coedge | None:
    for ce in model.iter_coedges(face_id):
        if ce.edge == edge_id:
            return ce
    return None


def convexity(model: Model, fa: int, fb: int, coedge: Coedge, tol: Tolerances = DEFAULT_TOL) -> Convexity:
    """Convexity of the edge under ``coedge`` (a coedge of face ``fa``)."""
    face_a, face_b = model.face(fa), model.face(fb)
    if _coedge_on(model, fa, coedge.edge) is None or _coedge_on(model, fb, coedge.edge) is None:
        raise NotAdjacent(f"faces {fa} and {fb} do not share edge {coedge.edge}")
    edge = model.edge_map[coedge.edge]
    m = edge_point(model, edge, 0.5)
    dc = edge_tangent(model, edge, 0.5) * (-1.0 if coedge.reversed else 1.0)
    na, nb = face_normal(face_a, m), face_normal(face_b, m)
    val = float(dc @ np.cross(na, nb))
    if val > tol.angular_tol:
        return Convexity.CONVEX
    if val < -tol.angular_tol:
        return Convexity.CONCAVE
    return _smooth_convexity(model, face_a, face_b, m, dc, na, nb)


def _smooth_convexity(model, face_a, face_b, m, dc, na, nb) -> Convexity:
    # Probe into each face interior, then test the chord midpoint for material.
    step = min(0.01 * model.diagonal(), 0.25 * face_width(model, face_a.id), 0.25 * face_width(model, face_b.id))
    pa = project(face_a.surface, m + step * np.cross(na, dc))
    pb = project(face_b.surface, m + step * np.cross(nb, -dc))
    mid = 0.5 * (pa + pb)
    return Convexity.CONVEX if point_in_solid(model, mid) else Convexity.CONCAVE


def continuity(model: Model, fa: int, fb: int, edge_id: int, tol: Tolerances = DEFAULT_TOL) -> ContinuityClass:
    face_a, face_b = model.face(fa), model.face(fb)
    if _coedge_on(model, fa, edge_id) is None or _coedge_on(model, fb, edge_id) is None:
        raise NotAdjacent(f"faces {fa} and {fb} do not share edge {edge_id}")
    edge = model.edge_map[edge_id]
    limit = math.cos(tol.angular_tol)
    for t in (0.25, 0.5, 0.75):
        p = edge_point(model, edge, t)
        if float(face_normal(face_a, p) @ face_normal(face_b, p)) < limit - 1e-15:
            return ContinuityClass.C0
    return ContinuityClass.HIGHER


def base_vector(model: Model, face_id: int) -> np.ndarray:
    face = model.face(face_id)
    s = face.surface
    if isinstance(s, (Cylinder, Cone, Torus)):
        return np.array(s.axis)
    return face_normal(face, face_center(model, face))


def angle_class(v1, v2, tol: Tolerances = DEFAULT_TOL, fold: bool = True) -> AngleClass:
    a, b = _unit(v1), _unit(v2)
    theta = math.acos(max(-1.0, min(1.0, float(a @ b))))
    if fold or theta <= tol.angular_tol or abs(theta - math.pi) <= tol.angular_tol:
        theta = min(theta, math.pi - theta)
    if theta <= tol.angular_tol:
        return AngleClass.PARALLEL
    if abs(theta - math.pi / 2) <= tol.angular_tol:
        return AngleClass.PERPENDICULAR
    return AngleClass.ACUTE if theta < math.pi / 2 else AngleClass.OBTUSE


def _axis_line(surface: Surface):
    if isinstance(surface, Cylinder):
        return np.array(surface.origin), np.array(surface.axis)
    if isinstance(surface, Cone):
        return np.array(surface.apex), np.array(surface.axis)
    if isinstance(surface, Torus):
        return np.array(surface.center), np.array(surface.axis)
    return None


def coaxial(model: Model, f1: int, f2: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    l1 = _axis_line(model.face(f1).surface)
    l2 = _axis_line(model.face(f2).surface)
    if l1 is None or l2 is None:
        return False
    (p1, a1), (p2, a2) = l1, l2
    if abs(float(a1 @ a2)) < math.cos(tol.angular_tol):
        return False
    d = p2 - p1
    off = d - a1 * (d @ a1)
    return float(np.linalg.norm(off)) <= max(tol.length(model), 1e-9)


def _distinct_adjacent(model: Model, face_id: int, kind: LoopKind) -> list[int]:
    out = []
    for fid, _ in adjacent_faces(model, face_id, kind):
        if fid != face_id and fid not in out:
            out.append(fid)
    return out


def parallel_pair(model: Model, face_id: int, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float | None]:
    """Narrowest pair of outer-loop neighbour planes whose outward normals
    face each other.  Returns (found, width)."""
    planes = []
    for fid in _distinct_adjacent(model, face_id, LoopKind.OUTER):
        f = model.face(fid)
        if isinstance(f.surface, Plane):
            n = np.array(f.surface.normal) * (1.0 if f.sense else -1.0)
            planes.append((np.array(f.surface.origin), n))
    limit = math.cos(tol.angular_tol)
    best = None
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            (o1, n1), (o2, n2) = planes[i], planes[j]
            if float(n1 @ n2) > -limit:
                continue
            w = float((o2 - o1) @ n1)
            if w > tol.length(model):
                best = w if best is None else min(best, w)
    return (best is not None, best)


def face_width(model: Model, face_id: int) -> float:
    """Radius for cylinders, spheres and tori (minor radius); slant extent
    for cones; for planes the short side of the minimum-area rectangle
    enclosing the outer loop."""
    key = ("width", face_id)
    if key in model._cache:
        return model._cache[key]
    face = model.face(face_id)
    s = face.surface
    outer = next(i for i, lp in enumerate(face.loops) if lp.kind is LoopKind.OUTER)
    if isinstance(s, (Cylinder, Sphere)):
        w = s.radius
    elif isinstance(s, Torus):
        w = s.minor_radius
    elif isinstance(s, Cone):
        pts = loop_points(model, face, outer)
        slant = ((pts - s.apex) @ np.array(s.axis)) / math.cos(s.half_angle)
        w = float(slant.max() - slant.min())
    else:
        w = min_rect_width(to_uv(s, loop_points(model, face, outer)))
    model._cache[key] = w
    return w


def min_rect_width(pts2d: np.ndarray) -> float:
    """Short side of the minimum-area enclosing rectangle (rotating calipers
    over the convex hull edges)."""
    pts2d = np.asarray(pts2d, dtype=float)
    try:
        hull = pts2d[ConvexHull(pts2d).vertices]
    except (QhullError, ValueError):
        span = pts2d.max(axis=0) - pts2d.min(axis=0)
        return float(span.min())
    best_area, best_short = math.inf, 0.0
    for i in range(len(hull)):
        e = hull[(i + 1) % len(hull)] - hull[i]
        n = np.linalg.norm(e)
        if n == 0:
            continue
        ux = e / n
        uy = np.array([-ux[1], ux[0]])
        px, py = hull @ ux, hull @ uy
        w, h = px.max() - px.min(), py.max() - py.min()
        if w * h < best_area - 1e-12:
            best_area, best_short = w * h, min(w, h)
    return float(best_short)


def face_ray_origin(model: Model, face: Face) -> np.ndarray:
    """Parameter-domain centre of the face, or the nearest point of the face
    to it when the centre falls in a hole of the face."""
    key = ("ray_origin", face.id)
    if key in model._cache:
        return model._cache[key]
    c = face_center(model, face)
    if not point_in_face(model, face, c):
        outer = next(i for i, lp in enumerate(face.loops) if lp.kind is LoopKind.OUTER)
        poly = face_uv_loops(model, face)[outer]
        lo, hi = poly.min(axis=0), poly.max(axis=0)
        mid = 0.5 * (lo + hi)
        grid = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], 41)[1:-1], np.linspace(lo[1], hi[1], 41)[1:-1]), -1).reshape(-1, 2)
        grid = grid[np.argsort(np.linalg.norm((grid - mid) / np.maximum(hi - lo, 1e-12), axis=1), kind="stable")]
        for u, v in grid:
            if _uv_in_face(model, face, (u, v)):
                c = from_uv(face.surface, float(u), float(v))
                break
    model._cache[key] = c
    return c


def interference(model: Model, face_id: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Does a ray from the face centre along its outward normal hit another face?"""
    face = model.face(face_id)
    c = face_ray_origin(model, face)
    n = face_normal(face, c)
    origin = c + tol.ray_epsilon * model.diagonal() * n
    return bool(ray_hits(model, origin, n, exclude=frozenset({face_id}), t_min=0.0))


def is_rotational(face: Face) -> bool:
    return isinstance(face.surface, ROTATIONAL)
