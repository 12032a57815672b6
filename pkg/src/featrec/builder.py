"""Low-level construction of valid B-rep models from boundary segments.

Faces are described by a surface, a sense flag and loops of 3D segments given
in any order and direction.  :class:`Builder` merges coincident vertices,
shares edges between faces, chains each loop and orients it so that the face
interior lies to the left of every coedge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .brep import (
    CircularArc,
    Coedge,
    Cone,
    Cylinder,
    Edge,
    Face,
    Line,
    Loop,
    LoopKind,
    Model,
    Plane,
    Surface,
    Torus,
    Vertex,
    check,
)
from .geom import _unwrap, loop_points, to_uv

TWO_PI = 2.0 * math.pi
_MERGE_TOL = 1e-6


class ConstructionError(ValueError):
    pass


def _arr(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


@dataclass(frozen=True, eq=False)
class Seg:
    """A boundary segment: a line, or an arc running counter-clockwise about
    ``axis`` from ``a`` to ``b`` (a full circle when ``a`` equals ``b``)."""

    a: np.ndarray
    b: np.ndarray
    center: np.ndarray | None = None
    axis: np.ndarray | None = None
    radius: float | None = None

    @classmethod
    def line(cls, a, b) -> "Seg":
        return cls(_arr(a), _arr(b))

    @classmethod
    def arc(cls, center, axis, a, b) -> "Seg":
        c = _arr(center)
        ax = _arr(axis) / np.linalg.norm(axis)
        return cls(_arr(a), _arr(b), c, ax, float(np.linalg.norm(_arr(a) - c)))

    @property
    def is_arc(self) -> bool:
        return self.center is not None

    def midpoint(self) -> np.ndarray:
        if not self.is_arc:
            return 0.5 * (self.a + self.b)
        u0 = (self.a - self.center) / self.radius
        v0 = np.cross(self.axis, u0)
        if np.linalg.norm(self.a - self.b) < _MERGE_TOL:
            sweep = TWO_PI
        else:
            d = self.b - self.center
            sweep = math.atan2(float(d @ v0), float(d @ u0))
            if sweep <= 1e-12:
                sweep += TWO_PI
        h = 0.5 * sweep
        return self.center + self.radius * (math.cos(h) * u0 + math.sin(h) * v0)


def polyline(points, closed: bool = True) -> list[Seg]:
    pts = [_arr(p) for p in points]
    n = len(pts)
    stop = n if closed else n - 1
    return [Seg.line(pts[i], pts[(i + 1) % n]) for i in range(stop)]


def circle(center, axis, radius: float, ref, split: bool = False) -> list[Seg]:
    """Circle about ``axis`` starting at the direction ``ref``; optionally
    split into two half arcs."""
    c, ax = _arr(center), _arr(axis) / np.linalg.norm(axis)
    r0 = _arr(ref) - (_arr(ref) @ ax) * ax
    r0 /= np.linalg.norm(r0)
    p0 = c + radius * r0
    if not split:
        return [Seg.arc(c, ax, p0, p0)]
    p1 = c - radius * r0
    return [Seg.arc(c, ax, p0, p1), Seg.arc(c, ax, p1, p0)]


@dataclass(eq=False)
class FaceRec:
    surface: Surface
    sense: bool
    loops: list[list[Seg]]
    id: int = 0
    note: str = ""


@dataclass
class Builder:
    faces: list[FaceRec] = field(default_factory=list)

    def face(self, surface: Surface, sense: bool, outer: Sequence[Seg], inner: Sequence[Sequence[Seg]] = (), note: str = "") -> FaceRec:
        rec = FaceRec(surface, sense, [list(outer)] + [list(lp) for lp in inner], len(self.faces) + 1, note)
        self.faces.append(rec)
        return rec

    def plane(self, origin, normal, outer: Sequence[Seg], inner: Sequence[Sequence[Seg]] = (), note: str = "") -> FaceRec:
        return self.face(Plane(tuple(origin), tuple(normal)), True, outer, inner, note)

    # ------------------------------------------------------------------
    def build(self, validate: bool = True) -> Model:
        points: list[np.ndarray] = []

        def vid(p: np.ndarray) -> int:
            for i, q in enumerate(points):
                if np.linalg.norm(p - q) < _MERGE_TOL:
                    return i + 1
            points.append(p)
            return len(points)

        edges: list[Edge] = []
        lookup: dict[tuple, list[tuple[np.ndarray, int]]] = {}
        face_edge_loops: list[list[list[int]]] = []
        for rec in self.faces:
            loops = []
            for segs in rec.loops:
                ids = []
                for s in segs:
                    va, vb = vid(s.a), vid(s.b)
                    key = (s.is_arc, min(va, vb), max(va, vb))
                    mid = s.midpoint()
                    found = next((eid for m, eid in lookup.get(key, []) if np.linalg.norm(m - mid) < 1e-5), None)
                    if found is None:
                        curve = CircularArc(tuple(s.center), tuple(s.axis), s.radius) if s.is_arc else Line()
                        found = len(edges) + 1
                        edges.append(Edge(found, curve, va, vb))
                        lookup.setdefault(key, []).append((mid, found))
                    ids.append(found)
                loops.append(ids)
            face_edge_loops.append(loops)

        vertices = tuple(Vertex(i + 1, tuple(float(c) for c in p)) for i, p in enumerate(points))
        edge_map = {e.id: e for e in edges}
        faces = []
        for rec, loops in zip(self.faces, face_edge_loops):
            built = []
            for li, ids in enumerate(loops):
                kind = LoopKind.OUTER if li == 0 else LoopKind.INNER
                built.append(Loop(kind, tuple(_chain(ids, edge_map, rec.id))))
            faces.append(Face(rec.id, rec.surface, rec.sense, tuple(built)))

        draft = Model(vertices, tuple(edges), tuple(faces), (tuple(f.id for f in faces),))
        oriented = tuple(_orient(draft, f) for f in faces)
        model = Model(vertices, tuple(edges), oriented, (tuple(f.id for f in oriented),))
        if validate:
            check(model)
        return model


def _chain(ids: list[int], edge_map: dict[int, Edge], face_id: int) -> list[Coedge]:
    remaining = list(ids)
    first = edge_map[remaining.pop(0)]
    out = [Coedge(first.id, False)]
    start, cur = first.start, first.end
    while remaining:
        cands = [i for i, e in enumerate(remaining) if cur in (edge_map[e].start, edge_map[e].end)]
        if not cands:
            raise ConstructionError(f"face {face_id}: loop does not close at vertex {cur}")
        pick = next((i for i in cands if remaining[i] != out[-1].edge), cands[0])
        e = edge_map[remaining.pop(pick)]
        if e.start == cur:
            out.append(Coedge(e.id, False))
            cur = e.end
        else:
            out.append(Coedge(e.id, True))
            cur = e.start
    if cur != start:
        raise ConstructionError(f"face {face_id}: loop is open")
    return out


def _signed_area(uv: np.ndarray) -> float:
    x, y = uv[:, 0], uv[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _loop_uv(model: Model, face: Face, lp: Loop) -> np.ndarray:
    probe = Face(face.id, face.surface, face.sense, (lp,))
    return _unwrap(to_uv(face.surface, loop_points(model, probe, 0)), face.surface)


def _settle_circles(model: Model, face: Face, lp: Loop) -> Loop:
    """Pick directions for full-circle coedges so the parameter-space
    polygon of a seamed loop closes on itself."""
    circles = [i for i, c in enumerate(lp.coedges) if model.edge_map[c.edge].start == model.edge_map[c.edge].end]
    if len(lp.coedges) == 1 or not circles:
        return lp
    best, best_gap = lp, math.inf
    for mask in range(1 << len(circles)):
        ces = list(lp.coedges)
        for bit, i in enumerate(circles):
            if mask >> bit & 1:
                ces[i] = Coedge(ces[i].edge, not ces[i].reversed)
        cand = Loop(lp.kind, tuple(ces))
        uv = _loop_uv(model, face, cand)
        gap = float(np.linalg.norm(uv[-1] - uv[0]))
        if gap < best_gap - 1e-9:
            best, best_gap = cand, gap
    return best


def _orient(model: Model, face: Face) -> Face:
    want = 1.0 if face.sense else -1.0
    loops = []
    for lp in face.loops:
        lp = _settle_circles(model, face, lp)
        uv = _loop_uv(model, face, lp)
        sign = want if lp.kind is LoopKind.OUTER else -want
        if _signed_area(uv) * sign < 0:
            lp = Loop(lp.kind, tuple(Coedge(c.edge, not c.reversed) for c in reversed(lp.coedges)))
        loops.append(lp)
    return Face(face.id, face.surface, face.sense, tuple(loops))


# --------------------------------------------------------------------------
# Profile sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PSeg:
    """2D profile segment; arcs carry a centre and turn direction."""

    p: tuple[float, float]
    q: tuple[float, float]
    center: tuple[float, float] | None = None
    ccw: bool = True


def profile_lines(points) -> list[PSeg]:
    pts = [tuple(map(float, p)) for p in points]
    return [PSeg(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


def extrude(b: Builder, profile: Sequence[PSeg], origin, u, v, length: float, notes: Sequence[str] | None = None):
    """Sweep a counter-clockwise (u, v) profile along ``w = u x v``.

    Returns the side faces (one per profile segment) and the two caps
    (at the origin and at ``length``)."""
    o, u, v = _arr(origin), _arr(u), _arr(v)
    w = np.cross(u, v)

    def X(p, s):
        return o + p[0] * u + p[1] * v + s * w

    def seg3(ps: PSeg, s: float) -> Seg:
        if ps.center is None:
            return Seg.line(X(ps.p, s), X(ps.q, s))
        return Seg.arc(X(ps.center, s), w if ps.ccw else -w, X(ps.p, s), X(ps.q, s))

    sides = []
    for k, ps in enumerate(profile):
        loop = [seg3(ps, 0.0), seg3(ps, length), Seg.line(X(ps.p, 0), X(ps.p, length)), Seg.line(X(ps.q, 0), X(ps.q, length))]
        note = notes[k] if notes else ""
        if ps.center is None:
            du, dv = ps.q[0] - ps.p[0], ps.q[1] - ps.p[1]
            n = dv * u - du * v
            sides.append(b.plane(X(ps.p, 0), n, loop, note=note))
        else:
            r = math.dist(ps.p, ps.center)
            sides.append(b.face(Cylinder(tuple(X(ps.center, 0)), tuple(w), r), ps.ccw, loop, note=note))
    cap0 = b.plane(X(profile[0].p, 0), -w, [seg3(ps, 0.0) for ps in profile], note="cap")
    cap1 = b.plane(X(profile[0].p, length), w, [seg3(ps, length) for ps in profile], note="cap")
    return sides, cap0, cap1


def revolve(
    b: Builder,
    profile: Sequence,
    center=(0.0, 0.0),
    split: bool | Sequence[bool] = False,
    closed: bool = True,
    notes: Sequence[str] | None = None,
):
    """Revolve an (r, z) profile about the vertical axis through ``center``.

    ``profile`` holds points ``(r, z)`` or :class:`PSeg` arcs between them;
    for a closed profile the material region is on the left of the path.
    Returns ``(faces_per_segment, end_circles)`` where ``end_circles`` are
    the boundary circles at the first and last profile points (used to punch
    open profiles into existing faces).  ``faces_per_segment[k]`` is a list
    with one face, or two when the segment's faces are split in halves.
    """
    cx, cy = center
    segs: list[PSeg] = []
    items = list(profile)
    if all(not isinstance(it, PSeg) for it in items):
        pts = [tuple(map(float, p)) for p in items]
        n = len(pts) if closed else len(pts) - 1
        segs = [PSeg(pts[i], pts[(i + 1) % len(pts)]) for i in range(n)]
    else:
        segs = [it if isinstance(it, PSeg) else None for it in items]
        if any(s is None for s in segs):
            raise ConstructionError("mixed profiles must be given as PSeg objects")
    nseg = len(segs)
    splits = [split] * nseg if isinstance(split, bool) else list(split)

    ez = np.array([0.0, 0.0, 1.0])
    ex = np.array([1.0, 0.0, 0.0])

    def P(rz, theta=0.0):
        r, z = rz
        return np.array([cx + r * math.cos(theta), cy + r * math.sin(theta), z])

    def ring(rz, halves: bool) -> list[Seg]:
        r, z = rz
        if r <= 1e-12:
            return []
        return circle((cx, cy, z), ez, r, ex, split=halves)

    def ring_half(rz, lo: float, hi: float) -> list[Seg]:
        r, z = rz
        if r <= 1e-12:
            return []
        return [Seg.arc((cx, cy, z), ez, P(rz, lo), P(rz, hi))]

    # points shared by adjacent segments are split if either neighbour is
    def split_at(k: int) -> bool:
        before = splits[k - 1] if (k > 0 or closed) else False
        after = splits[k] if k < nseg else False
        return bool(before or after)

    faces: list[list[FaceRec]] = []
    for k, ps in enumerate(segs):
        (r1, z1), (r2, z2) = ps.p, ps.q
        note = notes[k] if notes else ""
        if r1 <= 1e-12 and r2 <= 1e-12:
            faces.append([])
            continue
        kp, kq = k, (k + 1) % nseg if closed else k + 1
        if ps.center is None and abs(z2 - z1) < 1e-12:
            normal = (0.0, 0.0, 1.0 if r2 < r1 else -1.0)
            big, small = (ps.p, ps.q) if r1 > r2 else (ps.q, ps.p)
            kb, ks = (kp, kq) if r1 > r2 else (kq, kp)
            inner = [ring(small, split_at(ks))] if small[0] > 1e-12 else []
            faces.append([b.plane(P(big), normal, ring(big, split_at(kb)), inner, note=note)])
            continue
        if ps.center is not None:
            rc, zc = ps.center
            surf = Torus((cx, cy, zc), (0, 0, 1), rc, math.dist(ps.p, ps.center))
            sense = ps.ccw
        elif abs(r2 - r1) < 1e-12:
            surf = Cylinder((cx, cy, 0.0), (0, 0, 1), r1)
            sense = z2 > z1
        else:
            slope = (r2 - r1) / (z2 - z1)
            z_apex = z1 - r1 / slope
            s = 1.0 if slope > 0 else -1.0
            alpha = math.atan(abs(slope))
            surf = Cone((cx, cy, z_apex), (0, 0, s), alpha)
            out = np.array([z2 - z1, -(r2 - r1)])
            nat = np.array([math.cos(alpha), -math.sin(alpha) * s])
            sense = bool(out @ nat > 0)

        def seam(theta: float) -> Seg:
            if ps.center is None:
                return Seg.line(P(ps.p, theta), P(ps.q, theta))
            radial = np.array([math.cos(theta), math.sin(theta), 0.0])
            ax = np.cross(radial, ez) * (1.0 if ps.ccw else -1.0)
            return Seg.arc(P(ps.center, theta), ax, P(ps.p, theta), P(ps.q, theta))

        if splits[k]:
            halves = []
            for lo, hi in ((0.0, math.pi), (math.pi, TWO_PI)):
                loop = ring_half(ps.p, lo, hi) + ring_half(ps.q, lo, hi) + [seam(lo), seam(hi)]
                halves.append(b.face(surf, sense, loop, note=note))
            faces.append(halves)
        else:
            loop = ring(ps.p, split_at(kp)) + ring(ps.q, split_at(kq)) + [seam(0.0), seam(0.0)]
            faces.append([b.face(surf, sense, loop, note=note)])

    ends = (ring(segs[0].p, split_at(0)), ring(segs[-1].q, split_at(nseg))) if not closed else ((), ())
    return faces, ends
