"""Analytic boundary-representation data model.

Faces carry one of five analytic surfaces (plane, cylinder, cone, sphere,
torus); edges are straight lines or circular arcs.  Topology follows the
usual face -> loop -> coedge -> edge -> vertex chain.  A coedge's direction
is chosen so that the face interior lies to its left when viewed from the
outward (out-of-material) side of the face.

Models are treated as immutable once constructed.  Lookups that the
geometry code needs repeatedly are built eagerly in ``Model.__post_init__``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Union

import numpy as np

Point = tuple[float, float, float]

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Malformed model file or unknown entity kind."""


class TopologyError(ValueError):
    """A model violates the manifold/closed-loop invariants."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class UnknownFace(KeyError):
    pass


class FaceType(str, Enum):
    PLAN = "PLAN"
    CYLI = "CYLI"
    CONI = "CONI"
    SPHE = "SPHE"
    TORO = "TORO"
    ANY = "ANY"


class LoopKind(str, Enum):
    OUTER = "OUTER"
    INNER = "INNER"


def _vec(p) -> Point:
    x, y, z = (float(c) for c in p)
    return (x, y, z)


def _unit(p) -> Point:
    a = np.asarray(p, dtype=float)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ValueError("zero-length direction")
    return _vec(a / n)


# --------------------------------------------------------------------------
# Geometry records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Plane:
    origin: Point
    normal: Point
    kind = "plane"
    face_type = FaceType.PLAN

    def __post_init__(self):
        object.__setattr__(self, "origin", _vec(self.origin))
        object.__setattr__(self, "normal", _unit(self.normal))


@dataclass(frozen=True)
class Cylinder:
    origin: Point
    axis: Point
    radius: float
    kind = "cylinder"
    face_type = FaceType.CYLI

    def __post_init__(self):
        object.__setattr__(self, "origin", _vec(self.origin))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not self.radius > 0:
            raise SchemaError(f"cylinder radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class Cone:
    """Cone opening along ``axis`` from ``apex``; the surface lives on the
    ``axis`` side of the apex only."""

    apex: Point
    axis: Point
    half_angle: float
    kind = "cone"
    face_type = FaceType.CONI

    def __post_init__(self):
        object.__setattr__(self, "apex", _vec(self.apex))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not 0.0 < self.half_angle < math.pi / 2:
            raise SchemaError(f"cone half angle out of range: {self.half_angle}")
        object.__setattr__(self, "half_angle", float(self.half_angle))


@dataclass(frozen=True)
class Sphere:
    center: Point
    radius: float
    kind = "sphere"
    face_type = FaceType.SPHE

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius > 0:
            raise SchemaError(f"sphere radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class Torus:
    center: Point
    axis: Point
    major_radius: float
    minor_radius: float
    kind = "torus"
    face_type = FaceType.TORO

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not 0 < self.minor_radius < self.major_radius:
            raise SchemaError(
                f"torus radii invalid: major={self.major_radius} minor={self.minor_radius}"
            )
        object.__setattr__(self, "major_radius", float(self.major_radius))
        object.__setattr__(self, "minor_radius", float(self.minor_radius))


Surface = Union[Plane, Cylinder, Cone, Sphere, Torus]
ROTATIONAL = (Cylinder, Cone, Sphere, Torus)


@dataclass(frozen=True)
class Line:
    kind = "line"


@dataclass(frozen=True)
class CircularArc:
    """Arc running counter-clockwise about ``axis`` from the edge's start
    vertex to its end vertex.  Equal start and end vertices mean a full
    circle."""

    center: Point
    axis: Point
    radius: float
    kind = "circular_arc"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "axis", _unit(self.axis))
        if not self.radius > 0:
            raise SchemaError(f"arc radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


Curve = Union[Line, CircularArc]


# --------------------------------------------------------------------------
# Topology records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    id: int
    point: Point


@dataclass(frozen=True)
class Edge:
    id: int
    curve: Curve
    start: int
    end: int


@dataclass(frozen=True)
class Coedge:
    edge: int
    reversed: bool = False


@dataclass(frozen=True)
class Loop:
    kind: LoopKind
    coedges: tuple[Coedge, ...]


@dataclass(frozen=True)
class Face:
    id: int
    surface: Surface
    sense: bool
    loops: tuple[Loop, ...]

    @property
    def outer_loops(self) -> list[Loop]:
        return [lp for lp in self.loops if lp.kind is LoopKind.OUTER]

    @property
    def inner_loops(self) -> list[Loop]:
        return [lp for lp in self.loops if lp.kind is LoopKind.INNER]

    @property
    def face_type(self) -> FaceType:
        return self.surface.face_type


@dataclass(frozen=True)
class CoedgeUse:
    """Where a coedge lives: owning face, loop index, position in loop."""

    face: int
    loop: int
    index: int
    coedge: Coedge


@dataclass(eq=False)
class Model:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...]
    shells: tuple[tuple[int, ...], ...] = ()
    length_unit: str = "mm"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.edges = tuple(self.edges)
        self.faces = tuple(self.faces)
        if not self.shells:
            self.shells = (tuple(f.id for f in self.faces),)
        else:
            self.shells = tuple(tuple(s) for s in self.shells)
        self.vertex_map = {v.id: v for v in self.vertices}
        self.edge_map = {e.id: e for e in self.edges}
        self.face_map = {f.id: f for f in self.faces}
        self.edge_uses: dict[int, list[CoedgeUse]] = {}
        for f in self.faces:
            for li, lp in enumerate(f.loops):
                for ci, ce in enumerate(lp.coedges):
                    self.edge_uses.setdefault(ce.edge, []).append(CoedgeUse(f.id, li, ci, ce))

    def face(self, face_id: int) -> Face:
        try:
            return self.face_map[face_id]
        except KeyError:
            raise UnknownFace(face_id) from None

    def point(self, vertex_id: int) -> np.ndarray:
        return np.array(self.vertex_map[vertex_id].point)

    def coedge_ends(self, ce: Coedge) -> tuple[int, int]:
        e = self.edge_map[ce.edge]
        return (e.end, e.start) if ce.reversed else (e.start, e.end)

    def shell_of(self, face_id: int) -> tuple[int, ...]:
        for s in self.shells:
            if face_id in s:
                return s
        raise UnknownFace(face_id)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        pts = np.array([v.point for v in self.vertices], dtype=float)
        # arcs bulge past their endpoints; include their extreme samples
        extra = []
        for e in self.edges:
            if isinstance(e.curve, CircularArc):
                c = np.array(e.curve.center)
                a = np.array(e.curve.axis)
                for k in range(3):
                    d = np.zeros(3)
                    d[k] = 1.0
                    d = d - a * (d @ a)
                    n = np.linalg.norm(d)
                    if n > 1e-12:
                        extra.append(c + e.curve.radius * d / n)
                        extra.append(c - e.curve.radius * d / n)
        if extra:
            pts = np.vstack([pts, np.array(extra)])
        return pts.min(axis=0), pts.max(axis=0)

    def diagonal(self) -> float:
        if "diagonal" not in self._cache:
            lo, hi = self.bbox()
            self._cache["diagonal"] = float(np.linalg.norm(hi - lo)) or 1.0
        return self._cache["diagonal"]

    def iter_coedges(self, face_id: int, kind: LoopKind | None = None) -> Iterator[Coedge]:
        for lp in self.face(face_id).loops:
            if kind is None or lp.kind is kind:
                yield from lp.coedges


# --------------------------------------------------------------------------
# Queries
# --------------------------------------------------------------------------


def mate(model: Model, face_id: int, coedge: Coedge) -> int | None:
    """Face on the other side of ``coedge``'s edge (may be ``face_id`` itself
    across a seam)."""
    uses = model.edge_uses.get(coedge.edge, [])
    mine = [u for u in uses if u.face == face_id and u.coedge == coedge]
    others = [u for u in uses if not (u.face == face_id and u.coedge == coedge)]
    if not mine and not others:
        return None
    if others:
        return others[0].face
    return None


def adjacent_faces(model: Model, face_id: int, loop_kind: LoopKind | str) -> list[tuple[int, Coedge]]:
    """(mate face id, this face's coedge) for every coedge of the selected
    loops.  One entry per shared edge; seams yield the face itself."""
    loop_kind = LoopKind(loop_kind)
    model.face(face_id)
    out = []
    for ce in model.iter_coedges(face_id, loop_kind):
        m = mate(model, face_id, ce)
        if m is not None:
            out.append((m, ce))
    return out


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


def _surface_distance(surface: Surface, p: np.ndarray) -> float:
    if isinstance(surface, Plane):
        return abs(float((p - surface.origin) @ np.array(surface.normal)))
    if isinstance(surface, Cylinder):
        d = p - surface.origin
        a = np.array(surface.axis)
        radial = d - a * (d @ a)
        return abs(float(np.linalg.norm(radial)) - surface.radius)
    if isinstance(surface, Cone):
        d = p - surface.apex
        a = np.array(surface.axis)
        h = float(d @ a)
        rho = float(np.linalg.norm(d - a * h))
        # distance to the generator line in the (h, rho) half plane
        ca, sa = math.cos(surface.half_angle), math.sin(surface.half_angle)
        return abs(rho * ca - h * sa)
    if isinstance(surface, Sphere):
        return abs(float(np.linalg.norm(p - surface.center)) - surface.radius)
    if isinstance(surface, Torus):
        d = p - surface.center
        a = np.array(surface.axis)
        h = float(d @ a)
        rho = float(np.linalg.norm(d - a * h))
        return abs(math.hypot(rho - surface.major_radius, h) - surface.minor_radius)
    raise TypeError(surface)


def validate_topology(model: Model) -> list[str]:
    """Return one diagnostic string per violated invariant (empty if valid)."""
    diags: list[str] = []
    tol = 1e-7 * model.diagonal() if model.vertices else 1e-7

    seen = set()
    for f in model.faces:
        if f.id in seen:
            diags.append(f"face {f.id}: duplicate face id")
        seen.add(f.id)
    if len(model.vertex_map) != len(model.vertices):
        diags.append("vertices: duplicate vertex ids")
    if len(model.edge_map) != len(model.edges):
        diags.append("edges: duplicate edge ids")

    for e in model.edges:
        for vid in (e.start, e.end):
            if vid not in model.vertex_map:
                diags.append(f"edge {e.id}: unknown vertex {vid}")
        if isinstance(e.curve, CircularArc) and e.start in model.vertex_map and e.end in model.vertex_map:
            c = np.array(e.curve.center)
            a = np.array(e.curve.axis)
            for vid in (e.start, e.end):
                d = model.point(vid) - c
                if abs(float(np.linalg.norm(d)) - e.curve.radius) > tol or abs(float(d @ a)) > tol:
                    diags.append(f"edge {e.id}: vertex {vid} is off its arc")

    for f in model.faces:
        n_outer = len(f.outer_loops)
        if n_outer != 1:
            diags.append(f"face {f.id}: has {n_outer} OUTER loops, expected 1")
        for li, lp in enumerate(f.loops):
            loop_id = f"face {f.id} loop {li}"
            if not lp.coedges:
                diags.append(f"{loop_id}: empty loop")
                continue
            if any(ce.edge not in model.edge_map for ce in lp.coedges):
                diags.append(f"{loop_id}: references unknown edge")
                continue
            ends = [model.coedge_ends(ce) for ce in lp.coedges]
            for i, (_, end) in enumerate(ends):
                nxt = ends[(i + 1) % len(ends)][0]
                if end != nxt:
                    diags.append(f"{loop_id}: gap after coedge {i} (vertex {end} != {nxt})")
                    break
            for ce in lp.coedges:
                e = model.edge_map[ce.edge]
                for vid in (e.start, e.end):
                    if vid in model.vertex_map and _surface_distance(f.surface, model.point(vid)) > tol:
                        diags.append(f"face {f.id}: vertex {vid} of edge {e.id} is off the surface")

    for e in model.edges:
        uses = model.edge_uses.get(e.id, [])
        if len(uses) != 2:
            diags.append(f"edge {e.id}: referenced by {len(uses)} coedges, expected 2")
        elif uses[0].coedge.reversed == uses[1].coedge.reversed:
            diags.append(f"edge {e.id}: both coedges have the same orientation")
    for eid in model.edge_uses:
        if eid not in model.edge_map:
            diags.append(f"edge {eid}: referenced but not defined")
    return diags


def check(model: Model) -> Model:
    diags = validate_topology(model)
    if diags:
        raise TopologyError(diags)
    return model


# --------------------------------------------------------------------------
# JSON interchange
# --------------------------------------------------------------------------


def surface_to_dict(s: Surface) -> dict:
    if isinstance(s, Plane):
        return {"kind": "plane", "origin": list(s.origin), "normal": list(s.normal)}
    if isinstance(s, Cylinder):
        return {"kind": "cylinder", "origin": list(s.origin), "axis": list(s.axis), "radius": s.radius}
    if isinstance(s, Cone):
        return {"kind": "cone", "apex": list(s.apex), "axis": list(s.axis), "half_angle": s.half_angle}
    if isinstance(s, Sphere):
        return {"kind": "sphere", "center": list(s.center), "radius": s.radius}
    if isinstance(s, Torus):
        return {
            "kind": "torus",
            "center": list(s.center),
            "axis": list(s.axis),
            "major_radius": s.major_radius,
            "minor_radius": s.minor_radius,
        }
    raise TypeError(s)


_SURFACES = {"plane": Plane, "cylinder": Cylinder, "cone": Cone, "sphere": Sphere, "torus": Torus}


def surface_from_dict(d: dict) -> Surface:
    d = dict(d)
    kind = d.pop("kind", None)
    cls = _SURFACES.get(kind)
    if cls is None:
        raise SchemaError(f"unknown surface kind {kind!r}")
    try:
        return cls(**d)
    except TypeError as exc:
        raise SchemaError(f"bad {kind} surface: {exc}") from None


def curve_to_dict(c: Curve) -> dict:
    if isinstance(c, Line):
        return {"kind": "line"}
    return {"kind": "circular_arc", "center": list(c.center), "axis": list(c.axis), "radius": c.radius}


def curve_from_dict(d: dict) -> Curve:
    kind = d.get("kind")
    if kind == "line":
        return Line()
    if kind == "circular_arc":
        try:
            return CircularArc(d["center"], d["axis"], d["radius"])
        except KeyError as exc:
            raise SchemaError(f"circular_arc missing {exc}") from None
    raise SchemaError(f"unknown curve kind {kind!r}")


def model_to_dict(model: Model) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "units": model.length_unit,
        "vertices": [{"id": v.id, "point": list(v.point)} for v in model.vertices],
        "edges": [
            {"id": e.id, "curve": curve_to_dict(e.curve), "start": e.start, "end": e.end}
            for e in model.edges
        ],
        "faces": [
            {
                "id": f.id,
                "surface": surface_to_dict(f.surface),
                "sense": f.sense,
                "loops": [
                    {
                        "kind": lp.kind.value,
                        "coedges": [{"edge": ce.edge, "reversed": ce.reversed} for ce in lp.coedges],
                    }
                    for lp in f.loops
                ],
            }
            for f in model.faces
        ],
        "shells": [list(s) for s in model.shells],
    }


def model_from_dict(data: dict, validate: bool = True) -> Model:
    if not isinstance(data, dict):
        raise SchemaError("model document must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version}")
    try:
        vertices = [Vertex(int(v["id"]), _vec(v["point"])) for v in data["vertices"]]
        edges = [
            Edge(int(e["id"]), curve_from_dict(e["curve"]), int(e["start"]), int(e["end"]))
            for e in data["edges"]
        ]
        faces = []
        for f in data["faces"]:
            loops = []
            for lp in f["loops"]:
                try:
                    kind = LoopKind(str(lp["kind"]).upper())
                except ValueError:
                    raise SchemaError(f"face {f['id']}: bad loop kind {lp['kind']!r}") from None
                loops.append(
                    Loop(kind, tuple(Coedge(int(c["edge"]), bool(c.get("reversed", False))) for c in lp["coedges"]))
                )
            faces.append(Face(int(f["id"]), surface_from_dict(f["surface"]), bool(f.get("sense", True)), tuple(loops)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed model document: {exc!r}") from None
    shells = tuple(tuple(int(i) for i in s) for s in data.get("shells", ()))
    model = Model(tuple(vertices), tuple(edges), tuple(faces), shells, str(data.get("units", "mm")))
    if validate:
        check(model)
    return model


def load_model(path: str | Path) -> Model:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(data)


def save_model(model: Model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1))


# --------------------------------------------------------------------------
# Transformations
# --------------------------------------------------------------------------


def transform_model(model: Model, rotation: np.ndarray, translation: Iterable[float] = (0, 0, 0), scale: float = 1.0) -> Model:
    """Apply ``x -> scale * R x + t`` to all geometry; topology and ids are kept."""
    R = np.asarray(rotation, dtype=float)
    t = np.asarray(tuple(translation), dtype=float)

    def P(p):
        return _vec(scale * (R @ np.asarray(p)) + t)

    def D(d):
        return _vec(R @ np.asarray(d))

    def surf(s: Surface) -> Surface:
        if isinstance(s, Plane):
            return Plane(P(s.origin), D(s.normal))
        if isinstance(s, Cylinder):
            return Cylinder(P(s.origin), D(s.axis), s.radius * scale)
        if isinstance(s, Cone):
            return Cone(P(s.apex), D(s.axis), s.half_angle)
        if isinstance(s, Sphere):
            return Sphere(P(s.center), s.radius * scale)
        return Torus(P(s.center), D(s.axis), s.major_radius * scale, s.minor_radius * scale)

    def curve(c: Curve) -> Curve:
        if isinstance(c, Line):
            return c
        axis = D(c.axis)
        if np.linalg.det(R) < 0:
            axis = _vec(-np.asarray(axis))
        return CircularArc(P(c.center), axis, c.radius * scale)

    return Model(
        tuple(Vertex(v.id, P(v.point)) for v in model.vertices),
        tuple(Edge(e.id, curve(e.curve), e.start, e.end) for e in model.edges),
        tuple(Face(f.id, surf(f.surface), f.sense, f.loops) for f in model.faces),
        model.shells,
        model.length_unit,
    )
