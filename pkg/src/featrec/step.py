"""Reader and writer for a small subset of ISO 10303-21 (STEP Part 21).

Only the analytic solid entities needed for prismatic parts are understood.
Unknown entities that the solid does not reference are skipped with a
warning; unknown entities inside the solid are errors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

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
    Sphere,
    Torus,
    Vertex,
    check,
)
from .geom import frame

log = logging.getLogger(__name__)


class StepSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column = line, column


class DanglingReference(ValueError):
    pass


class UnsupportedEntity(ValueError):
    def __init__(self, keyword: str, entity_id: int | None = None):
        where = f" (#{entity_id})" if entity_id is not None else ""
        super().__init__(f"{keyword}{where}")
        self.keyword = keyword
        self.entity_id = entity_id


@dataclass(frozen=True)
class Ref:
    id: int


@dataclass(frozen=True)
class Enum_:
    value: str


@dataclass(frozen=True)
class Typed:
    keyword: str
    args: tuple


UNSET = None
DERIVED = "*"


@dataclass(frozen=True)
class StepEntity:
    id: int
    keyword: str
    args: tuple
    line: int = 0


@dataclass
class StepFile:
    header: list[StepEntity]
    entities: dict[int, StepEntity]

    def of_kind(self, keyword: str) -> list[StepEntity]:
        return [e for _, e in sorted(self.entities.items()) if e.keyword == keyword]


# --------------------------------------------------------------------------
# Tokenizer and parser
# --------------------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.s = text
        self.i = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str):
        raise StepSyntaxError(msg, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.s[self.i] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def skip(self):
        while self.i < len(self.s):
            c = self.s[self.i]
            if c.isspace():
                self._advance()
            elif self.s.startswith("/*", self.i):
                end = self.s.find("*/", self.i + 2)
                if end < 0:
                    self.error("unterminated comment")
                self._advance(end + 2 - self.i)
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, token: str):
        self.skip()
        if not self.s.startswith(token, self.i):
            self.error(f"expected {token!r}")
        self._advance(len(token))

    def try_take(self, token: str) -> bool:
        self.skip()
        if self.s.startswith(token, self.i):
            self._advance(len(token))
            return True
        return False

    def keyword(self) -> str:
        self.skip()
        j = self.i
        while j < len(self.s) and (self.s[j].isalnum() or self.s[j] in "_-"):
            j += 1
        if j == self.i:
            self.error("expected a keyword")
        word = self.s[self.i : j]
        self._advance(j - self.i)
        return word

    def integer(self) -> int:
        self.skip()
        j = self.i
        while j < len(self.s) and self.s[j].isdigit():
            j += 1
        if j == self.i:
            self.error("expected an integer")
        v = int(self.s[self.i : j])
        self._advance(j - self.i)
        return v

    def string(self) -> str:
        self.expect("'")
        out = []
        while True:
            if self.i >= len(self.s):
                self.error("unterminated string")
            c = self.s[self.i]
            if c == "'":
                if self.s.startswith("''", self.i):
                    out.append("'")
                    self._advance(2)
                    continue
                self._advance()
                return "".join(out)
            out.append(c)
            self._advance()

    def number(self):
        self.skip()
        j = self.i
        if j < len(self.s) and self.s[j] in "+-":
            j += 1
        while j < len(self.s) and (self.s[j].isdigit() or self.s[j] in ".Ee+-"):
            if self.s[j] in "+-" and self.s[j - 1] not in "Ee":
                break
            j += 1
        text = self.s[self.i : j]
        try:
            v: Any = int(text) if text.lstrip("+-").isdigit() else float(text)
        except ValueError:
            self.error(f"bad number {text!r}")
        self._advance(j - self.i)
        return v

    def param(self):
        c = self.peek()
        if c == "'":
            return self.string()
        if c == "#":
            self._advance()
            return Ref(self.integer())
        if c == "$":
            self._advance()
            return UNSET
        if c == "*":
            self._advance()
            return DERIVED
        if c == ".":
            self._advance()
            j = self.s.find(".", self.i)
            if j < 0:
                self.error("unterminated enumeration")
            v = self.s[self.i : j]
            self._advance(j + 1 - self.i)
            return Enum_(v)
        if c == "(":
            return self.param_list()
        if c and (c.isdigit() or c in "+-."):
            return self.number()
        if c and (c.isalpha() or c == "_"):
            kw = self.keyword()
            return Typed(kw.upper(), self.param_list())
        self.error(f"unexpected character {c!r}")

    def param_list(self) -> tuple:
        self.expect("(")
        items = []
        if self.try_take(")"):
            return ()
        while True:
            items.append(self.param())
            if self.try_take(")"):
                return tuple(items)
            self.expect(",")


def parse_step(text: str) -> StepFile:
    sc = _Scanner(text)
    sc.expect("ISO-10303-21")
    sc.expect(";")
    header: list[StepEntity] = []
    entities: dict[int, StepEntity] = {}
    sc.expect("HEADER")
    sc.expect(";")
    while not sc.try_take("ENDSEC"):
        line = sc.line
        kw = sc.keyword()
        header.append(StepEntity(0, kw.upper(), sc.param_list(), line))
        sc.expect(";")
    sc.expect(";")
    sc.expect("DATA")
    sc.expect(";")
    while not sc.try_take("ENDSEC"):
        if sc.peek() != "#":
            sc.error("expected an entity instance")
        line = sc.line
        sc._advance()
        eid = sc.integer()
        sc.expect("=")
        if sc.peek() == "(":
            # complex entity instance: keep the parts, keyword marks it unsupported
            sc.expect("(")
            parts = []
            while not sc.try_take(")"):
                kw = sc.keyword()
                parts.append(Typed(kw.upper(), sc.param_list()))
            ent = StepEntity(eid, "(" + " ".join(p.keyword for p in parts) + ")", tuple(parts), line)
        else:
            kw = sc.keyword()
            ent = StepEntity(eid, kw.upper(), sc.param_list(), line)
        if eid in entities:
            raise StepSyntaxError(f"duplicate instance #{eid}", line, 1)
        entities[eid] = ent
        sc.expect(";")
    sc.expect(";")
    sc.expect("END-ISO-10303-21")
    sc.expect(";")
    step = StepFile(header, entities)
    for ent in entities.values():
        for r in _refs(ent.args):
            if r not in entities:
                raise DanglingReference(f"#{ent.id} ({ent.keyword}) references missing #{r}")
    return step


def tokenize_and_parse(path: str | Path) -> StepFile:
    return parse_step(Path(path).read_text(encoding="ascii", errors="replace"))


def _refs(args: Iterable) -> Iterable[int]:
    for a in args:
        if isinstance(a, Ref):
            yield a.id
        elif isinstance(a, tuple):
            yield from _refs(a)
        elif isinstance(a, Typed):
            yield from _refs(a.args)


# --------------------------------------------------------------------------
# Entity graph -> Model
# --------------------------------------------------------------------------

SUPPORTED = frozenset(
    {
        "CARTESIAN_POINT", "DIRECTION", "VECTOR", "AXIS2_PLACEMENT_3D", "PLANE", "CYLINDRICAL_SURFACE",
        "CONICAL_SURFACE", "SPHERICAL_SURFACE", "TOROIDAL_SURFACE", "LINE", "CIRCLE", "VERTEX_POINT",
        "EDGE_CURVE", "ORIENTED_EDGE", "EDGE_LOOP", "FACE_BOUND", "FACE_OUTER_BOUND", "ADVANCED_FACE",
        "CLOSED_SHELL", "MANIFOLD_SOLID_BREP",
    }
)


def _reachable(step: StepFile, roots: list[int]) -> list[int]:
    seen: set[int] = set()
    order: list[int] = []
    stack = list(reversed(roots))
    while stack:
        eid = stack.pop()
        if eid in seen:
            continue
        seen.add(eid)
        order.append(eid)
        stack.extend(reversed(list(_refs(step.entities[eid].args))))
    return order


class _Reader:
    def __init__(self, step: StepFile):
        self.step = step

    def ent(self, ref, *kinds: str) -> StepEntity:
        if not isinstance(ref, Ref):
            raise DanglingReference(f"expected an entity reference, got {ref!r}")
        e = self.step.entities[ref.id]
        if kinds and e.keyword not in kinds:
            if e.keyword not in SUPPORTED:
                raise UnsupportedEntity(e.keyword, e.id)
            raise UnsupportedEntity(f"{e.keyword} where {'/'.join(kinds)} expected", e.id)
        return e

    def point(self, ref) -> np.ndarray:
        return np.array(self.ent(ref, "CARTESIAN_POINT").args[1], dtype=float)

    def direction(self, ref) -> np.ndarray:
        v = np.array(self.ent(ref, "DIRECTION").args[1], dtype=float)
        return v / np.linalg.norm(v)

    def placement(self, ref):
        e = self.ent(ref, "AXIS2_PLACEMENT_3D")
        loc = self.point(e.args[1])
        axis = self.direction(e.args[2]) if isinstance(e.args[2], Ref) else np.array([0.0, 0.0, 1.0])
        return loc, axis

    def surface(self, ref):
        e = self.ent(ref)
        a = e.args
        if e.keyword == "PLANE":
            loc, axis = self.placement(a[1])
            return Plane(tuple(loc), tuple(axis))
        if e.keyword == "CYLINDRICAL_SURFACE":
            loc, axis = self.placement(a[1])
            return Cylinder(tuple(loc), tuple(axis), float(a[2]))
        if e.keyword == "CONICAL_SURFACE":
            loc, axis = self.placement(a[1])
            radius, alpha = float(a[2]), float(a[3])
            apex = loc - (radius / math.tan(alpha)) * axis
            return Cone(tuple(apex), tuple(axis), alpha)
        if e.keyword == "SPHERICAL_SURFACE":
            loc, _ = self.placement(a[1])
            return Sphere(tuple(loc), float(a[2]))
        if e.keyword == "TOROIDAL_SURFACE":
            loc, axis = self.placement(a[1])
            return Torus(tuple(loc), tuple(axis), float(a[2]), float(a[3]))
        raise UnsupportedEntity(e.keyword, e.id)

    def curve(self, ref, same_sense: bool):
        e = self.ent(ref)
        if e.keyword == "LINE":
            return Line()
        if e.keyword == "CIRCLE":
            loc, axis = self.placement(e.args[1])
            if not same_sense:
                axis = -axis
            return CircularArc(tuple(loc), tuple(axis), float(e.args[2]))
        raise UnsupportedEntity(e.keyword, e.id)


def _flag(v) -> bool:
    if isinstance(v, Enum_):
        return v.value.upper() in ("T", "TRUE")
    return bool(v)


def to_model(step: StepFile, diagnostics: list[str] | None = None, validate: bool = True) -> Model:
    diags = diagnostics if diagnostics is not None else []
    roots = [e.id for e in step.of_kind("MANIFOLD_SOLID_BREP")]
    if roots:
        shells = [step.entities[r].args[1].id for r in roots]
    else:
        shells = [e.id for e in step.of_kind("CLOSED_SHELL")]
    if not shells:
        raise UnsupportedEntity("no MANIFOLD_SOLID_BREP or CLOSED_SHELL in file")
    reach = set(_reachable(step, roots + shells))
    for eid in reach:
        kw = step.entities[eid].keyword
        if kw not in SUPPORTED:
            raise UnsupportedEntity(kw, eid)
    for eid, e in sorted(step.entities.items()):
        if eid not in reach and e.keyword not in SUPPORTED:
            msg = f"ignored unreferenced entity #{eid} {e.keyword}"
            log.warning(msg)
            diags.append(msg)

    rd = _Reader(step)
    vert_ids: dict[int, int] = {}
    vertices: list[Vertex] = []
    edge_ids: dict[int, int] = {}
    edges: list[Edge] = []

    def vertex(ref) -> int:
        e = rd.ent(ref, "VERTEX_POINT")
        if e.id not in vert_ids:
            vert_ids[e.id] = len(vertices) + 1
            vertices.append(Vertex(len(vertices) + 1, tuple(float(c) for c in rd.point(e.args[1]))))
        return vert_ids[e.id]

    def edge(ref) -> int:
        e = rd.ent(ref, "EDGE_CURVE")
        if e.id not in edge_ids:
            v1, v2 = vertex(e.args[1]), vertex(e.args[2])
            curve = rd.curve(e.args[3], _flag(e.args[4]))
            edge_ids[e.id] = len(edges) + 1
            edges.append(Edge(len(edges) + 1, curve, v1, v2))
        return edge_ids[e.id]

    face_ents: list[StepEntity] = []
    shell_faces: list[list[int]] = []
    for sid in shells:
        sh = rd.ent(Ref(sid), "CLOSED_SHELL")
        ids = []
        for fref in sh.args[1]:
            face_ents.append(rd.ent(fref, "ADVANCED_FACE"))
            ids.append(len(face_ents) - 1)
        shell_faces.append(ids)

    names = []
    for fe in face_ents:
        try:
            names.append(int(str(fe.args[0]).strip()))
        except ValueError:
            names.append(None)
    use_names = None not in names and len(set(names)) == len(names) and all(n > 0 for n in names)
    fids = names if use_names else list(range(1, len(face_ents) + 1))

    faces: list[Face] = []
    for fid, fe in zip(fids, face_ents):
        surface = rd.surface(fe.args[2])
        sense = _flag(fe.args[3])
        bounds = []
        for bref in fe.args[1]:
            be = rd.ent(bref, "FACE_OUTER_BOUND", "FACE_BOUND")
            le = rd.ent(be.args[1], "EDGE_LOOP")
            coedges = []
            for oref in le.args[1]:
                oe = rd.ent(oref, "ORIENTED_EDGE")
                coedges.append(Coedge(edge(oe.args[3]), not _flag(oe.args[4])))
            if not _flag(be.args[2]):
                coedges = [Coedge(c.edge, not c.reversed) for c in reversed(coedges)]
            bounds.append((be.keyword == "FACE_OUTER_BOUND", coedges))
        if not any(is_outer for is_outer, _ in bounds) and bounds:
            extents = []
            for _, ces in bounds:
                pts = np.array([vertices[edges[c.edge - 1].start - 1].point for c in ces] + [vertices[edges[c.edge - 1].end - 1].point for c in ces])
                for c in ces:
                    cv = edges[c.edge - 1].curve
                    if isinstance(cv, CircularArc):
                        pts = np.vstack([pts, np.array(cv.center) + cv.radius * np.eye(3), np.array(cv.center) - cv.radius * np.eye(3)])
                extents.append(float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))))
            k = int(np.argmax(extents))
            bounds[k] = (True, bounds[k][1])
            diags.append(f"face {fid}: no FACE_OUTER_BOUND, promoted the largest loop to OUTER")
        loops = tuple(Loop(LoopKind.OUTER if is_outer else LoopKind.INNER, tuple(ces)) for is_outer, ces in bounds)
        faces.append(Face(fid, surface, sense, loops))

    shell_ids = tuple(tuple(fids[i] for i in ids) for ids in shell_faces)
    model = Model(tuple(vertices), tuple(edges), tuple(faces), shell_ids)
    if validate:
        check(model)
    return model


def load_step(path: str | Path, diagnostics: list[str] | None = None) -> Model:
    return to_model(tokenize_and_parse(path), diagnostics)


# --------------------------------------------------------------------------
# Writer
# --------------------------------------------------------------------------


def _real(x: float) -> str:
    r = repr(float(x))
    if "e" in r or "E" in r:
        mant, exp = r.lower().split("e")
        if "." not in mant:
            mant += "."
        return f"{mant}E{int(exp)}"
    return r if "." in r else r + "."


@dataclass
class _Writer:
    lines: list[str] = field(default_factory=list)

    def add(self, keyword: str, *args: str) -> int:
        eid = len(self.lines) + 1
        self.lines.append(f"#{eid}={keyword}({','.join(args)});")
        return eid

    def point(self, p) -> int:
        return self.add("CARTESIAN_POINT", "''", "(" + ",".join(_real(c) for c in p) + ")")

    def direction(self, d) -> int:
        return self.add("DIRECTION", "''", "(" + ",".join(_real(c) for c in d) + ")")

    def placement(self, loc, axis) -> int:
        ref = frame(axis)[0]
        return self.add("AXIS2_PLACEMENT_3D", "''", f"#{self.point(loc)}", f"#{self.direction(axis)}", f"#{self.direction(ref)}")


def export_step(model: Model, name: str = "part") -> str:
    """Serialize a model as a STEP Part 21 file using the supported subset."""
    w = _Writer()
    vmap = {v.id: w.add("VERTEX_POINT", "''", f"#{w.point(v.point)}") for v in model.vertices}
    emap = {}
    for e in model.edges:
        p0 = np.array(model.vertex_map[e.start].point)
        if isinstance(e.curve, CircularArc):
            curve = w.add("CIRCLE", "''", f"#{w.placement(e.curve.center, e.curve.axis)}", _real(e.curve.radius))
        else:
            p1 = np.array(model.vertex_map[e.end].point)
            d = p1 - p0
            length = float(np.linalg.norm(d))
            vec = w.add("VECTOR", "''", f"#{w.direction(d / length)}", _real(length))
            curve = w.add("LINE", "''", f"#{w.point(p0)}", f"#{vec}")
        emap[e.id] = w.add("EDGE_CURVE", "''", f"#{vmap[e.start]}", f"#{vmap[e.end]}", f"#{curve}", ".T.")
    face_refs = {}
    for f in model.faces:
        s = f.surface
        if isinstance(s, Plane):
            surf = w.add("PLANE", "''", f"#{w.placement(s.origin, s.normal)}")
        elif isinstance(s, Cylinder):
            surf = w.add("CYLINDRICAL_SURFACE", "''", f"#{w.placement(s.origin, s.axis)}", _real(s.radius))
        elif isinstance(s, Cone):
            surf = w.add("CONICAL_SURFACE", "''", f"#{w.placement(s.apex, s.axis)}", _real(0.0), _real(s.half_angle))
        elif isinstance(s, Sphere):
            surf = w.add("SPHERICAL_SURFACE", "''", f"#{w.placement(s.center, (0.0, 0.0, 1.0))}", _real(s.radius))
        else:
            surf = w.add("TOROIDAL_SURFACE", "''", f"#{w.placement(s.center, s.axis)}", _real(s.major_radius), _real(s.minor_radius))
        bounds = []
        for lp in f.loops:
            oes = [w.add("ORIENTED_EDGE", "''", "*", "*", f"#{emap[c.edge]}", ".F." if c.reversed else ".T.") for c in lp.coedges]
            loop = w.add("EDGE_LOOP", "''", "(" + ",".join(f"#{o}" for o in oes) + ")")
            kw = "FACE_OUTER_BOUND" if lp.kind is LoopKind.OUTER else "FACE_BOUND"
            bounds.append(w.add(kw, "''", f"#{loop}", ".T."))
        face_refs[f.id] = w.add(
            "ADVANCED_FACE", f"'{f.id}'", "(" + ",".join(f"#{b}" for b in bounds) + ")", f"#{surf}", ".T." if f.sense else ".F."
        )
    shells = model.shells or (tuple(f.id for f in model.faces),)
    for sh in shells:
        shell = w.add("CLOSED_SHELL", "''", "(" + ",".join(f"#{face_refs[i]}" for i in sh) + ")")
        w.add("MANIFOLD_SOLID_BREP", f"'{name}'", f"#{shell}")
    head = [
        "ISO-10303-21;",
        "HEADER;",
        f"FILE_DESCRIPTION(('analytic solid'),'2;1');",
        f"FILE_NAME('{name}.step','',(''),(''),'featrec','','');",
        "FILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));",
        "ENDSEC;",
        "DATA;",
    ]
    return "\n".join(head + w.lines + ["ENDSEC;", "END-ISO-10303-21;", ""])


def save_step(model: Model, path: str | Path, name: str | None = None) -> None:
    Path(path).write_text(export_step(model, name or Path(path).stem), encoding="ascii")
