"""Parametric fixture generators with exact ground-truth labels.

A part is a stock plus a list of :class:`FeatureSpec` entries.  Cuboid parts
are swept from a cross-section profile (through channels, edge fillets and
chamfers) or from a plan profile (floorless notches); holes and closed
pockets are then punched into upward-facing planar faces.  Rotational parts
are revolved from an (r, z) profile with any hole on the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Sequence

import numpy as np

from .brep import Cylinder, Model, Plane
from .builder import Builder, FaceRec, PSeg, Seg, circle, extrude, polyline, revolve
from .descriptor import Feature


class InvalidDimensions(ValueError):
    pass


class PlacementError(ValueError):
    pass


class StockKind(str, Enum):
    CUBOID = "CUBOID"
    ROTATIONAL = "ROTATIONAL"


class HoleRepresentation(str, Enum):
    ONE_CYLINDER = "ONE_CYLINDER"
    TWO_HALF_CYLINDERS = "TWO_HALF_CYLINDERS"


@dataclass(frozen=True)
class Stock:
    kind: StockKind = StockKind.CUBOID
    w: float = 60.0
    l: float = 40.0
    h: float = 20.0
    radius: float = 20.0
    height: float = 15.0
    split_wall: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", StockKind(self.kind))
        dims = (self.w, self.l, self.h) if self.kind is StockKind.CUBOID else (self.radius, self.height)
        if any(not (d > 0 and math.isfinite(d)) for d in dims):
            raise InvalidDimensions(f"stock dimensions must be positive: {dims}")


@dataclass(frozen=True)
class FeatureSpec:
    """One feature to cut.  ``params`` holds placement (``x``, ``y`` on the
    top face) and subtype dimensions."""

    feature: Feature
    params: Mapping[str, float] = field(default_factory=dict)
    representation: HoleRepresentation = HoleRepresentation.ONE_CYLINDER

    def __post_init__(self):
        object.__setattr__(self, "feature", Feature(self.feature))
        object.__setattr__(self, "representation", HoleRepresentation(self.representation))
        for k, v in self.params.items():
            if k not in ("x", "y") and not (float(v) > 0 and math.isfinite(float(v))):
                raise InvalidDimensions(f"{self.feature.value}: parameter {k} must be positive, got {v}")

    def p(self, key: str, default: float | None = None) -> float:
        if key in self.params:
            return float(self.params[key])
        if default is None:
            raise InvalidDimensions(f"{self.feature.value}: missing parameter {key!r}")
        return float(default)


@dataclass(frozen=True)
class TruthEntry:
    feature: Feature
    base_faces: tuple[int, ...]
    members: tuple[int, ...]

    @property
    def base_face(self) -> int:
        return min(self.base_faces)

    def to_dict(self) -> dict:
        return {"feature": self.feature.value, "base_face": self.base_face, "base_faces": list(self.base_faces), "members": list(self.members)}


@dataclass
class SynthesizedModel:
    name: str
    model: Model
    truth: list[TruthEntry]
    part: "Part | None" = None
    # Expected prediction when it knowingly differs from the truth
    pinned: dict[int, set[str]] | None = None
    description: str = ""

    def face_truth(self) -> dict[int, set[str]]:
        out: dict[int, set[str]] = {f.id: set() for f in self.model.faces}
        for t in self.truth:
            for fid in t.base_faces:
                out[fid].add(t.feature.value)
        return out

    def truth_to_dict(self) -> dict:
        return {
            "name": self.name,
            "faces": [{"id": fid, "labels": sorted(labels)} for fid, labels in sorted(self.face_truth().items())],
            "instances": [t.to_dict() for t in self.truth],
        }


CHANNEL_FEATURES = frozenset({Feature.SIMPLE_SLOT, Feature.OPENED_POCKET, Feature.OPENED_ISLAND, Feature.INNER_FILLET, Feature.INNER_CHAMFER})
EDGE_TREATMENTS = frozenset({Feature.OUTER_FILLET, Feature.OUTER_CHAMFER})
NOTCH_FEATURES = frozenset({Feature.FLOORLESS_SLOT, Feature.FLOORLESS_POCKET})
HOLE_FEATURES = frozenset(
    {Feature.SIMPLE_HOLE, Feature.COUNTERBORE_HOLE, Feature.COUNTERSINK_HOLE, Feature.COUNTERDRILLED_HOLE, Feature.TAPER_HOLE}
)
POCKET_CUTS = frozenset({Feature.CLOSED_POCKET, Feature.CLOSED_ISLAND})


class _Truth:
    """Collects (feature, base recs, member recs) until face ids exist."""

    def __init__(self):
        self.items: list[tuple[Feature, list[FaceRec], list[FaceRec]]] = []

    def add(self, feature: Feature, base: Sequence[FaceRec], members: Sequence[FaceRec] = ()):
        base = list(base)
        mem = base + [m for m in members if m not in base]
        self.items.append((feature, base, mem))

    def resolve(self) -> list[TruthEntry]:
        return [
            TruthEntry(f, tuple(sorted(r.id for r in base)), tuple(sorted({r.id for r in mem})))
            for f, base, mem in self.items
        ]


@dataclass
class _Region:
    """Upward-facing planar face that closed features may be cut into."""

    rec: FaceRec
    z: float
    x0: float
    x1: float
    y0: float
    y1: float
    occupied: list[tuple[float, float, float, float]] = field(default_factory=list)

    def fits(self, box) -> bool:
        x0, y0, x1, y1 = box
        m = 1.0
        if not (self.x0 + m <= x0 and x1 <= self.x1 - m and self.y0 + m <= y0 and y1 <= self.y1 - m):
            return False
        return all(x1 <= a0 or x0 >= a1 or y1 <= b0 or y0 >= b1 for a0, b0, a1, b1 in self.occupied)


@dataclass(frozen=True)
class Part:
    stock: Stock
    features: tuple[FeatureSpec, ...] = ()

    def build(self, name: str = "part") -> SynthesizedModel:
        b, truth = Builder(), _Truth()
        if self.stock.kind is StockKind.ROTATIONAL:
            _build_rotational(b, truth, self.stock, self.features)
        else:
            _build_cuboid(b, truth, self.stock, self.features)
        model = b.build()
        return SynthesizedModel(name, model, truth.resolve(), part=self)


# --------------------------------------------------------------------------
# Cuboid parts
# --------------------------------------------------------------------------


def _build_cuboid(b: Builder, truth: _Truth, st: Stock, feats: Sequence[FeatureSpec]) -> None:
    kinds = {f.feature for f in feats}
    if kinds & NOTCH_FEATURES and kinds & (CHANNEL_FEATURES | EDGE_TREATMENTS):
        raise PlacementError("floorless notches cannot be combined with channels or edge treatments")
    if kinds & NOTCH_FEATURES:
        regions, bottom = _notch_family(b, truth, st, [f for f in feats if f.feature in NOTCH_FEATURES])
    else:
        regions, bottom = _channel_family(b, truth, st, [f for f in feats if f.feature in CHANNEL_FEATURES | EDGE_TREATMENTS])
    for spec in feats:
        if spec.feature in HOLE_FEATURES:
            _cut_hole(b, truth, spec, regions, bottom)
        elif spec.feature in POCKET_CUTS:
            _cut_pocket(b, truth, spec, regions)


def _channel_family(b: Builder, truth: _Truth, st: Stock, feats: Sequence[FeatureSpec]):
    W, L, H = st.w, st.l, st.h
    segs: list[PSeg] = []
    roles: list[tuple[str, int]] = []

    def add(p, q, role, idx=-1, center=None, ccw=True):
        segs.append(PSeg(tuple(p), tuple(q), center, ccw))
        roles.append((role, idx))

    edges = [f for f in feats if f.feature in EDGE_TREATMENTS]
    if len(edges) > 1:
        raise PlacementError("only one edge treatment per part is supported")
    chans = sorted(((i, f) for i, f in enumerate(feats) if f.feature in CHANNEL_FEATURES), key=lambda t: -t[1].p("x"))
    add((0, 0), (W, 0), "bottom")
    right = W
    if edges:
        e = edges[0]
        s = e.p("radius") if e.feature is Feature.OUTER_FILLET else e.p("size")
        if s >= min(H, W) / 2:
            raise PlacementError("edge treatment too large for stock")
        add((W, 0), (W, H - s), "side")
        if e.feature is Feature.OUTER_FILLET:
            add((W, H - s), (W - s, H), "edge", -2, center=(W - s, H - s), ccw=True)
        else:
            add((W, H - s), (W - s, H), "edge", -2)
        right = W - s
    else:
        add((W, 0), (W, H), "side")
    cur = (right, H)
    for idx, f in chans:
        x0, wd, d = f.p("x"), f.p("width"), f.p("depth")
        x1, zf = x0 + wd, H - d
        if not (0 < x0 and x1 < cur[0] and d < H):
            raise PlacementError(f"{f.feature.value}: channel does not fit at x={x0}")
        add(cur, (x1, H), "top")
        add((x1, H), (x1, zf), "wall", idx)
        if f.feature is Feature.INNER_FILLET:
            r = f.p("radius")
            add((x1, zf), (x0 + r, zf), "floor", idx)
            add((x0 + r, zf), (x0, zf + r), "corner", idx, center=(x0 + r, zf + r), ccw=False)
            add((x0, zf + r), (x0, H), "wall", idx)
        elif f.feature is Feature.INNER_CHAMFER:
            c = f.p("size")
            add((x1, zf), (x0 + c, zf), "floor", idx)
            add((x0 + c, zf), (x0, zf + c), "corner", idx)
            add((x0, zf + c), (x0, H), "wall", idx)
        else:
            add((x1, zf), (x0, zf), "floor", idx)
            add((x0, zf), (x0, H), "wall", idx)
        cur = (x0, H)
    add(cur, (0, H), "top")
    add((0, H), (0, 0), "side")

    sides, _, _ = extrude(b, segs, (0, L, 0), (1, 0, 0), (0, 0, 1), L, notes=[r for r, _ in roles])
    by_idx: dict[int, dict[str, list[FaceRec]]] = {}
    regions: list[_Region] = []
    for rec, (role, idx), ps in zip(sides, roles, segs):
        by_idx.setdefault(idx, {}).setdefault(role, []).append(rec)
        if role in ("top", "floor"):
            xa, xb = sorted((ps.p[0], ps.q[0]))
            regions.append(_Region(rec, ps.p[1], xa, xb, 0.0, L))
    bottom = by_idx[-1]["bottom"][0]

    for idx, f in chans:
        g = by_idx[idx]
        floor, walls, corner = g["floor"][0], g["wall"], g.get("corner", [])
        pocket = Feature.SIMPLE_SLOT if f.feature is Feature.SIMPLE_SLOT else Feature.OPENED_POCKET
        truth.add(pocket, [floor], walls + corner)
        if f.feature in (Feature.INNER_FILLET, Feature.INNER_CHAMFER):
            truth.add(f.feature, corner)
        if f.feature is Feature.OPENED_ISLAND:
            region = next(r for r in regions if r.rec is floor)
            island_walls = _island(b, region, f)
            truth.add(Feature.OPENED_ISLAND, [floor], island_walls)
    if edges:
        truth.add(edges[0].feature, by_idx[-2]["edge"])
    return regions, bottom


def _notch_family(b: Builder, truth: _Truth, st: Stock, feats: Sequence[FeatureSpec]):
    W, L, H = st.w, st.l, st.h
    pts: list[tuple[float, float]] = [(0.0, 0.0)]
    walls: list[tuple[int, FeatureSpec]] = []
    cur_x = 0.0
    for f in sorted(feats, key=lambda f: f.p("x")):
        x0, wd = f.p("x"), f.p("width")
        yl, yr = f.p("y_left"), f.p("y_right")
        x1 = x0 + wd
        if not (cur_x < x0 and x1 < W and max(yl, yr) < L):
            raise PlacementError(f"{f.feature.value}: notch does not fit at x={x0}")
        pts += [(x0, 0.0), (x0, yl), (x1, yr), (x1, 0.0)]
        walls.append((len(pts) - 4, f))
        cur_x = x1
    pts += [(W, 0.0), (W, L), (0.0, L)]
    segs = [PSeg(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    sides, bottom, top = extrude(b, segs, (0, 0, 0), (1, 0, 0), (0, 1, 0), H)
    for k, f in walls:
        back = sides[k + 1]
        truth.add(f.feature, [back], [sides[k], sides[k + 2]])
    region = _Region(top, H, 0.0, W, 0.0, L)
    for k, f in walls:
        region.occupied.append((f.p("x") - 1, 0.0, f.p("x") + f.p("width") + 1, max(f.p("y_left"), f.p("y_right")) + 1))
    return [region], bottom


def _island(b: Builder, region: _Region, f: FeatureSpec) -> list[FaceRec]:
    x0, y0 = f.p("island_x"), f.p("island_y")
    x1, y1 = x0 + f.p("island_w"), y0 + f.p("island_l")
    box = (x0, y0, x1, y1)
    if not region.fits(box):
        raise PlacementError(f"{f.feature.value}: island does not fit in its floor")
    region.occupied.append(box)
    zf, zt = region.z, region.z + f.p("island_h")
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    region.rec.loops.append(polyline([(x, y, zf) for x, y in corners]))
    walls = []
    for (xa, ya), (xb, yb) in zip(corners, corners[1:] + corners[:1]):
        n = (yb - ya, -(xb - xa), 0.0)
        walls.append(b.plane((xa, ya, zf), n, polyline([(xa, ya, zf), (xb, yb, zf), (xb, yb, zt), (xa, ya, zt)])))
    b.plane((x0, y0, zt), (0, 0, 1), polyline([(x, y, zt) for x, y in corners]))
    return walls


def _pick_region(regions: Sequence[_Region], box, spec: FeatureSpec) -> _Region:
    for r in reversed(regions):
        if r.fits(box):
            return r
    raise PlacementError(f"{spec.feature.value}: no free upward face at x={spec.params.get('x')}, y={spec.params.get('y')}")


def _cut_pocket(b: Builder, truth: _Truth, spec: FeatureSpec, regions: list[_Region]) -> None:
    x0, y0 = spec.p("x"), spec.p("y")
    x1, y1 = x0 + spec.p("w"), y0 + spec.p("l")
    box = (x0, y0, x1, y1)
    region = _pick_region(regions, box, spec)
    zt = region.z
    zf = zt - spec.p("depth")
    if zf <= 0:
        raise PlacementError(f"{spec.feature.value}: pocket deeper than the material below it")
    region.occupied.append(box)
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    region.rec.loops.append(polyline([(x, y, zt) for x, y in corners]))
    walls = []
    for (xa, ya), (xb, yb) in zip(corners, corners[1:] + corners[:1]):
        n = (-(yb - ya), xb - xa, 0.0)
        walls.append(b.plane((xa, ya, zf), n, polyline([(xa, ya, zf), (xb, yb, zf), (xb, yb, zt), (xa, ya, zt)])))
    floor = b.plane((x0, y0, zf), (0, 0, 1), polyline([(x, y, zf) for x, y in corners]))
    floor_region = _Region(floor, zf, x0, x1, y0, y1)
    regions.append(floor_region)
    truth.add(Feature.CLOSED_POCKET, [floor], walls)
    if spec.feature is Feature.CLOSED_ISLAND:
        island_walls = _island(b, floor_region, spec)
        truth.add(Feature.CLOSED_ISLAND, [floor], island_walls)


def _hole_profile(spec: FeatureSpec, zt: float, zb: float):
    """(r, z) polyline from the top rim down, plus the role of each segment."""
    f = spec.feature
    if f is Feature.SIMPLE_HOLE:
        r = spec.p("radius")
        if "depth" in spec.params:
            z = zt - spec.p("depth")
            return [(r, zt), (r, z), (0.0, z)], ["bore", "floor"]
        return [(r, zt), (r, zb)], ["bore"]
    if f is Feature.COUNTERBORE_HOLE:
        R, D, r = spec.p("r_outer"), spec.p("d_outer"), spec.p("r_inner")
        if r >= R:
            raise InvalidDimensions("counterbore needs r_inner < r_outer")
        pts = [(R, zt), (R, zt - D), (r, zt - D)]
        if "d_inner" in spec.params:
            z = zt - D - spec.p("d_inner")
            return pts + [(r, z), (0.0, z)], ["outer", "base", "inner", "floor"]
        return pts + [(r, zb)], ["outer", "base", "inner"]
    if f is Feature.COUNTERSINK_HOLE:
        R, r = spec.p("r_outer"), spec.p("r_inner")
        a = math.radians(spec.p("angle", 45.0))
        return [(R, zt), (r, zt - (R - r) / math.tan(a)), (r, zb)], ["base", "inner"]
    if f is Feature.COUNTERDRILLED_HOLE:
        R, D, r = spec.p("r_outer"), spec.p("d_outer"), spec.p("r_inner")
        a = math.radians(spec.p("angle", 60.0))
        z = zt - D - (R - r) / math.tan(a)
        return [(R, zt), (R, zt - D), (r, z), (r, zb)], ["outer", "base", "inner"]
    if f is Feature.TAPER_HOLE:
        return [(spec.p("r_top"), zt), (spec.p("r_bottom"), zb)], ["base"]
    raise PlacementError(f"{f.value} is not a hole")


def _hole_truth(truth: _Truth, spec: FeatureSpec, roles: Sequence[str], faces: Sequence[list[FaceRec]]) -> None:
    by_role: dict[str, list[FaceRec]] = {}
    for role, recs in zip(roles, faces):
        by_role.setdefault(role, []).extend(recs)
    if spec.feature is Feature.SIMPLE_HOLE:
        truth.add(spec.feature, by_role["bore"])
        return
    members = [rec for role in roles if role != "floor" for rec in by_role[role]]
    truth.add(spec.feature, by_role["base"], members)


def _split_flags(spec: FeatureSpec, pts) -> list[bool]:
    if spec.representation is not HoleRepresentation.TWO_HALF_CYLINDERS:
        return [False] * (len(pts) - 1)
    return [abs(p[0] - q[0]) < 1e-12 and p[0] > 0 for p, q in zip(pts, pts[1:])]


def _cut_hole(b: Builder, truth: _Truth, spec: FeatureSpec, regions: list[_Region], bottom: FaceRec) -> None:
    cx, cy = spec.p("x"), spec.p("y")
    rmax = max(spec.params.get(k, 0.0) for k in ("radius", "r_outer", "r_top"))
    box = (cx - rmax, cy - rmax, cx + rmax, cy + rmax)
    region = _pick_region(regions, box, spec)
    pts, roles = _hole_profile(spec, region.z, 0.0)
    if min(z for _, z in pts) < -1e-9 or (pts[-1][0] > 0 and region.rec is bottom):
        raise PlacementError(f"{spec.feature.value}: hole deeper than the material below it")
    region.occupied.append(box)
    faces, (top_ring, bottom_ring) = revolve(b, pts, (cx, cy), split=_split_flags(spec, pts), closed=False, notes=roles)
    region.rec.loops.append(top_ring)
    if bottom_ring:
        bottom.loops.append(bottom_ring)
    _hole_truth(truth, spec, roles, faces)


# --------------------------------------------------------------------------
# Rotational parts
# --------------------------------------------------------------------------


def _build_rotational(b: Builder, truth: _Truth, st: Stock, feats: Sequence[FeatureSpec]) -> None:
    R, H = st.radius, st.height
    holes = [f for f in feats if f.feature in HOLE_FEATURES]
    rims = [f for f in feats if f.feature in EDGE_TREATMENTS]
    other = [f for f in feats if f.feature not in HOLE_FEATURES | EDGE_TREATMENTS]
    if other or len(holes) > 1 or len(rims) > 1:
        raise PlacementError("rotational stock supports one axial hole and one rim treatment")
    hole = holes[0] if holes else None
    hole_pts, hole_roles = ([(0.0, H)], []) if hole is None else _hole_profile(hole, H, 0.0)
    if hole is not None and max(p[0] for p in hole_pts) >= R - 2.0:
        raise PlacementError("hole too wide for the stock")

    segs: list[PSeg] = []
    roles: list[str] = []
    start = hole_pts[-1] if hole_pts[-1][1] == 0.0 else (0.0, 0.0)
    segs.append(PSeg(start, (R, 0.0)))
    roles.append("bottom")
    if rims:
        s = rims[0].p("radius") if rims[0].feature is Feature.OUTER_FILLET else rims[0].p("size")
        segs.append(PSeg((R, 0.0), (R, H - s)))
        roles.append("wall")
        if rims[0].feature is Feature.OUTER_FILLET:
            segs.append(PSeg((R, H - s), (R - s, H), (R - s, H - s), True))
        else:
            segs.append(PSeg((R, H - s), (R - s, H)))
        roles.append("rim")
        top_from = (R - s, H)
    else:
        segs.append(PSeg((R, 0.0), (R, H)))
        roles.append("wall")
        top_from = (R, H)
    segs.append(PSeg(top_from, hole_pts[0]))
    roles.append("top")
    for p, q, role in zip(hole_pts, hole_pts[1:], hole_roles):
        segs.append(PSeg(p, q))
        roles.append(role)
    if hole_pts[-1][1] != 0.0:
        # blind hole: close along the axis
        segs.append(PSeg(hole_pts[-1], (0.0, 0.0)))
        roles.append("axis")

    splits = [False] * len(segs)
    for k, (ps, role) in enumerate(zip(segs, roles)):
        if role == "wall" and st.split_wall:
            splits[k] = True
        elif hole is not None and role not in ("bottom", "top", "wall", "rim", "axis", "floor"):
            splits[k] = hole.representation is HoleRepresentation.TWO_HALF_CYLINDERS and ps.p[0] == ps.q[0] and ps.p[0] > 0
    faces, _ = revolve(b, segs, (0.0, 0.0), split=splits, closed=True, notes=roles)
    if hole is not None:
        hole_faces = [fs for fs, role in zip(faces, roles) if role in hole_roles]
        hr = [role for role in roles if role in hole_roles]
        _hole_truth(truth, hole, hr, hole_faces)
    if rims:
        truth.add(rims[0].feature, faces[roles.index("rim")])


# --------------------------------------------------------------------------
# Public constructors
# --------------------------------------------------------------------------


def make_stock(stock: Stock | StockKind | str = StockKind.CUBOID, **dims: float) -> Model:
    """Plain stock solid: a six-face cuboid or a revolved cylinder."""
    if not isinstance(stock, Stock):
        stock = Stock(StockKind(stock), **dims)
    return Part(stock).build("stock").model


def apply_feature(base: "SynthesizedModel | Part | Stock", spec: FeatureSpec, name: str | None = None) -> SynthesizedModel:
    """Add a feature to a generated part and rebuild its topology."""
    if isinstance(base, SynthesizedModel):
        if base.part is None:
            raise PlacementError("model was not produced from a part description")
        part = base.part
    elif isinstance(base, Stock):
        part = Part(base)
    else:
        part = base
    part = replace(part, features=part.features + (spec,))
    return part.build(name or spec.feature.value)


def generate(feature: Feature | str, params: Mapping[str, Any] | None = None, name: str | None = None) -> SynthesizedModel:
    """Single-feature fixture with default dimensions, optionally overridden.

    ``params`` may also hold ``stock`` (CUBOID or ROTATIONAL), ``representation``
    and stock dimensions prefixed with ``stock_`` (``stock_w``, ``stock_radius``...).
    """
    feature = Feature(feature)
    params = dict(params or {})
    # stock dimensions carry a prefix so they never shadow feature parameters
    stock_kw = {k[6:]: float(params.pop(k)) for k in ("stock_w", "stock_l", "stock_h", "stock_radius", "stock_height") if k in params}
    rep = HoleRepresentation(params.pop("representation", HoleRepresentation.ONE_CYLINDER))
    stock_kind = StockKind(params.pop("stock", StockKind.CUBOID))
    defaults = dict(_DEFAULTS[feature])
    defaults.update({k: float(v) for k, v in params.items()})
    stock = Stock(stock_kind, **stock_kw)
    if stock_kind is StockKind.ROTATIONAL:
        defaults.pop("x", None)
        defaults.pop("y", None)
    return apply_feature(stock, FeatureSpec(feature, defaults, rep), name or feature.value)


_DEFAULTS: dict[Feature, dict[str, float]] = {
    Feature.SIMPLE_HOLE: {"x": 20.0, "y": 20.0, "radius": 4.0},
    Feature.COUNTERBORE_HOLE: {"x": 25.0, "y": 20.0, "r_outer": 7.0, "d_outer": 6.0, "r_inner": 3.5},
    Feature.COUNTERSINK_HOLE: {"x": 25.0, "y": 20.0, "r_outer": 7.0, "r_inner": 3.5, "angle": 45.0},
    Feature.COUNTERDRILLED_HOLE: {"x": 25.0, "y": 20.0, "r_outer": 6.0, "d_outer": 5.0, "r_inner": 3.0, "angle": 60.0},
    Feature.TAPER_HOLE: {"x": 25.0, "y": 20.0, "r_top": 6.0, "r_bottom": 3.0},
    Feature.SIMPLE_SLOT: {"x": 26.0, "width": 8.0, "depth": 5.0},
    Feature.OPENED_POCKET: {"x": 20.0, "width": 20.0, "depth": 6.0},
    Feature.FLOORLESS_SLOT: {"x": 26.0, "width": 8.0, "y_left": 10.0, "y_right": 16.0},
    Feature.FLOORLESS_POCKET: {"x": 20.0, "width": 20.0, "y_left": 10.0, "y_right": 30.0},
    Feature.CLOSED_POCKET: {"x": 18.0, "y": 12.0, "w": 24.0, "l": 16.0, "depth": 6.0},
    Feature.CLOSED_ISLAND: {
        "x": 10.0, "y": 8.0, "w": 40.0, "l": 24.0, "depth": 8.0,
        "island_x": 22.0, "island_y": 14.0, "island_w": 16.0, "island_l": 12.0, "island_h": 4.0,
    },
    Feature.OPENED_ISLAND: {
        "x": 15.0, "width": 30.0, "depth": 8.0,
        "island_x": 24.0, "island_y": 12.0, "island_w": 12.0, "island_l": 16.0, "island_h": 4.0,
    },
    Feature.INNER_FILLET: {"x": 20.0, "width": 20.0, "depth": 6.0, "radius": 2.0},
    Feature.OUTER_FILLET: {"radius": 2.0},
    Feature.INNER_CHAMFER: {"x": 20.0, "width": 20.0, "depth": 6.0, "size": 2.0},
    Feature.OUTER_CHAMFER: {"size": 2.0},
}


# --------------------------------------------------------------------------
# Hand-built fixtures
# --------------------------------------------------------------------------


def counterbore_fig8() -> SynthesizedModel:
    """Counterbore whose large bore breaks through the x = W side face.

    The annulus is face 7; its outer loop meets two large-bore halves and the
    notched side face, its inner loop meets the two small-bore halves.
    """
    W, L, H = 60.0, 40.0, 20.0
    c = np.array([56.0, 20.0])
    R, r, zb = 6.0, 3.0, 15.0
    beta = math.acos((W - c[0]) / R)
    ez = (0.0, 0.0, 1.0)

    def P(rad, th, z):
        return (c[0] + rad * math.cos(th), c[1] + rad * math.sin(th), z)

    ya, yb = P(R, -beta, 0)[1], P(R, beta, 0)[1]
    b = Builder()
    small_bot = circle((c[0], c[1], 0.0), ez, r, (1, 0, 0), split=True)
    b.plane((0, 0, 0), (0, 0, -1), polyline([(0, 0, 0), (W, 0, 0), (W, L, 0), (0, L, 0)]), [small_bot])

    def bore_arcs(z):
        return [Seg.arc((c[0], c[1], z), ez, P(R, beta, z), P(R, math.pi, z)), Seg.arc((c[0], c[1], z), ez, P(R, math.pi, z), P(R, 2 * math.pi - beta, z))]

    top = polyline([(0, L, H), (0, 0, H), (W, 0, H), (W, ya, H)], closed=False) + bore_arcs(H)
    top += polyline([(W, yb, H), (W, L, H), (0, L, H)], closed=False)
    b.plane((0, 0, H), (0, 0, 1), top)
    b.plane((0, 0, 0), (-1, 0, 0), polyline([(0, 0, 0), (0, L, 0), (0, L, H), (0, 0, H)]))
    b.plane((W, 0, 0), (1, 0, 0), polyline([(W, 0, 0), (W, L, 0), (W, L, H), (W, yb, H), (W, yb, zb), (W, ya, zb), (W, ya, H), (W, 0, H)]))
    b.plane((0, 0, 0), (0, -1, 0), polyline([(0, 0, 0), (W, 0, 0), (W, 0, H), (0, 0, H)]))
    b.plane((0, L, 0), (0, 1, 0), polyline([(0, L, 0), (W, L, 0), (W, L, H), (0, L, H)]))
    small_mid = circle((c[0], c[1], zb), ez, r, (1, 0, 0), split=True)
    annulus = b.plane((c[0], c[1], zb), ez, bore_arcs(zb) + [Seg.line((W, ya, zb), (W, yb, zb))], [small_mid])
    bore = Cylinder((c[0], c[1], 0.0), ez, R)
    halves = []
    for lo, hi in ((beta, math.pi), (math.pi, 2 * math.pi - beta)):
        loop = [
            Seg.arc((c[0], c[1], H), ez, P(R, lo, H), P(R, hi, H)),
            Seg.arc((c[0], c[1], zb), ez, P(R, lo, zb), P(R, hi, zb)),
            Seg.line(P(R, lo, zb), P(R, lo, H)),
            Seg.line(P(R, hi, zb), P(R, hi, H)),
        ]
        halves.append(b.face(bore, False, loop))
    small = Cylinder((c[0], c[1], 0.0), ez, r)
    smalls = []
    for lo, hi in ((0.0, math.pi), (math.pi, 2 * math.pi)):
        loop = [
            Seg.arc((c[0], c[1], zb), ez, P(r, lo, zb), P(r, hi, zb)),
            Seg.arc((c[0], c[1], 0.0), ez, P(r, lo, 0.0), P(r, hi, 0.0)),
            Seg.line(P(r, lo, 0.0), P(r, lo, zb)),
            Seg.line(P(r, hi, 0.0), P(r, hi, zb)),
        ]
        smalls.append(b.face(small, False, loop))
    model = b.build()
    truth = [TruthEntry(Feature.COUNTERBORE_HOLE, (annulus.id,), tuple(sorted([annulus.id] + [h.id for h in halves + smalls])))]
    return SynthesizedModel("counterbore_fig8", model, truth, description="counterbore breaking through a side face")


def fig12b_merged_floor() -> SynthesizedModel:
    """A through slot crossing a closed pocket of equal depth: both floors
    merge into one cross-shaped face, which is recognized as a slot."""
    W, L, H, zf = 60.0, 40.0, 20.0, 15.0
    sx0, sx1 = 26.0, 34.0
    px0, px1, py0, py1 = 18.0, 42.0, 12.0, 28.0
    b = Builder()
    b.plane((0, 0, 0), (0, 0, -1), polyline([(0, 0, 0), (W, 0, 0), (W, L, 0), (0, L, 0)]))
    left = [(0, 0), (sx0, 0), (sx0, py0), (px0, py0), (px0, py1), (sx0, py1), (sx0, L), (0, L)]
    right = [(sx1, 0), (W, 0), (W, L), (sx1, L), (sx1, py1), (px1, py1), (px1, py0), (sx1, py0)]
    b.plane((0, 0, H), (0, 0, 1), polyline([(x, y, H) for x, y in left]))
    b.plane((W, 0, H), (0, 0, 1), polyline([(x, y, H) for x, y in right]))
    b.plane((0, 0, 0), (-1, 0, 0), polyline([(0, 0, 0), (0, L, 0), (0, L, H), (0, 0, H)]))
    b.plane((W, 0, 0), (1, 0, 0), polyline([(W, 0, 0), (W, L, 0), (W, L, H), (W, 0, H)]))
    for y, n in ((0.0, -1.0), (L, 1.0)):
        b.plane((0, y, 0), (0, n, 0), polyline([(0, y, 0), (W, y, 0), (W, y, H), (sx1, y, H), (sx1, y, zf), (sx0, y, zf), (sx0, y, H), (0, y, H)]))
    cross = [(sx0, 0), (sx1, 0), (sx1, py0), (px1, py0), (px1, py1), (sx1, py1), (sx1, L), (sx0, L), (sx0, py1), (px0, py1), (px0, py0), (sx0, py0)]
    floor = b.plane((sx0, 0, zf), (0, 0, 1), polyline([(x, y, zf) for x, y in cross]))
    walls = []
    for (xa, ya), (xb, yb) in zip(cross, cross[1:] + cross[:1]):
        if (ya == 0.0 and yb == 0.0) or (ya == L and yb == L):
            continue
        n = (-(yb - ya), xb - xa, 0.0)
        walls.append(b.plane((xa, ya, zf), n, polyline([(xa, ya, zf), (xb, yb, zf), (xb, yb, H), (xa, ya, H)])))
    model = b.build()
    slot_walls = [w.id for w in walls if any(abs(w.surface.origin[0] - x) < 1e-9 for x in (sx0, sx1)) and w.surface.normal[0] != 0.0]
    truth = [
        TruthEntry(Feature.SIMPLE_SLOT, (floor.id,), tuple(sorted({floor.id, *slot_walls}))),
        TruthEntry(Feature.CLOSED_POCKET, (floor.id,), tuple(sorted({floor.id, *(w.id for w in walls)}))),
    ]
    return SynthesizedModel(
        "fig12b_merged_floor",
        model,
        truth,
        pinned={floor.id: {Feature.SIMPLE_SLOT.value}},
        description="slot and pocket floors merged into one face",
    )


def fig12a_steep_floorless() -> SynthesizedModel:
    """Floorless pocket whose back wall is nearly square to the opening, so
    the interference ray escapes and the wall reads as an opened pocket."""
    sm = generate(Feature.FLOORLESS_POCKET, {"x": 20.0, "width": 20.0, "y_left": 10.0, "y_right": 14.0}, name="fig12a_steep_floorless")
    base = sm.truth[0].base_face
    sm.pinned = {base: {Feature.OPENED_POCKET.value}}
    sm.description = "floorless pocket misread as an opened pocket"
    return sm


def multi_feature_block() -> SynthesizedModel:
    stock = Stock(StockKind.CUBOID, 100.0, 60.0, 20.0)
    specs = (
        FeatureSpec(Feature.INNER_FILLET, {"x": 10.0, "width": 20.0, "depth": 6.0, "radius": 2.0}),
        FeatureSpec(Feature.SIMPLE_SLOT, {"x": 60.0, "width": 8.0, "depth": 5.0}),
        FeatureSpec(Feature.CLOSED_POCKET, {"x": 74.0, "y": 10.0, "w": 20.0, "l": 20.0, "depth": 5.0}),
        FeatureSpec(Feature.SIMPLE_HOLE, {"x": 45.0, "y": 45.0, "radius": 3.0}),
        FeatureSpec(Feature.COUNTERBORE_HOLE, {"x": 45.0, "y": 15.0, "r_outer": 6.0, "d_outer": 4.0, "r_inner": 3.0}),
    )
    return Part(stock, specs).build("multi_feature_block")


def pocket_with_hole() -> SynthesizedModel:
    stock = Stock()
    specs = (
        FeatureSpec(Feature.CLOSED_POCKET, {"x": 14.0, "y": 8.0, "w": 32.0, "l": 24.0, "depth": 6.0}),
        FeatureSpec(Feature.SIMPLE_HOLE, {"x": 30.0, "y": 20.0, "radius": 4.0}),
    )
    return Part(stock, specs).build("pocket_with_hole")


def standard_suite() -> list[SynthesizedModel]:
    """Deterministic fixture set covering every subtype, both hole encodings,
    both stock kinds, a multi-feature block and two pinned misrecognitions."""
    two = HoleRepresentation.TWO_HALF_CYLINDERS
    rot = Stock(StockKind.ROTATIONAL, radius=20.0, height=15.0)
    suite = [
        generate(Feature.SIMPLE_HOLE, name="simple_hole_one_cylinder"),
        generate(Feature.SIMPLE_HOLE, {"representation": two}, name="simple_hole_two_half_cylinders"),
        generate(Feature.SIMPLE_HOLE, {"depth": 10.0}, name="simple_hole_blind"),
        counterbore_fig8(),
        generate(Feature.COUNTERBORE_HOLE, name="counterbore_centered"),
        generate(Feature.COUNTERBORE_HOLE, {"representation": two}, name="counterbore_two_half_cylinders"),
        generate(Feature.COUNTERSINK_HOLE),
        generate(Feature.COUNTERDRILLED_HOLE),
        generate(Feature.TAPER_HOLE),
        generate(Feature.SIMPLE_SLOT),
        generate(Feature.FLOORLESS_SLOT),
        generate(Feature.CLOSED_POCKET),
        generate(Feature.OPENED_POCKET),
        generate(Feature.FLOORLESS_POCKET),
        generate(Feature.CLOSED_ISLAND),
        generate(Feature.OPENED_ISLAND),
        generate(Feature.INNER_FILLET),
        generate(Feature.OUTER_FILLET),
        generate(Feature.INNER_CHAMFER),
        generate(Feature.OUTER_CHAMFER),
        apply_feature(rot, FeatureSpec(Feature.SIMPLE_HOLE, {"radius": 4.0}), "rotational_simple_hole"),
        apply_feature(
            replace(rot, split_wall=True), FeatureSpec(Feature.SIMPLE_HOLE, {"radius": 4.0}, two), "rotational_split_wall_hole"
        ),
        apply_feature(rot, FeatureSpec(Feature.COUNTERBORE_HOLE, {"r_outer": 8.0, "d_outer": 5.0, "r_inner": 4.0}), "rotational_counterbore"),
        apply_feature(rot, FeatureSpec(Feature.OUTER_CHAMFER, {"size": 2.0}), "rotational_outer_chamfer"),
        apply_feature(rot, FeatureSpec(Feature.OUTER_FILLET, {"radius": 2.0}), "rotational_outer_fillet"),
        multi_feature_block(),
        pocket_with_hole(),
        fig12a_steep_floorless(),
        fig12b_merged_floor(),
    ]
    return suite
