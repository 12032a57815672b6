"""Per-face descriptors and range-constrained feature templates."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Union

from .brep import FaceType, LoopKind, Model, Plane, SchemaError
from .geom import (
    DEFAULT_TOL,
    AngleClass,
    ContinuityClass,
    Convexity,
    Tolerances,
    angle_class,
    coaxial,
    continuity,
    convexity,
    edge_point,
    face_normal,
    face_width,
    interference,
    is_rotational,
    parallel_pair,
)


class Feature(str, Enum):
    SIMPLE_HOLE = "simple_hole"
    COUNTERBORE_HOLE = "counterbore_hole"
    COUNTERDRILLED_HOLE = "counterdrilled_hole"
    COUNTERSINK_HOLE = "countersink_hole"
    TAPER_HOLE = "taper_hole"
    SIMPLE_SLOT = "simple_slot"
    FLOORLESS_SLOT = "floorless_slot"
    CLOSED_POCKET = "closed_pocket"
    OPENED_POCKET = "opened_pocket"
    FLOORLESS_POCKET = "floorless_pocket"
    CLOSED_ISLAND = "closed_island"
    OPENED_ISLAND = "opened_island"
    INNER_FILLET = "inner_fillet"
    OUTER_FILLET = "outer_fillet"
    INNER_CHAMFER = "inner_chamfer"
    OUTER_CHAMFER = "outer_chamfer"


COMPOSITE_HOLES = frozenset({Feature.COUNTERBORE_HOLE, Feature.COUNTERDRILLED_HOLE, Feature.COUNTERSINK_HOLE})
SUPPRESSIBLE_HOLES = frozenset({Feature.SIMPLE_HOLE, Feature.TAPER_HOLE})
EDGE_FEATURES = frozenset({Feature.INNER_FILLET, Feature.OUTER_FILLET, Feature.INNER_CHAMFER, Feature.OUTER_CHAMFER})


class CurvatureClass(str, Enum):
    POSITIVE = "POSITIVE"
    FLAT = "FLAT"
    NEGATIVE = "NEGATIVE"


class WidthLevel(str, Enum):
    LONGER = "LONGER"
    SHORTER = "SHORTER"


@dataclass(frozen=True)
class ItemValue:
    """``face_type | convexity : count``."""

    face_type: FaceType
    convexity: Convexity
    count: int

    def __post_init__(self):
        object.__setattr__(self, "face_type", FaceType(self.face_type))
        object.__setattr__(self, "convexity", Convexity(self.convexity))
        if int(self.count) != self.count or self.count < 0:
            raise SchemaError(f"item count must be a non-negative integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def key(self) -> tuple[FaceType, Convexity]:
        return (self.face_type, self.convexity)

    def __str__(self) -> str:
        return f"{self.face_type.value}|{self.convexity.value}:{self.count}"

    @classmethod
    def parse(cls, value: Any) -> "ItemValue":
        if isinstance(value, ItemValue):
            return value
        if isinstance(value, str):
            m = re.fullmatch(r"\s*(\w+)\s*\|\s*(\w+)\s*:\s*(\d+)\s*", value)
            if not m:
                raise SchemaError(f"cannot parse item value {value!r}")
            ft, cv, n = m.groups()
            return cls(ft.upper(), cv.upper(), int(n))
        if isinstance(value, Mapping):
            try:
                return cls(str(value["face_type"]).upper(), str(value["convexity"]).upper(), value["count"])
            except KeyError as exc:
                raise SchemaError(f"item value missing {exc}") from None
        raise SchemaError(f"cannot parse item value {value!r}")


class ItemValueSet:
    """Multiset of adjacency counts keyed by (face type, convexity)."""

    __slots__ = ("_counts",)

    def __init__(self, entries: Iterable[ItemValue] = ()):
        counts: Counter = Counter()
        for e in entries:
            if e.face_type is FaceType.ANY:
                raise ValueError("ANY is not allowed in extracted item sets")
            counts[e.key] += e.count
        self._counts = {k: v for k, v in counts.items() if v > 0}

    @classmethod
    def from_counter(cls, counter: Mapping[tuple[FaceType, Convexity], int]) -> "ItemValueSet":
        return cls(ItemValue(ft, cv, n) for (ft, cv), n in counter.items())

    def count(self, face_type: FaceType, conv: Convexity) -> int:
        return self._counts.get((face_type, conv), 0)

    def entries(self) -> list[ItemValue]:
        return [ItemValue(ft, cv, n) for (ft, cv), n in sorted(self._counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value))]

    def total(self) -> int:
        return sum(self._counts.values())

    def keys(self):
        return self._counts.keys()

    def __eq__(self, other):
        return isinstance(other, ItemValueSet) and self._counts == other._counts

    def __hash__(self):
        return hash(frozenset(self._counts.items()))

    def __len__(self):
        return len(self._counts)

    def __repr__(self):
        return "{" + ", ".join(str(e) for e in self.entries()) + "}"

    def to_list(self) -> list[str]:
        return [str(e) for e in self.entries()]


@dataclass(frozen=True)
class MachiningConditions:
    slot_width_threshold: float = 12.0
    fillet_width_threshold: float = 3.0
    chamfer_width_threshold: float = 3.0

    def __post_init__(self):
        for name in ("slot_width_threshold", "fillet_width_threshold", "chamfer_width_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


FACE_ITEMS = ("f_facetype", "f_curvature", "f_facemachining", "f_filletmachining", "f_chamfermachining")
LOOP_KINDS = ("convexity", "continuity", "parallel", "perpendicular", "acute", "obtuse")
OL_ITEMS = tuple(f"ol_{k}" for k in LOOP_KINDS)
IL_ITEMS = tuple(f"il_{k}" for k in LOOP_KINDS)
AUX_ITEMS = ("ax_parallel", "ax_coaxial", "ax_interference")
ITEM_NAMES = FACE_ITEMS + OL_ITEMS + IL_ITEMS + AUX_ITEMS
LOOP_ITEMS = frozenset(OL_ITEMS + IL_ITEMS)

_ANGLE_ITEM = {
    AngleClass.PARALLEL: "parallel",
    AngleClass.PERPENDICULAR: "perpendicular",
    AngleClass.ACUTE: "acute",
    AngleClass.OBTUSE: "obtuse",
}


@dataclass(frozen=True)
class Descriptor:
    face_id: int
    f_facetype: FaceType
    f_curvature: CurvatureClass
    f_facemachining: WidthLevel
    f_filletmachining: WidthLevel
    f_chamfermachining: WidthLevel
    ol_convexity: ItemValueSet
    ol_continuity: ItemValueSet
    ol_parallel: ItemValueSet
    ol_perpendicular: ItemValueSet
    ol_acute: ItemValueSet
    ol_obtuse: ItemValueSet
    il_convexity: ItemValueSet
    il_continuity: ItemValueSet
    il_parallel: ItemValueSet
    il_perpendicular: ItemValueSet
    il_acute: ItemValueSet
    il_obtuse: ItemValueSet
    ax_parallel: bool
    ax_coaxial: bool
    ax_interference: bool
    # adjacent face id -> (loop class, face type, convexity); used to find
    # the faces that witness a template's loop constraints
    neighbours: tuple[tuple[int, str, FaceType, Convexity, tuple[str, ...]], ...] = field(default=(), compare=False, repr=False)

    def item(self, name: str):
        if name not in ITEM_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"face_id": self.face_id}
        for name in ITEM_NAMES:
            v = getattr(self, name)
            if isinstance(v, ItemValueSet):
                out[name] = v.to_list()
            elif isinstance(v, bool):
                out[name] = "TRUE" if v else "FALSE"
            else:
                out[name] = v.value
        return out


def curvature_class(face) -> CurvatureClass:
    if isinstance(face.surface, Plane):
        return CurvatureClass.FLAT
    return CurvatureClass.POSITIVE if face.sense else CurvatureClass.NEGATIVE


def _level(width: float | None, threshold: float) -> WidthLevel:
    if width is None or width >= threshold:
        return WidthLevel.LONGER
    return WidthLevel.SHORTER


def extract_descriptor(
    model: Model,
    face_id: int,
    conditions: MachiningConditions = MachiningConditions(),
    tol: Tolerances = DEFAULT_TOL,
    fold_angles: bool = True,
) -> Descriptor:
    face = model.face(face_id)
    items: dict[str, Counter] = {n: Counter() for n in OL_ITEMS + IL_ITEMS}
    neighbours = []
    adj_by_loop: dict[str, list[int]] = {"ol": [], "il": []}

    for prefix, kind in (("ol", LoopKind.OUTER), ("il", LoopKind.INNER)):
        seen: set[int] = set()
        for lp in face.loops:
            if lp.kind is not kind:
                continue
            for ce in lp.coedges:
                uses = model.edge_uses.get(ce.edge, [])
                other = [u for u in uses if not (u.face == face_id and u.coedge == ce)]
                if not other:
                    continue
                adj = other[0].face
                if adj == face_id or adj in seen:
                    continue
                seen.add(adj)
                adj_face = model.face(adj)
                conv = convexity(model, face_id, adj, ce, tol)
                key = (adj_face.face_type, conv)
                tags = [f"{prefix}_convexity"]
                items[f"{prefix}_convexity"][key] += 1
                if continuity(model, face_id, adj, ce.edge, tol) is ContinuityClass.HIGHER:
                    items[f"{prefix}_continuity"][key] += 1
                    tags.append(f"{prefix}_continuity")
                mid = edge_point(model, model.edge_map[ce.edge], 0.5)
                ang = angle_class(face_normal(face, mid), face_normal(adj_face, mid), tol, fold=fold_angles)
                items[f"{prefix}_{_ANGLE_ITEM[ang]}"][key] += 1
                tags.append(f"{prefix}_{_ANGLE_ITEM[ang]}")
                adj_by_loop[prefix].append(adj)
                neighbours.append((adj, prefix, adj_face.face_type, conv, tuple(tags)))

    found, width = parallel_pair(model, face_id, tol)
    fw = face_width(model, face_id)
    is_coax = any(
        coaxial(model, a, b, tol)
        for a in adj_by_loop["ol"]
        if is_rotational(model.face(a))
        for b in adj_by_loop["il"]
        if is_rotational(model.face(b))
    )
    return Descriptor(
        face_id=face_id,
        f_facetype=face.face_type,
        f_curvature=curvature_class(face),
        f_facemachining=_level(width if found else None, conditions.slot_width_threshold),
        f_filletmachining=_level(fw, conditions.fillet_width_threshold),
        f_chamfermachining=_level(fw, conditions.chamfer_width_threshold),
        **{n: ItemValueSet.from_counter(c) for n, c in items.items()},
        ax_parallel=found,
        ax_coaxial=is_coax,
        ax_interference=interference(model, face_id, tol),
        neighbours=tuple(neighbours),
    )


# --------------------------------------------------------------------------
# Templates
# --------------------------------------------------------------------------


class WeightSumError(ValueError):
    pass


ScalarValue = Union[FaceType, CurvatureClass, WidthLevel, bool]
SetValue = tuple[ItemValue, ...]
ConstraintValue = Union[ScalarValue, ItemValue, SetValue]

_SCALAR_TYPES = {
    "f_facetype": FaceType,
    "f_curvature": CurvatureClass,
    "f_facemachining": WidthLevel,
    "f_filletmachining": WidthLevel,
    "f_chamfermachining": WidthLevel,
}


def _parse_scalar(name: str, raw: Any) -> ScalarValue:
    if name in AUX_ITEMS:
        if isinstance(raw, bool):
            return raw
        if isinstance(raw, str) and raw.upper() in ("TRUE", "FALSE"):
            return raw.upper() == "TRUE"
        raise SchemaError(f"{name}: expected TRUE/FALSE, got {raw!r}")
    try:
        return _SCALAR_TYPES[name](str(raw).upper())
    except ValueError:
        raise SchemaError(f"{name}: bad value {raw!r}") from None


@dataclass(frozen=True)
class TemplateItem:
    minimum: ItemValue | None = None
    maximum: ItemValue | None = None
    equal: ConstraintValue | None = None

    @property
    def active(self) -> bool:
        return self.minimum is not None or self.maximum is not None or self.equal is not None

    @classmethod
    def parse(cls, name: str, raw: Mapping) -> "TemplateItem":
        if name not in ITEM_NAMES:
            raise SchemaError(f"unknown descriptor item {name!r}")
        unknown = set(raw) - {"min", "max", "equal"}
        if unknown:
            raise SchemaError(f"{name}: unknown constraint keys {sorted(unknown)}")
        if name in LOOP_ITEMS:
            mn = ItemValue.parse(raw["min"]) if "min" in raw else None
            mx = ItemValue.parse(raw["max"]) if "max" in raw else None
            eq = None
            if "equal" in raw:
                vals = raw["equal"]
                if not isinstance(vals, list):
                    vals = [vals]
                eq = tuple(ItemValue.parse(v) for v in vals)
            item = cls(mn, mx, eq)
        else:
            if "min" in raw or "max" in raw:
                raise SchemaError(f"{name}: face and auxiliary items take only 'equal'")
            item = cls(equal=_parse_scalar(name, raw["equal"])) if "equal" in raw else cls()
        if not item.active:
            raise SchemaError(f"{name}: item listed without any constraint")
        return item

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.minimum is not None:
            out["min"] = str(self.minimum)
        if self.maximum is not None:
            out["max"] = str(self.maximum)
        if self.equal is not None:
            if isinstance(self.equal, tuple):
                out["equal"] = [str(v) for v in self.equal]
            elif isinstance(self.equal, bool):
                out["equal"] = "TRUE" if self.equal else "FALSE"
            else:
                out["equal"] = self.equal.value
        return out


def _check_weights(weights: Mapping[str, float], names: Iterable[str], where: str) -> None:
    names = list(names)
    for n, w in weights.items():
        if n not in ITEM_NAMES:
            raise SchemaError(f"{where}: weight for unknown item {n!r}")
        if not (isinstance(w, (int, float)) and w > 0 and math.isfinite(w)):
            raise WeightSumError(f"{where}: weight for {n} must be positive, got {w!r}")
    missing = [n for n in names if n not in weights]
    if missing:
        raise WeightSumError(f"{where}: no weight for items {missing}")
    total = math.fsum(weights[n] for n in names)
    if abs(total - 1.0) > 1e-12:
        raise WeightSumError(f"{where}: weights sum to {total!r}, expected 1")


@dataclass(frozen=True)
class FeatureTemplate:
    feature: Feature
    variant_id: str
    items: Mapping[str, TemplateItem]
    composite: bool = False
    weights: Mapping[str, float] | None = None
    fold_angles: bool = True

    def active_items(self) -> list[str]:
        return [n for n in ITEM_NAMES if n in self.items and self.items[n].active]

    @classmethod
    def parse(cls, raw: Mapping) -> "FeatureTemplate":
        try:
            feature = Feature(raw["feature"])
        except (KeyError, ValueError):
            raise SchemaError(f"template has bad or missing feature: {raw.get('feature')!r}") from None
        variant = str(raw.get("variant_id", "default"))
        items = {name: TemplateItem.parse(name, spec) for name, spec in dict(raw.get("items", {})).items()}
        weights = raw.get("weights")
        tmpl = cls(
            feature,
            variant,
            items,
            composite=bool(raw.get("composite", feature in COMPOSITE_HOLES)),
            weights=dict(weights) if weights is not None else None,
            fold_angles=bool(raw.get("fold_angles", True)),
        )
        if weights is not None:
            _check_weights(tmpl.weights, tmpl.active_items(), f"{feature.value}/{variant}")
        return tmpl

    def to_dict(self) -> dict:
        out = {
            "feature": self.feature.value,
            "variant_id": self.variant_id,
            "composite": self.composite,
            "fold_angles": self.fold_angles,
            "items": {n: self.items[n].to_dict() for n in ITEM_NAMES if n in self.items},
        }
        if self.weights is not None:
            out["weights"] = dict(self.weights)
        return out


@dataclass(frozen=True)
class TemplateLibrary:
    templates: tuple[FeatureTemplate, ...]
    version: str = "1"

    def __post_init__(self):
        # stable sort: composite templates are evaluated first
        ordered = sorted(self.templates, key=lambda t: not t.composite)
        object.__setattr__(self, "templates", tuple(ordered))

    def features(self) -> list[Feature]:
        out = []
        for t in self.templates:
            if t.feature not in out:
                out.append(t.feature)
        return out

    def variants(self, feature: Feature) -> list[FeatureTemplate]:
        return [t for t in self.templates if t.feature is feature]

    def to_dict(self) -> dict:
        return {"version": self.version, "templates": [t.to_dict() for t in self.templates]}


def library_from_dict(data: Mapping) -> TemplateLibrary:
    if not isinstance(data, Mapping) or "templates" not in data:
        raise SchemaError("template document needs a 'templates' list")
    templates = tuple(FeatureTemplate.parse(t) for t in data["templates"])
    if not templates:
        raise SchemaError("template library is empty")
    return TemplateLibrary(templates, str(data.get("version", "1")))


def load_templates(path: str | Path | None = None) -> TemplateLibrary:
    """Load a template file; ``None`` returns the built-in library."""
    if path is None:
        text = resources.files("featrec.data").joinpath("templates.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid template JSON: {exc}") from None
    return library_from_dict(data)


def default_library() -> TemplateLibrary:
    return load_templates(None)
