"""Recognition pipeline: score every face against every template, resolve
composite-hole priority and group labeled base faces into instances."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .brep import LoopKind, Model, adjacent_faces
from .descriptor import (
    COMPOSITE_HOLES,
    EDGE_FEATURES,
    SUPPRESSIBLE_HOLES,
    Descriptor,
    Feature,
    FeatureTemplate,
    ItemValue,
    MachiningConditions,
    TemplateLibrary,
    WidthLevel,
    default_library,
    extract_descriptor,
)
from .brep import FaceType
from .geom import DEFAULT_TOL, Convexity, Tolerances, coaxial, face_width, is_rotational, parallel_pair
from .similarity import RecognitionConfig, SimilarityScore, WeightVector, classify, descriptor_similarity

SINGLE_FACE = frozenset({Feature.SIMPLE_HOLE, Feature.TAPER_HOLE}) | EDGE_FEATURES
ISLANDS = frozenset({Feature.CLOSED_ISLAND, Feature.OPENED_ISLAND})


@dataclass(frozen=True)
class Label:
    feature: Feature
    variant: str
    score: SimilarityScore

    @property
    def r(self) -> float:
        return self.score.r

    def to_dict(self, explain: bool = False) -> dict:
        out = {"feature": self.feature.value, "variant": self.variant, "r": self.r}
        if explain:
            out["items"] = self.score.to_dict()["items"]
        return out


@dataclass
class FaceLabel:
    face_id: int
    labels: list[Label] = field(default_factory=list)
    suppressed: list[tuple[Feature, str]] = field(default_factory=list)

    def features(self) -> set[str]:
        return {lb.feature.value for lb in self.labels}


@dataclass(frozen=True)
class FeatureInstance:
    feature: Feature
    base_face: int
    member_faces: tuple[int, ...]
    base_faces: tuple[int, ...] = ()
    parameters: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.value,
            "base_face": self.base_face,
            "base_faces": list(self.base_faces or (self.base_face,)),
            "members": list(self.member_faces),
            "params": dict(self.parameters),
        }


@dataclass
class RecognitionResult:
    model: Model
    face_labels: list[FaceLabel]
    instances: list[FeatureInstance]
    config: dict
    descriptors: dict[int, Descriptor] = field(default_factory=dict, repr=False)

    def predictions(self) -> dict[int, set[str]]:
        return {fl.face_id: fl.features() for fl in self.face_labels}

    def to_dict(self, explain: bool = False) -> dict:
        return {
            "config": self.config,
            "faces": [
                {
                    "id": fl.face_id,
                    "labels": [lb.to_dict(explain) for lb in fl.labels],
                    "suppressed": [{"feature": f.value, "reason": why} for f, why in fl.suppressed],
                }
                for fl in self.face_labels
            ],
            "instances": [inst.to_dict() for inst in self.instances],
        }


def best_variant(
    variants: list[FeatureTemplate],
    descriptor: Descriptor,
    weights: WeightVector | Mapping[str, float] | None = None,
    unfolded: Descriptor | None = None,
) -> tuple[FeatureTemplate, SimilarityScore]:
    """Variant with the highest R; ties keep library order."""
    best = None
    for t in variants:
        target = descriptor if t.fold_angles or unfolded is None else unfolded
        sc = descriptor_similarity(t, target, weights)
        if best is None or sc.r_exact > best[1].r_exact:
            best = (t, sc)
    assert best is not None
    return best


def _witnesses(template: FeatureTemplate, descriptor: Descriptor, loops: tuple[str, ...] = ("ol", "il")) -> set[int]:
    """Adjacent faces that satisfy a min or equal entry of the template's
    convexity items."""
    out: set[int] = set()
    for prefix in loops:
        item = template.items.get(f"{prefix}_convexity")
        if item is None:
            continue
        wanted: list[ItemValue] = []
        if item.minimum is not None:
            wanted.append(item.minimum)
        if isinstance(item.equal, tuple):
            wanted.extend(item.equal)
        wanted = [w for w in wanted if w.count > 0]
        for adj, loop, ftype, conv, _ in descriptor.neighbours:
            if loop != prefix:
                continue
            if any(w.convexity is conv and w.face_type in (ftype, FaceType.ANY) for w in wanted):
                out.add(adj)
    return out


def _hole_members(model: Model, base: int, seeds: set[int], tol: Tolerances) -> set[int]:
    """Base face plus the rotational faces reachable from it across faces
    sharing the hole axis."""
    base_face = model.face(base)
    ref = base if is_rotational(base_face) else next((s for s in sorted(seeds) if is_rotational(model.face(s))), None)
    if ref is None:
        return {base}
    members, queue = {base}, deque([base])
    while queue:
        cur = queue.popleft()
        for kind in (LoopKind.OUTER, LoopKind.INNER):
            for adj, _ in adjacent_faces(model, cur, kind):
                if adj in members or adj is None:
                    continue
                f = model.face(adj)
                if is_rotational(f) and (adj == ref or coaxial(model, ref, adj, tol)):
                    members.add(adj)
                    queue.append(adj)
    return members


def _across_transitions(model: Model, base: int, seeds: set[int], descriptors: Mapping[int, Descriptor]) -> set[int]:
    """Walls reached through a fillet or chamfer face that sits between
    them and the base face."""
    out = set(seeds)
    for w in seeds:
        dw = descriptors.get(w)
        if dw is None or WidthLevel.SHORTER not in (dw.f_filletmachining, dw.f_chamfermachining):
            continue
        for adj, _, _, conv, _ in dw.neighbours:
            if conv is Convexity.CONCAVE and adj != base:
                out.add(adj)
    return out


def _members(
    model: Model,
    feature: Feature,
    template: FeatureTemplate,
    d: Descriptor,
    tol: Tolerances,
    descriptors: Mapping[int, Descriptor] | None = None,
) -> set[int]:
    if feature in SINGLE_FACE:
        return {d.face_id}
    if feature in ISLANDS:
        return {d.face_id} | _witnesses(template, d, ("il",))
    seeds = _witnesses(template, d)
    if feature in COMPOSITE_HOLES:
        return _hole_members(model, d.face_id, seeds, tol)
    return {d.face_id} | _across_transitions(model, d.face_id, seeds, descriptors or {})


def _parameters(model: Model, feature: Feature, base_faces: tuple[int, ...], members: set[int]) -> dict:
    params: dict[str, float] = {}
    radii = sorted({round(model.face(f).surface.radius, 9) for f in members if hasattr(model.face(f).surface, "radius")})
    if feature in (Feature.SIMPLE_HOLE,) or feature in COMPOSITE_HOLES:
        if radii:
            params["radius"] = radii[0]
        if len(radii) > 1:
            params["r_outer"] = radii[-1]
    if feature in (Feature.TAPER_HOLE, Feature.COUNTERSINK_HOLE, Feature.COUNTERDRILLED_HOLE):
        cone = next((model.face(f).surface for f in sorted(members) if model.face(f).surface.kind == "cone"), None)
        if cone is not None:
            params["half_angle"] = cone.half_angle
    if feature in EDGE_FEATURES:
        params["width"] = face_width(model, base_faces[0])
    if feature in (Feature.SIMPLE_SLOT, Feature.FLOORLESS_SLOT, Feature.OPENED_POCKET, Feature.CLOSED_POCKET, Feature.FLOORLESS_POCKET):
        found, w = parallel_pair(model, base_faces[0])
        if found:
            params["width"] = w
    return params


def apply_priority(
    model: Model,
    labels: dict[int, FaceLabel],
    members_of: dict[tuple[Feature, int], set[int]],
) -> None:
    """Composite holes claim their base and member faces: simple and taper
    hole labels there are dropped with a recorded reason."""
    for fid in sorted(labels):
        for lb in labels[fid].labels:
            if lb.feature not in COMPOSITE_HOLES:
                continue
            for claimed in sorted(members_of[(lb.feature, fid)]):
                fl = labels[claimed]
                keep = []
                for other in fl.labels:
                    if other.feature in SUPPRESSIBLE_HOLES:
                        fl.suppressed.append((other.feature, f"claimed by {lb.feature.value} at face {fid}"))
                    else:
                        keep.append(other)
                fl.labels = keep


def group_instances(
    model: Model,
    labels: dict[int, FaceLabel],
    members_of: dict[tuple[Feature, int], set[int]],
    tol: Tolerances = DEFAULT_TOL,
) -> list[FeatureInstance]:
    """One instance per labeled base face; split hole walls that share an axis
    and radius and touch each other are merged into one instance."""
    by_feature: dict[Feature, list[int]] = {}
    for fid in sorted(labels):
        for lb in labels[fid].labels:
            by_feature.setdefault(lb.feature, []).append(fid)

    out: list[FeatureInstance] = []
    for feature in Feature:
        faces = by_feature.get(feature, [])
        parent = {f: f for f in faces}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        if feature in (Feature.SIMPLE_HOLE, Feature.TAPER_HOLE):
            for i, a in enumerate(faces):
                adj = {n for kind in (LoopKind.OUTER, LoopKind.INNER) for n, _ in adjacent_faces(model, a, kind)}
                for b in faces[i + 1 :]:
                    sa, sb = model.face(a).surface, model.face(b).surface
                    same = type(sa) is type(sb) and coaxial(model, a, b, tol)
                    if same and hasattr(sa, "radius"):
                        same = abs(sa.radius - sb.radius) <= tol.length(model)
                    if b in adj and same:
                        parent[find(b)] = find(a)
        groups: dict[int, list[int]] = {}
        for f in faces:
            groups.setdefault(find(f), []).append(f)
        for root in sorted(groups, key=lambda r: min(groups[r])):
            bases = tuple(sorted(groups[root]))
            members = set().union(*(members_of[(feature, f)] for f in bases))
            out.append(
                FeatureInstance(feature, bases[0], tuple(sorted(members)), bases, _parameters(model, feature, bases, members))
            )
    return out


def recognize(
    model: Model,
    library: TemplateLibrary | None = None,
    conditions: MachiningConditions = MachiningConditions(),
    cfg: RecognitionConfig = RecognitionConfig(),
    tol: Tolerances = DEFAULT_TOL,
    weights: WeightVector | Mapping[str, float] | None = None,
) -> RecognitionResult:
    library = library or default_library()
    need_unfolded = any(not t.fold_angles for t in library.templates)
    descriptors: dict[int, Descriptor] = {}
    unfolded: dict[int, Descriptor] = {}
    face_ids = sorted(f.id for f in model.faces)
    for fid in face_ids:
        descriptors[fid] = extract_descriptor(model, fid, conditions, tol)
        if need_unfolded:
            unfolded[fid] = extract_descriptor(model, fid, conditions, tol, fold_angles=False)

    labels: dict[int, FaceLabel] = {fid: FaceLabel(fid) for fid in face_ids}
    members_of: dict[tuple[Feature, int], set[int]] = {}
    for feature in library.features():
        variants = library.variants(feature)
        for fid in face_ids:
            tmpl, score = best_variant(variants, descriptors[fid], weights, unfolded.get(fid))
            if classify(score, cfg):
                labels[fid].labels.append(Label(feature, tmpl.variant_id, score))
                members_of[(feature, fid)] = _members(model, feature, tmpl, descriptors[fid], tol, descriptors)

    apply_priority(model, labels, members_of)
    instances = group_instances(model, labels, members_of, tol)
    config = {
        "threshold": cfg.threshold,
        "conditions": {
            "slot_width_threshold": conditions.slot_width_threshold,
            "fillet_width_threshold": conditions.fillet_width_threshold,
            "chamfer_width_threshold": conditions.chamfer_width_threshold,
        },
        "template_version": library.version,
    }
    return RecognitionResult(model, [labels[f] for f in face_ids], instances, config, descriptors)
