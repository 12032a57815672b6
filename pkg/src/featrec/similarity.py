"""Range-constraint similarity between a feature template and a face descriptor.

All scores are kept as exact integers and ``Fraction`` values so that the
threshold comparison at R = 1 never suffers floating point drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .brep import FaceType
from .descriptor import Descriptor, FeatureTemplate, ItemValue, ItemValueSet, TemplateItem, WeightSumError, _check_weights


class NoActiveItems(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintScore:
    a_min: int = 1
    a_max: int = 1
    a_equal: int = 1

    def __post_init__(self):
        for v in (self.a_min, self.a_max, self.a_equal):
            if v not in (0, 1):
                raise ValueError("constraint scores are 0 or 1")


@dataclass(frozen=True)
class ItemScore:
    s: int
    constraints: ConstraintScore = ConstraintScore()


@dataclass(frozen=True)
class WeightVector:
    w: Mapping[str, float]

    def __post_init__(self):
        _check_weights(self.w, list(self.w), "weight vector")


@dataclass(frozen=True)
class RecognitionConfig:
    threshold: float = 1.0

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must lie in (0, 1], got {self.threshold}")


@dataclass(frozen=True)
class SimilarityScore:
    r_exact: Fraction
    per_item: Mapping[str, ItemScore]
    weights: Mapping[str, Fraction]

    @property
    def r(self) -> float:
        return float(self.r_exact)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "items": {
                name: {
                    "s": sc.s,
                    "a_min": sc.constraints.a_min,
                    "a_max": sc.constraints.a_max,
                    "a_equal": sc.constraints.a_equal,
                    "w": float(self.weights[name]),
                }
                for name, sc in self.per_item.items()
            },
        }


def compare_magnitude(template_value: ItemValue, target_set: ItemValueSet) -> int:
    """Effective target count N^j for a template entry; ANY sums over face types."""
    if template_value.face_type is FaceType.ANY:
        return sum(n.count for n in target_set.entries() if n.convexity is template_value.convexity)
    return target_set.count(template_value.face_type, template_value.convexity)


def _set_equal(template_values: tuple[ItemValue, ...], target: ItemValueSet) -> bool:
    for tv in template_values:
        if compare_magnitude(tv, target) != tv.count:
            return False
    # every target entry must be covered by some template entry
    for ft, cv in target.keys():
        if not any(tv.convexity is cv and tv.face_type in (ft, FaceType.ANY) for tv in template_values):
            return False
    return True


def constraint_scores(item: TemplateItem, target_value) -> ConstraintScore:
    if isinstance(target_value, ItemValueSet):
        a_min = 1 if item.minimum is None or compare_magnitude(item.minimum, target_value) >= item.minimum.count else 0
        a_max = 1 if item.maximum is None or compare_magnitude(item.maximum, target_value) <= item.maximum.count else 0
        a_eq = 1 if item.equal is None or _set_equal(tuple(item.equal), target_value) else 0
        return ConstraintScore(a_min, a_max, a_eq)
    if item.minimum is not None or item.maximum is not None:
        raise ValueError("min/max constraints apply only to loop items")
    return ConstraintScore(a_equal=1 if item.equal is None or item.equal == target_value else 0)


def item_score(cs: ConstraintScore) -> ItemScore:
    return ItemScore(cs.a_min * cs.a_max * cs.a_equal, cs)


def _weights(template: FeatureTemplate, active: list[str], weights: WeightVector | Mapping[str, float] | None) -> dict[str, Fraction]:
    source = weights.w if isinstance(weights, WeightVector) else weights
    if source is None:
        source = template.weights
    if source is None:
        return {n: Fraction(1, len(active)) for n in active}
    missing = [n for n in active if n not in source]
    if missing:
        raise WeightSumError(f"no weight for active items {missing}")
    # floats are read as the decimals they print as, so 0.1 is exactly 1/10
    raw = {n: Fraction(repr(source[n])) if isinstance(source[n], float) else Fraction(source[n]) for n in active}
    total = sum(raw.values())
    return {n: w / total for n, w in raw.items()}


def descriptor_similarity(
    template: FeatureTemplate,
    target: Descriptor,
    weights: WeightVector | Mapping[str, float] | None = None,
) -> SimilarityScore:
    active = template.active_items()
    if not active:
        raise NoActiveItems(f"template {template.feature.value}/{template.variant_id} has no constrained items")
    w = _weights(template, active, weights)
    per_item = {n: item_score(constraint_scores(template.items[n], target.item(n))) for n in active}
    r = sum((w[n] * per_item[n].s for n in active), Fraction(0))
    return SimilarityScore(r, per_item, w)


def classify(score: SimilarityScore, cfg: RecognitionConfig = RecognitionConfig()) -> bool:
    return score.r_exact >= Fraction(repr(cfg.threshold))
