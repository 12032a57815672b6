from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from featrec.brep import FaceType
from featrec.descriptor import (
    IL_ITEMS,
    OL_ITEMS,
    CurvatureClass,
    Descriptor,
    Feature,
    FeatureTemplate,
    ItemValue,
    ItemValueSet,
    TemplateItem,
    WeightSumError,
    WidthLevel,
    default_library,
    extract_descriptor,
)
from featrec.geom import Convexity
from featrec.similarity import (
    ConstraintScore,
    NoActiveItems,
    RecognitionConfig,
    WeightVector,
    classify,
    compare_magnitude,
    constraint_scores,
    descriptor_similarity,
)

CONCRETE = [t for t in FaceType if t is not FaceType.ANY]


def make_descriptor(**items) -> Descriptor:
    base = dict(
        face_id=1,
        f_facetype=FaceType.PLAN,
        f_curvature=CurvatureClass.FLAT,
        f_facemachining=WidthLevel.LONGER,
        f_filletmachining=WidthLevel.LONGER,
        f_chamfermachining=WidthLevel.LONGER,
        ax_parallel=False,
        ax_coaxial=False,
        ax_interference=False,
    )
    for n in OL_ITEMS + IL_ITEMS:
        base[n] = ItemValueSet()
    base.update(items)
    return Descriptor(**base)


def iv(text: str) -> ItemValue:
    return ItemValue.parse(text)


def ivs(*texts: str) -> ItemValueSet:
    return ItemValueSet(iv(t) for t in texts)


TARGET = ivs("CYLI|CONCAVE:2", "PLAN|CONVEX:1")


@pytest.mark.parametrize(
    "item, expected",
    [
        (TemplateItem(minimum=iv("CYLI|CONCAVE:2")), ConstraintScore(1, 1, 1)),
        (TemplateItem(minimum=iv("CYLI|CONCAVE:3")), ConstraintScore(0, 1, 1)),
        (TemplateItem(maximum=iv("PLAN|CONVEX:1")), ConstraintScore(1, 1, 1)),
        (TemplateItem(maximum=iv("CYLI|CONCAVE:1")), ConstraintScore(1, 0, 1)),
        (TemplateItem(equal=(iv("CYLI|CONCAVE:2"), iv("PLAN|CONVEX:1"))), ConstraintScore(1, 1, 1)),
        (TemplateItem(equal=(iv("CYLI|CONCAVE:2"),)), ConstraintScore(1, 1, 0)),
    ],
)
def test_loop_constraint_branches(item, expected):
    assert constraint_scores(item, TARGET) == expected


def test_unspecified_constraints_score_one():
    assert constraint_scores(TemplateItem(equal=FaceType.PLAN), FaceType.PLAN) == ConstraintScore(1, 1, 1)
    assert constraint_scores(TemplateItem(equal=FaceType.CYLI), FaceType.PLAN) == ConstraintScore(1, 1, 0)
    assert constraint_scores(TemplateItem(equal=True), True).a_equal == 1


def test_min_max_on_scalar_rejected():
    with pytest.raises(ValueError):
        constraint_scores(TemplateItem(minimum=iv("PLAN|CONVEX:1")), FaceType.PLAN)


def test_any_sums_matching_convexity():
    assert compare_magnitude(iv("ANY|CONCAVE:0"), TARGET) == 2
    assert compare_magnitude(iv("ANY|CONVEX:0"), TARGET) == 1
    assert compare_magnitude(iv("CONI|CONVEX:0"), TARGET) == 0


def test_equal_with_any_aggregates():
    item = TemplateItem(equal=(iv("ANY|CONCAVE:2"), iv("ANY|CONVEX:1")))
    assert constraint_scores(item, TARGET).a_equal == 1
    item = TemplateItem(equal=(iv("ANY|CONCAVE:2"),))
    assert constraint_scores(item, TARGET).a_equal == 0


item_sets = st.lists(
    st.tuples(st.sampled_from(CONCRETE), st.sampled_from(list(Convexity)), st.integers(0, 6)), max_size=8
).map(lambda xs: ItemValueSet(ItemValue(ft, cv, n) for ft, cv, n in xs))


@settings(max_examples=300, deadline=None)
@given(item_sets, st.sampled_from(list(Convexity)))
def test_any_equals_sum_over_concrete_types(s, conv):
    expected = sum(s.count(ft, conv) for ft in CONCRETE)
    assert compare_magnitude(ItemValue(FaceType.ANY, conv, 0), s) == expected


def test_fig8_counterbore_similarity_is_one(fig8):
    (t,) = default_library().variants(Feature.COUNTERBORE_HOLE)
    score = descriptor_similarity(t, extract_descriptor(fig8.model, 7))
    assert score.r_exact == 1
    assert all(s.s == 1 for s in score.per_item.values())
    assert len(score.per_item) == 6
    assert classify(score)


def _template(n_items: int, weights=None) -> FeatureTemplate:
    names = (OL_ITEMS + IL_ITEMS)[:n_items]
    items = {n: TemplateItem(minimum=iv("ANY|CONVEX:1")) for n in names}
    return FeatureTemplate(Feature.SIMPLE_HOLE, "t", items, weights=weights)


def test_uniform_r_counts_satisfied_items():
    t = _template(5)
    d = make_descriptor(ol_convexity=ivs("PLAN|CONVEX:1"), ol_parallel=ivs("CYLI|CONVEX:2"))
    sc = descriptor_similarity(t, d)
    assert sc.r_exact == Fraction(2, 5)
    assert not classify(sc)
    assert classify(sc, RecognitionConfig(threshold=0.4))


def test_global_weights_renormalized_over_active_items():
    t = _template(2)
    w = WeightVector({"ol_convexity": 0.1, "ol_continuity": 0.3, "f_facetype": 0.6})
    d = make_descriptor(ol_convexity=ivs("PLAN|CONVEX:1"))
    sc = descriptor_similarity(t, d, w)
    assert sum(sc.weights.values()) == 1
    assert sc.r_exact == Fraction(1, 4)


def test_weight_vector_validation():
    with pytest.raises(WeightSumError):
        WeightVector({"ol_convexity": 0.5})
    with pytest.raises(WeightSumError):
        descriptor_similarity(_template(2), make_descriptor(), {"ol_convexity": 1.0})


def test_no_active_items():
    t = FeatureTemplate(Feature.SIMPLE_HOLE, "empty", {})
    with pytest.raises(NoActiveItems):
        descriptor_similarity(t, make_descriptor())


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
def test_threshold_range(bad):
    with pytest.raises(ValueError):
        RecognitionConfig(threshold=bad)


def test_constraint_scores_are_binary():
    with pytest.raises(ValueError):
        ConstraintScore(2, 1, 1)


def test_score_to_dict(fig8):
    (t,) = default_library().variants(Feature.COUNTERBORE_HOLE)
    out = descriptor_similarity(t, extract_descriptor(fig8.model, 7)).to_dict()
    assert out["r"] == 1.0
    assert set(out["items"]["ol_convexity"]) == {"s", "a_min", "a_max", "a_equal", "w"}
