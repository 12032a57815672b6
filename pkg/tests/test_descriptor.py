from __future__ import annotations

import json

import pytest

from featrec.brep import FaceType, SchemaError
from featrec.descriptor import (
    ITEM_NAMES,
    CurvatureClass,
    Feature,
    FeatureTemplate,
    ItemValue,
    ItemValueSet,
    MachiningConditions,
    TemplateItem,
    WeightSumError,
    WidthLevel,
    default_library,
    extract_descriptor,
    library_from_dict,
    load_templates,
)
from featrec.geom import Convexity


def test_item_value_parse_forms():
    a = ItemValue.parse("CYLI|CONCAVE:2")
    b = ItemValue.parse({"face_type": "cyli", "convexity": "concave", "count": 2})
    assert a == b == ItemValue(FaceType.CYLI, Convexity.CONCAVE, 2)
    assert str(a) == "CYLI|CONCAVE:2"


@pytest.mark.parametrize("bad", ["CYLI-CONCAVE:2", "CYLI|CONCAVE", "FOO|CONCAVE:1", 3, {"face_type": "PLAN"}])
def test_item_value_parse_errors(bad):
    with pytest.raises((SchemaError, ValueError)):
        ItemValue.parse(bad)


def test_item_value_rejects_negative_count():
    with pytest.raises(SchemaError):
        ItemValue(FaceType.PLAN, Convexity.CONVEX, -1)


def test_item_value_set_merges_and_drops_zero():
    s = ItemValueSet([ItemValue("PLAN", "CONVEX", 1), ItemValue("PLAN", "CONVEX", 2), ItemValue("CYLI", "CONCAVE", 0)])
    assert s.count(FaceType.PLAN, Convexity.CONVEX) == 3
    assert len(s) == 1
    assert s.to_list() == ["PLAN|CONVEX:3"]


def test_item_value_set_rejects_any():
    with pytest.raises(ValueError):
        ItemValueSet([ItemValue("ANY", "CONVEX", 1)])


def test_fig8_annulus_descriptor(fig8):
    d = extract_descriptor(fig8.model, 7)
    assert d.f_facetype is FaceType.PLAN
    assert d.f_curvature is CurvatureClass.FLAT
    assert d.ol_convexity.to_list() == ["CYLI|CONCAVE:2", "PLAN|CONVEX:1"]
    assert d.il_convexity.to_list() == ["CYLI|CONVEX:2"]
    assert d.il_perpendicular.to_list() == ["CYLI|CONVEX:2"]
    assert d.ax_coaxial is True


def test_descriptor_to_dict_has_all_items(fig8):
    out = extract_descriptor(fig8.model, 7).to_dict()
    assert set(ITEM_NAMES) <= set(out)
    assert out["ax_coaxial"] == "TRUE"
    json.dumps(out)


def test_descriptor_item_lookup(fig8):
    d = extract_descriptor(fig8.model, 7)
    assert d.item("f_facetype") is FaceType.PLAN
    with pytest.raises(KeyError):
        d.item("not_an_item")


def test_curvature_of_hole_and_boss(suite):
    m = suite["simple_hole_one_cylinder"].model
    hole = suite["simple_hole_one_cylinder"].truth[0].base_face
    assert extract_descriptor(m, hole).f_curvature is CurvatureClass.NEGATIVE
    r = suite["rotational_simple_hole"]
    outer = [f.id for f in r.model.faces if f.face_type is FaceType.CYLI and f.sense]
    assert outer and extract_descriptor(r.model, outer[0]).f_curvature is CurvatureClass.POSITIVE


def test_width_thresholds_switch_level(suite):
    sm = suite["simple_slot"]
    floor = sm.truth[0].base_face
    assert extract_descriptor(sm.model, floor).f_facemachining is WidthLevel.SHORTER
    wide = MachiningConditions(slot_width_threshold=5.0)
    assert extract_descriptor(sm.model, floor, wide).f_facemachining is WidthLevel.LONGER


def test_conditions_must_be_positive():
    with pytest.raises(ValueError):
        MachiningConditions(slot_width_threshold=0)


def test_seam_is_not_counted(suite):
    sm = suite["simple_hole_one_cylinder"]
    d = extract_descriptor(sm.model, sm.truth[0].base_face)
    assert d.ol_convexity.count(FaceType.CYLI, Convexity.CONVEX) == 0
    assert d.ol_convexity.count(FaceType.CYLI, Convexity.CONCAVE) == 0


def test_two_half_hole_differs_only_in_cylinder_counts(suite):
    one = suite["simple_hole_one_cylinder"]
    two = suite["simple_hole_two_half_cylinders"]
    d1 = extract_descriptor(one.model, one.truth[0].base_face).to_dict()
    d2 = extract_descriptor(two.model, two.truth[0].base_faces[0]).to_dict()
    for name in ITEM_NAMES:
        if d1[name] != d2[name]:
            assert isinstance(d1[name], list)
            strip = lambda vals: [v for v in vals if not v.startswith("CYLI|")]
            assert strip(d1[name]) == strip(d2[name]), name


def test_template_item_parse():
    it = TemplateItem.parse("ol_convexity", {"min": "ANY|CONVEX:1", "equal": ["CYLI|CONCAVE:2"]})
    assert it.minimum == ItemValue("ANY", "CONVEX", 1)
    assert it.equal == (ItemValue("CYLI", "CONCAVE", 2),)
    assert TemplateItem.parse("ax_coaxial", {"equal": "TRUE"}).equal is True


@pytest.mark.parametrize(
    "name, raw",
    [
        ("bogus_item", {"equal": "PLAN"}),
        ("f_facetype", {"min": "PLAN|CONVEX:1"}),
        ("f_facetype", {"equal": "BLOB"}),
        ("ax_parallel", {"equal": "maybe"}),
        ("ol_convexity", {"between": 1}),
        ("ol_convexity", {}),
    ],
)
def test_template_item_schema_errors(name, raw):
    with pytest.raises(SchemaError):
        TemplateItem.parse(name, raw)


def _tmpl(weights=None):
    raw = {
        "feature": "simple_hole",
        "variant_id": "x",
        "items": {"f_facetype": {"equal": "CYLI"}, "f_curvature": {"equal": "NEGATIVE"}},
    }
    if weights is not None:
        raw["weights"] = weights
    return raw


def test_template_weights_must_sum_to_one():
    FeatureTemplate.parse(_tmpl({"f_facetype": 0.25, "f_curvature": 0.75}))
    with pytest.raises(WeightSumError):
        FeatureTemplate.parse(_tmpl({"f_facetype": 0.5, "f_curvature": 0.6}))
    with pytest.raises(WeightSumError):
        FeatureTemplate.parse(_tmpl({"f_facetype": 1.0}))
    with pytest.raises(WeightSumError):
        FeatureTemplate.parse(_tmpl({"f_facetype": -0.5, "f_curvature": 1.5}))


def test_template_bad_feature():
    with pytest.raises(SchemaError):
        FeatureTemplate.parse({"feature": "groove", "items": {}})


def test_default_library_covers_all_subtypes():
    lib = default_library()
    assert set(lib.features()) == set(Feature)
    composites = [t.composite for t in lib.templates]
    assert composites == sorted(composites, reverse=True)


def test_library_round_trip(tmp_path):
    lib = default_library()
    path = tmp_path / "t.json"
    path.write_text(json.dumps(lib.to_dict()))
    again = load_templates(path)
    assert again.to_dict() == lib.to_dict()


def test_library_errors(tmp_path):
    with pytest.raises(SchemaError):
        library_from_dict({"templates": []})
    with pytest.raises(SchemaError):
        library_from_dict({})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_templates(bad)


def test_counterbore_template_matches_fig5():
    lib = default_library()
    (t,) = lib.variants(Feature.COUNTERBORE_HOLE)
    d = t.to_dict()["items"]
    assert d["f_facetype"] == {"equal": "PLAN"}
    assert d["f_curvature"] == {"equal": "FLAT"}
    assert d["ax_coaxial"] == {"equal": "TRUE"}
    assert set(d) == {"f_facetype", "f_curvature", "ol_convexity", "il_convexity", "il_perpendicular", "ax_coaxial"}
