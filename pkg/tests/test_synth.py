from __future__ import annotations

import pytest

from featrec.brep import Cylinder, validate_topology
from featrec.descriptor import Feature
from featrec.synth import (
    FeatureSpec,
    HoleRepresentation,
    InvalidDimensions,
    Part,
    PlacementError,
    Stock,
    StockKind,
    apply_feature,
    generate,
    make_stock,
)


def test_suite_shape(suite):
    assert len(suite) >= 24
    covered = {t.feature for sm in suite.values() for t in sm.truth}
    assert covered == set(Feature)
    kinds = {sm.part.stock.kind for sm in suite.values() if sm.part is not None}
    assert kinds == {StockKind.CUBOID, StockKind.ROTATIONAL}


def test_suite_models_are_valid(suite):
    for name, sm in suite.items():
        assert validate_topology(sm.model) == [], name


def test_truth_faces_exist(suite):
    for sm in suite.values():
        ids = {f.id for f in sm.model.faces}
        for t in sm.truth:
            assert set(t.base_faces) <= ids
            assert set(t.base_faces) <= set(t.members) or t.feature is Feature.CLOSED_ISLAND


def test_suite_is_deterministic(suite):
    from featrec.brep import model_to_dict
    from featrec.synth import standard_suite

    again = {sm.name: sm for sm in standard_suite()}
    for name in ("counterbore_fig8", "multi_feature_block", "rotational_counterbore"):
        assert model_to_dict(again[name].model) == model_to_dict(suite[name].model)


@pytest.mark.parametrize("kind, faces", [(StockKind.CUBOID, 6), (StockKind.ROTATIONAL, 3)])
def test_make_stock(kind, faces):
    m = make_stock(kind)
    assert len(m.faces) == faces
    assert validate_topology(m) == []


def test_two_half_representation_splits_the_wall():
    one = generate(Feature.SIMPLE_HOLE)
    two = generate(Feature.SIMPLE_HOLE, {"representation": HoleRepresentation.TWO_HALF_CYLINDERS})
    cyl = lambda sm: sum(isinstance(f.surface, Cylinder) for f in sm.model.faces)
    assert (cyl(one), cyl(two)) == (1, 2)
    assert len(two.truth) == 1 and len(two.truth[0].base_faces) == 2


def test_apply_feature_adds_to_existing_part():
    base = generate(Feature.SIMPLE_SLOT)
    both = apply_feature(base, FeatureSpec(Feature.SIMPLE_HOLE, {"x": 10.0, "y": 20.0, "radius": 3.0}))
    assert {t.feature for t in both.truth} == {Feature.SIMPLE_SLOT, Feature.SIMPLE_HOLE}
    assert validate_topology(both.model) == []


def test_apply_feature_on_stock_and_part():
    spec = FeatureSpec(Feature.SIMPLE_HOLE, {"x": 20.0, "y": 20.0, "radius": 2.0})
    a = apply_feature(Stock(), spec)
    b = apply_feature(Part(Stock()), spec)
    assert len(a.model.faces) == len(b.model.faces) == 7


def test_stock_dimensions_are_prefixed():
    sm = generate(Feature.SIMPLE_HOLE, {"stock_w": 80.0, "x": 70.0})
    assert sm.part.stock.w == 80.0
    assert sm.part.features[0].params["radius"] == 4.0


@pytest.mark.parametrize(
    "feature, params, error",
    [
        (Feature.SIMPLE_HOLE, {"radius": -1.0}, InvalidDimensions),
        (Feature.SIMPLE_HOLE, {"radius": 30.0}, PlacementError),
        (Feature.SIMPLE_HOLE, {"x": 100.0}, PlacementError),
        (Feature.SIMPLE_SLOT, {"width": 100.0}, PlacementError),
        (Feature.COUNTERBORE_HOLE, {"r_inner": 9.0}, InvalidDimensions),
        (Feature.CLOSED_POCKET, {"depth": 30.0}, PlacementError),
    ],
)
def test_generation_errors(feature, params, error):
    with pytest.raises(error):
        generate(feature, params)


def test_bad_stock():
    with pytest.raises(InvalidDimensions):
        Stock(w=0.0)


def test_truth_document(fig8):
    d = fig8.truth_to_dict()
    assert d["name"] == "counterbore_fig8"
    faces = {f["id"]: f["labels"] for f in d["faces"]}
    assert faces[7] == ["counterbore_hole"]
    assert d["instances"][0]["members"] == [7, 8, 9, 10, 11]


def test_pinned_fixtures(suite):
    assert suite["fig12a_steep_floorless"].pinned is not None
    assert suite["fig12b_merged_floor"].pinned is not None
