from __future__ import annotations

import json

import pytest

from featrec.descriptor import COMPOSITE_HOLES, Feature, TemplateLibrary, default_library
from featrec.recognizer import recognize
from featrec.similarity import RecognitionConfig
from featrec.synth import standard_suite

NAMES = [sm.name for sm in standard_suite()]


@pytest.mark.parametrize("name", NAMES)
def test_predictions_match_truth_or_pin(suite, suite_results, name):
    sm = suite[name]
    expected = sm.face_truth()
    if sm.pinned:
        expected.update(sm.pinned)
    assert suite_results[name].predictions() == expected


@pytest.mark.parametrize("name", [n for n in NAMES if not n.startswith("fig12")])
def test_instances_match_truth(suite, suite_results, name):
    truth = sorted((t.feature.value, t.base_faces, t.members) for t in suite[name].truth)
    got = sorted((i.feature.value, i.base_faces, i.member_faces) for i in suite_results[name].instances)
    assert got == truth


def test_counterbore_instance_parameters(suite_results):
    (inst,) = suite_results["counterbore_fig8"].instances
    assert inst.feature is Feature.COUNTERBORE_HOLE
    assert inst.parameters["radius"] == pytest.approx(3.0)
    assert inst.parameters["r_outer"] == pytest.approx(6.0)


def test_priority_records_suppressed_labels(suite_results):
    res = suite_results["countersink_hole"]
    suppressed = [(fl.face_id, f.value) for fl in res.face_labels for f, _ in fl.suppressed]
    assert suppressed
    assert all(f in ("simple_hole", "taper_hole") for _, f in suppressed)
    for fl in res.face_labels:
        assert not fl.features() & {"simple_hole", "taper_hole"}


def test_two_half_walls_merge_into_one_instance(suite_results):
    (inst,) = suite_results["simple_hole_two_half_cylinders"].instances
    assert len(inst.base_faces) == 2
    assert inst.base_face == min(inst.base_faces)


def test_result_document(fig8):
    res = recognize(fig8.model)
    doc = res.to_dict(explain=True)
    json.dumps(doc)
    assert set(doc) == {"config", "faces", "instances"}
    assert doc["config"]["threshold"] == 1.0
    assert doc["config"]["template_version"] == default_library().version
    (face7,) = [f for f in doc["faces"] if f["id"] == 7]
    assert face7["labels"][0]["feature"] == "counterbore_hole"
    assert "items" in face7["labels"][0]


def test_lower_threshold_adds_labels(fig8):
    strict = recognize(fig8.model)
    loose = recognize(fig8.model, cfg=RecognitionConfig(threshold=0.5))
    n = lambda r: sum(len(fl.labels) for fl in r.face_labels)
    assert n(loose) > n(strict)


def test_custom_library_limits_features(fig8):
    lib = default_library()
    only = TemplateLibrary(tuple(t for t in lib.templates if t.feature is Feature.SIMPLE_HOLE), lib.version)
    res = recognize(fig8.model, only)
    # without the composite template the bore halves read as a simple hole
    assert {i.feature for i in res.instances} == {Feature.SIMPLE_HOLE}


def test_composites_are_claimed_once(suite_results):
    for name in ("counterbore_fig8", "countersink_hole", "counterdrilled_hole", "rotational_counterbore"):
        composites = [i for i in suite_results[name].instances if i.feature in COMPOSITE_HOLES]
        assert len(composites) == 1, name
