from __future__ import annotations

import logging

import numpy as np
import pytest

from featrec.brep import CircularArc, Cone, TopologyError, load_model, validate_topology
from featrec.recognizer import recognize
from featrec.step import (
    DanglingReference,
    Enum_,
    Ref,
    StepSyntaxError,
    Typed,
    UnsupportedEntity,
    export_step,
    load_step,
    parse_step,
    to_model,
)

HEAD = "ISO-10303-21;\nHEADER;\nFILE_SCHEMA(('X'));\nENDSEC;\nDATA;\n"
TAIL = "ENDSEC;\nEND-ISO-10303-21;\n"


def wrap(body: str) -> str:
    return HEAD + body + TAIL


def test_parse_parameter_kinds():
    step = parse_step(wrap("#1=FOO('it''s',$,*,.T.,(1,2.5,-3.E-2),#2,LENGTH_MEASURE(1.));\n#2=BAR(());\n"))
    args = step.entities[1].args
    assert args[0] == "it's"
    assert args[1] is None and args[2] == "*"
    assert args[3] == Enum_("T")
    assert args[4] == (1, 2.5, -0.03)
    assert args[5] == Ref(2)
    assert args[6] == Typed("LENGTH_MEASURE", (1.0,))
    assert step.entities[2].args == ((),)


def test_comments_and_whitespace():
    step = parse_step(wrap("/* note */ #1 = FOO ( 1 , /* inner */ 2 ) ;\n"))
    assert step.entities[1].args == (1, 2)


def test_missing_end_marker():
    with pytest.raises(StepSyntaxError):
        parse_step(HEAD + "#1=FOO(1);\nENDSEC;\n")


def test_syntax_error_position():
    with pytest.raises(StepSyntaxError) as exc:
        parse_step(wrap("#1=FOO(1,;\n"))
    assert exc.value.line == 6


def test_dangling_reference():
    with pytest.raises(DanglingReference):
        parse_step(wrap("#1=FOO(#7);\n"))


def test_duplicate_instance():
    with pytest.raises(StepSyntaxError):
        parse_step(wrap("#1=FOO(1);\n#1=FOO(2);\n"))


def test_golden_cube(data_dir, caplog):
    diags: list[str] = []
    with caplog.at_level(logging.WARNING):
        m = load_step(data_dir / "cube.step", diags)
    assert validate_topology(m) == []
    assert sorted(f.id for f in m.faces) == [1, 2, 3, 4, 5, 6]
    assert len(m.edges) == 12 and len(m.vertices) == 8
    assert any("APPLICATION_CONTEXT" in d for d in diags)
    assert "APPLICATION_CONTEXT" in caplog.text


def test_cube_matches_json(data_dir):
    a = load_step(data_dir / "cube.step")
    b = load_model(data_dir / "cube.json")
    for fa, fb in zip(sorted(a.faces, key=lambda f: f.id), sorted(b.faces, key=lambda f: f.id)):
        assert fa.surface.normal == pytest.approx(fb.surface.normal)
    assert recognize(a).to_dict() == recognize(b).to_dict()


def test_exporter_reproduces_golden_file(data_dir, fig8):
    assert export_step(fig8.model, "counterbore_fig8") == (data_dir / "counterbore_fig8.step").read_text()


def _coords(m):
    return sorted(tuple(np.round(v.point, 9)) for v in m.vertices)


def test_round_trip_geometry(suite):
    for name in ("counterbore_fig8", "countersink_hole", "rotational_outer_fillet", "inner_fillet"):
        m = suite[name].model
        back = to_model(parse_step(export_step(m)))
        assert _coords(back) == _coords(m)
        for fa, fb in zip(m.faces, back.faces):
            assert fa.id == fb.id and fa.sense == fb.sense
            assert type(fa.surface) is type(fb.surface)
            for x, y in zip(vars(fa.surface).values(), vars(fb.surface).values()):
                assert np.allclose(x, y, atol=1e-9), name


def test_cone_apex_from_reference_radius():
    text = wrap(
        "#1=CARTESIAN_POINT('',(0.,0.,2.));\n#2=DIRECTION('',(0.,0.,1.));\n"
        "#3=AXIS2_PLACEMENT_3D('',#1,#2,$);\n#4=CONICAL_SURFACE('',#3,1.,0.7853981633974483);\n"
    )
    from featrec.step import _Reader

    cone = _Reader(parse_step(text)).surface(Ref(4))
    assert isinstance(cone, Cone)
    assert cone.apex == pytest.approx((0.0, 0.0, 1.0))


def test_reversed_circle_flips_axis(fig8):
    text = export_step(fig8.model)
    first_arc = next(e for e in fig8.model.edges if isinstance(e.curve, CircularArc))
    m = to_model(parse_step(text), validate=False)
    arc = next(e for e in m.edges if isinstance(e.curve, CircularArc))
    assert arc.curve.axis == pytest.approx(first_arc.curve.axis)
    flipped = text.replace(",.T.);\n", ",.F.);\n")
    edges = [ln for ln in flipped.splitlines() if "EDGE_CURVE" in ln]
    assert all(ln.endswith(".F.);") for ln in edges)
    m2 = to_model(parse_step(flipped), validate=False)
    arc2 = next(e for e in m2.edges if isinstance(e.curve, CircularArc))
    assert arc2.curve.axis == pytest.approx(tuple(-c for c in first_arc.curve.axis))


def test_unsupported_reachable_entity(data_dir):
    text = (data_dir / "cube.step").read_text().replace("#40=PLANE('',#410);", "#40=B_SPLINE_SURFACE('',#410);")
    with pytest.raises(UnsupportedEntity) as exc:
        to_model(parse_step(text))
    assert exc.value.keyword == "B_SPLINE_SURFACE"


def test_missing_outer_bound_is_promoted(suite):
    m = suite["counterbore_fig8"].model
    text = export_step(m).replace("FACE_OUTER_BOUND", "FACE_BOUND")
    diags: list[str] = []
    back = to_model(parse_step(text), diags)
    assert len(diags) == len(m.faces)
    for fa, fb in zip(m.faces, back.faces):
        assert [lp.kind for lp in fa.loops] == [lp.kind for lp in fb.loops]


def test_declaration_order_does_not_matter(fig8):
    text = export_step(fig8.model)
    head, rest = text.split("DATA;\n")
    body, tail = rest.split("ENDSEC;\nEND")
    lines = body.strip().splitlines()
    shuffled = head + "DATA;\n" + "\n".join(reversed(lines)) + "\nENDSEC;\nEND" + tail
    a = to_model(parse_step(text))
    b = to_model(parse_step(shuffled))
    assert recognize(a).to_dict() == recognize(b).to_dict()


def test_broken_topology_is_reported(data_dir):
    text = (data_dir / "cube.step").read_text().replace("#301=ORIENTED_EDGE('',*,*,#101,.F.);", "#301=ORIENTED_EDGE('',*,*,#101,.T.);")
    with pytest.raises(TopologyError):
        to_model(parse_step(text))
