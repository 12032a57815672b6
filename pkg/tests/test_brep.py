from __future__ import annotations

import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from featrec.brep import (
    CircularArc,
    Coedge,
    Cone,
    Cylinder,
    Edge,
    Face,
    FaceType,
    Loop,
    LoopKind,
    Model,
    Plane,
    SchemaError,
    Torus,
    TopologyError,
    UnknownFace,
    Vertex,
    adjacent_faces,
    check,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
    transform_model,
    validate_topology,
)


def test_cube_is_valid(cube):
    assert validate_topology(cube) == []
    assert len(cube.faces) == 6
    assert len(cube.edges) == 12
    assert len(cube.vertices) == 8


def test_every_edge_used_twice_with_opposite_senses(suite):
    for sm in suite.values():
        for eid, uses in sm.model.edge_uses.items():
            assert len(uses) == 2, (sm.name, eid)
            assert uses[0].coedge.reversed != uses[1].coedge.reversed


def test_cube_adjacency(cube):
    for f in cube.faces:
        adj = [m for m, _ in adjacent_faces(cube, f.id, LoopKind.OUTER)]
        assert len(adj) == 4
        assert f.id not in adj
        assert adjacent_faces(cube, f.id, "INNER") == []


def test_seam_edge_yields_face_itself(suite):
    m = suite["simple_hole_one_cylinder"].model
    bore = next(f for f in m.faces if isinstance(f.surface, Cylinder))
    adj = [a for a, _ in adjacent_faces(m, bore.id, LoopKind.OUTER)]
    assert bore.id in adj


def test_unknown_face(cube):
    with pytest.raises(UnknownFace):
        cube.face(99)
    with pytest.raises(UnknownFace):
        adjacent_faces(cube, 99, LoopKind.OUTER)


def test_json_round_trip(tmp_path, fig8):
    path = tmp_path / "m.json"
    save_model(fig8.model, path)
    back = load_model(path)
    assert model_to_dict(back) == model_to_dict(fig8.model)


def test_schema_errors():
    with pytest.raises(SchemaError):
        model_from_dict([])
    with pytest.raises(SchemaError):
        model_from_dict({"vertices": []})
    with pytest.raises(SchemaError):
        model_from_dict({"schema_version": 99, "vertices": [], "edges": [], "faces": []})


def test_bad_loop_kind_is_schema_error(cube):
    d = model_to_dict(cube)
    d["faces"][0]["loops"][0]["kind"] = "SIDEWAYS"
    with pytest.raises(SchemaError):
        model_from_dict(d)


def test_surface_parameter_checks():
    with pytest.raises(SchemaError):
        Cylinder((0, 0, 0), (0, 0, 1), 0.0)
    with pytest.raises(SchemaError):
        Cone((0, 0, 0), (0, 0, 1), 2.0)
    with pytest.raises(SchemaError):
        Torus((0, 0, 0), (0, 0, 1), 1.0, 2.0)
    with pytest.raises(ValueError):
        Plane((0, 0, 0), (0, 0, 0))


def test_face_types():
    assert Plane((0, 0, 0), (0, 0, 1)).face_type is FaceType.PLAN
    assert Cylinder((0, 0, 0), (0, 0, 1), 1).face_type is FaceType.CYLI
    assert Cone((0, 0, 0), (0, 0, 1), 0.5).face_type is FaceType.CONI
    assert Torus((0, 0, 0), (0, 0, 1), 2, 1).face_type is FaceType.TORO


def test_flipped_coedge_is_reported(cube):
    d = model_to_dict(cube)
    c = d["faces"][0]["loops"][0]["coedges"][0]
    c["reversed"] = not c["reversed"]
    with pytest.raises(TopologyError) as exc:
        model_from_dict(d)
    assert any("same orientation" in msg or "gap" in msg for msg in exc.value.diagnostics)


def test_missing_face_leaves_edges_single_used(cube):
    d = model_to_dict(cube)
    d["faces"] = d["faces"][1:]
    diags = validate_topology(model_from_dict(d, validate=False))
    assert sum("expected 2" in msg for msg in diags) == 4


def test_vertex_off_surface_is_reported():
    verts = [Vertex(1, (0, 0, 0)), Vertex(2, (1, 0, 0)), Vertex(3, (0, 1, 0.5))]
    edges = [Edge(1, CircularArc((0, 0, 0), (0, 0, 1), 1.0), 2, 2)]
    lp = Loop(LoopKind.OUTER, (Coedge(1),))
    m = Model(verts[:2], edges, [Face(1, Plane((0, 0, 0), (0, 0, 1)), True, (lp,))])
    diags = validate_topology(m)
    assert any("expected 2" in msg for msg in diags)
    with pytest.raises(TopologyError):
        check(m)


def test_transform_preserves_validity_and_measures(fig8):
    R = Rotation.from_euler("xyz", [0.3, -1.1, 2.0]).as_matrix()
    moved = transform_model(fig8.model, R, (5.0, -2.0, 7.0))
    assert validate_topology(moved) == []
    for v in fig8.model.vertices[1:]:
        d0 = np.linalg.norm(fig8.model.point(v.id) - fig8.model.point(1))
        d1 = np.linalg.norm(moved.point(v.id) - moved.point(1))
        assert d1 == pytest.approx(d0, rel=1e-12)
    for a, b in zip(fig8.model.faces, moved.faces):
        if hasattr(a.surface, "radius"):
            assert a.surface.radius == pytest.approx(b.surface.radius)


def test_mirror_keeps_topology_valid(fig8):
    moved = transform_model(fig8.model, np.diag([1.0, 1.0, -1.0]))
    assert validate_topology(moved) == []


def test_bbox_includes_arc_bulge(suite):
    m = suite["rotational_simple_hole"].model
    lo, hi = m.bbox()
    assert hi[0] - lo[0] == pytest.approx(2 * 20.0)


def test_model_dict_is_json_serializable(cube):
    text = json.dumps(model_to_dict(cube))
    assert json.loads(text)["units"] == "mm"
