from __future__ import annotations

import json

import pytest

from featrec.cli import main


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_generate_recognize_evaluate(tmp_path, capsys):
    m, t, r, rep, csv = (tmp_path / n for n in ("m.json", "t.json", "r.json", "rep.json", "cm.csv"))
    assert run("generate", "--feature", "countersink_hole", "--out", m, "--truth", t) == 0
    assert run("recognize", "--model", m, "--out", r) == 0
    doc = json.loads(r.read_text())
    assert {"config", "faces", "instances"} <= set(doc)
    assert run("evaluate", "--pred", r, "--truth", t, "--out", rep, "--csv", csv) == 0
    report = json.loads(rep.read_text())
    assert report["metrics"] == {"precision": 1.0, "recall": 1.0, "accuracy": 1.0, "f1": 1.0}
    assert csv.read_text().startswith("truth\\pred,")


def test_generate_with_params(tmp_path):
    out = tmp_path / "m.json"
    assert run("generate", "--feature", "simple_hole", "--params", "radius=2.5", "representation=TWO_HALF_CYLINDERS", "--out", out) == 0
    doc = json.loads(out.read_text())
    radii = {f["surface"].get("radius") for f in doc["faces"] if f["surface"]["kind"] == "cylinder"}
    assert radii == {2.5}


def test_generate_suite(tmp_path):
    assert run("generate", "--suite", "standard", "--out-dir", tmp_path / "s") == 0
    assert len(list((tmp_path / "s").glob("*.truth.json"))) >= 24


def test_describe_fig8_face(tmp_path, data_dir, capsys):
    assert run("describe", "--model", data_dir / "counterbore_fig8.json", "--face", 7) == 0
    items = json.loads(capsys.readouterr().out)["items"]
    assert items["ol_convexity"] == ["CYLI|CONCAVE:2", "PLAN|CONVEX:1"]
    assert items["il_perpendicular"] == ["CYLI|CONVEX:2"]
    assert items["ax_coaxial"] == "TRUE"


def test_ingest_step(tmp_path, data_dir):
    out = tmp_path / "cube.json"
    assert run("ingest-step", "--in", data_dir / "cube.step", "--out", out) == 0
    assert len(json.loads(out.read_text())["faces"]) == 6


def test_recognize_step_directly(tmp_path, data_dir):
    out = tmp_path / "r.json"
    assert run("recognize", "--model", data_dir / "counterbore_fig8.step", "--out", out) == 0
    feats = [i["feature"] for i in json.loads(out.read_text())["instances"]]
    assert feats == ["counterbore_hole"]


def test_config_file(tmp_path, data_dir, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"conditions": {"slot_width_threshold": 100.0}, "recognition": {"threshold": 0.9}}))
    out = tmp_path / "r.json"
    assert run("recognize", "--model", data_dir / "counterbore_fig8.json", "--config", cfg, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["threshold"] == 0.9
    assert doc["config"]["conditions"]["slot_width_threshold"] == 100.0


def test_templates_validate(tmp_path, capsys):
    assert run("templates", "validate") == 0
    assert "16 features" in capsys.readouterr().out
    bad = tmp_path / "t.json"
    bad.write_text(json.dumps({"templates": [{"feature": "simple_hole", "items": {"f_facetype": {"min": "PLAN|CONVEX:1"}}}]}))
    assert run("templates", "validate", bad) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["describe", "--model", "{data}/counterbore_fig8.json", "--face", "999"],
        ["recognize", "--model", "{tmp}/missing.json"],
        ["ingest-step", "--in", "{tmp}/bad.step", "--out", "{tmp}/x.json"],
        ["generate", "--feature", "simple_hole", "--params", "radius=-2", "--out", "{tmp}/x.json"],
        ["generate", "--feature", "simple_hole"],
        ["recognize", "--model", "{data}/counterbore_fig8.json", "--config", "{tmp}/badcfg.json"],
    ],
)
def test_domain_errors_exit_one(tmp_path, data_dir, capsys, argv):
    (tmp_path / "bad.step").write_text("ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n")
    (tmp_path / "badcfg.json").write_text(json.dumps({"recognition": {"threshold": 2.0}}))
    argv = [a.format(data=data_dir, tmp=tmp_path) for a in argv]
    assert main(argv) == 1
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["bogus"], ["describe", "--model", "x.json"], ["describe", "--model", "x", "--face", "seven"]])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_evaluate_needs_pairs(tmp_path, capsys):
    f = tmp_path / "a.json"
    f.write_text(json.dumps({"faces": []}))
    assert main(["evaluate", "--pred", str(f), "--pred", str(f), "--truth", str(f)]) == 1
