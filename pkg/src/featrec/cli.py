"""Command-line entry point: ``featrec <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .brep import load_model, save_model
from .descriptor import MachiningConditions, extract_descriptor, load_templates
from .evaluation import ConfusionMatrix, confusion, labels_from_document, report
from .geom import Tolerances
from .recognizer import recognize
from .similarity import RecognitionConfig
from .step import load_step
from .synth import generate, standard_suite


def load_config(path: str | None) -> tuple[MachiningConditions, Tolerances, RecognitionConfig]:
    if path is None:
        return MachiningConditions(), Tolerances(), RecognitionConfig()
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = set(data) - {"conditions", "tolerances", "recognition"}
    if unknown:
        raise ValueError(f"{path}: unknown config sections {sorted(unknown)}")
    try:
        return (
            MachiningConditions(**data.get("conditions", {})),
            Tolerances(**data.get("tolerances", {})),
            RecognitionConfig(**data.get("recognition", {})),
        )
    except TypeError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=1)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _parse_params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"bad parameter {item!r}, expected key=value")
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def cmd_generate(args) -> int:
    if args.suite:
        if not args.out_dir:
            raise ValueError("--suite needs --out-dir")
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for sm in standard_suite():
            save_model(sm.model, out / f"{sm.name}.json")
            (out / f"{sm.name}.truth.json").write_text(json.dumps(sm.truth_to_dict(), indent=1) + "\n")
        return 0
    if not args.feature or not args.out:
        raise ValueError("generate needs --feature and --out, or --suite with --out-dir")
    sm = generate(args.feature, _parse_params(args.params))
    save_model(sm.model, args.out)
    if args.truth:
        Path(args.truth).write_text(json.dumps(sm.truth_to_dict(), indent=1) + "\n")
    return 0


def cmd_ingest(args) -> int:
    # diagnostics reach stderr through the logging warnings
    model = load_step(args.input)
    save_model(model, args.out)
    return 0


def _load_any(path: str):
    return load_step(path) if Path(path).suffix.lower() in (".step", ".stp") else load_model(path)


def cmd_describe(args) -> int:
    conditions, tol, _ = load_config(args.config)
    d = extract_descriptor(_load_any(args.model), args.face, conditions, tol)
    _write_json({"face": args.face, "items": d.to_dict()}, args.out)
    return 0


def cmd_recognize(args) -> int:
    conditions, tol, cfg = load_config(args.config)
    library = load_templates(args.templates)
    result = recognize(_load_any(args.model), library, conditions, cfg, tol)
    _write_json(result.to_dict(explain=args.explain), args.out)
    return 0


def cmd_evaluate(args) -> int:
    if len(args.pred) != len(args.truth):
        raise ValueError("--pred and --truth must be given the same number of times")
    cm = ConfusionMatrix.zeros()
    for p, t in zip(args.pred, args.truth):
        pred = labels_from_document(json.loads(Path(p).read_text()))
        truth = labels_from_document(json.loads(Path(t).read_text()))
        cm = cm + confusion(truth, pred)
    _write_json(report(cm), args.out)
    if args.csv:
        Path(args.csv).write_text(cm.to_csv())
    return 0


def cmd_templates_validate(args) -> int:
    lib = load_templates(args.templates)
    print(f"ok: {len(lib.templates)} templates, {len(lib.features())} features, version {lib.version}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="featrec", description="Template-based machining feature recognition.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic model and its truth labels")
    g.add_argument("--feature")
    g.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    g.add_argument("--out")
    g.add_argument("--truth")
    g.add_argument("--suite", choices=["standard"])
    g.add_argument("--out-dir")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("ingest-step", help="convert a STEP file into a model JSON")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    d = sub.add_parser("describe", help="print the descriptor of one face")
    d.add_argument("--model", required=True)
    d.add_argument("--face", type=int, required=True)
    d.add_argument("--config")
    d.add_argument("--out")
    d.set_defaults(func=cmd_describe)

    r = sub.add_parser("recognize", help="label faces and group feature instances")
    r.add_argument("--model", required=True)
    r.add_argument("--out")
    r.add_argument("--config")
    r.add_argument("--templates")
    r.add_argument("--explain", action="store_true", help="include per-item scores")
    r.set_defaults(func=cmd_recognize)

    e = sub.add_parser("evaluate", help="confusion matrix and metrics")
    e.add_argument("--pred", action="append", required=True)
    e.add_argument("--truth", action="append", required=True)
    e.add_argument("--out")
    e.add_argument("--csv")
    e.set_defaults(func=cmd_evaluate)

    t = sub.add_parser("templates", help="template library tools")
    tsub = t.add_subparsers(dest="templates_command", required=True)
    tv = tsub.add_parser("validate", help="check a template file")
    tv.add_argument("templates", nargs="?", help="template JSON (default: built-in library)")
    tv.set_defaults(func=cmd_templates_validate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
