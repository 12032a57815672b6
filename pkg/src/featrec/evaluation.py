"""Per-face multi-class evaluation: confusion matrix and macro-averaged metrics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

import numpy as np

from .descriptor import EDGE_FEATURES, Feature

NONE = "NONE"
CLASSES: tuple[str, ...] = tuple(f.value for f in Feature) + (NONE,)
EDGE_LABELS = frozenset(f.value for f in EDGE_FEATURES)
AVERAGING = "macro over classes present in truth"


class FaceSetMismatch(ValueError):
    pass


class EmptyMatrix(ValueError):
    pass


@dataclass
class ConfusionMatrix:
    """Rows are truth classes, columns predicted classes."""

    classes: tuple[str, ...]
    counts: np.ndarray

    @classmethod
    def zeros(cls, classes: Iterable[str] = CLASSES) -> "ConfusionMatrix":
        classes = tuple(classes)
        return cls(classes, np.zeros((len(classes), len(classes)), dtype=np.int64))

    def index(self, name: str) -> int:
        return self.classes.index(name)

    def add(self, truth: str, pred: str, n: int = 1) -> None:
        self.counts[self.index(truth), self.index(pred)] += n

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.classes != other.classes:
            raise ValueError("class lists differ")
        return ConfusionMatrix(self.classes, self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def off_diagonal(self) -> int:
        return self.total - int(np.trace(self.counts))

    def tp_fp_fn_tn(self, name: str) -> tuple[int, int, int, int]:
        i = self.index(name)
        tp = int(self.counts[i, i])
        fp = int(self.counts[:, i].sum()) - tp
        fn = int(self.counts[i, :].sum()) - tp
        return tp, fp, fn, self.total - tp - fp - fn

    def present(self) -> list[str]:
        return [c for i, c in enumerate(self.classes) if self.counts[i, :].sum() > 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["truth\\pred", *self.classes])
        for name, row in zip(self.classes, self.counts):
            w.writerow([name, *(int(x) for x in row)])
        return buf.getvalue()


@dataclass(frozen=True)
class Metrics:
    precision: Fraction
    recall: Fraction
    accuracy: Fraction
    f1: Fraction

    def rounded(self, digits: int = 4) -> dict[str, float]:
        return {k: round(float(getattr(self, k)), digits) for k in ("precision", "recall", "accuracy", "f1")}


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def class_metrics(tp: int, fp: int, fn: int, tn: int) -> Metrics:
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    f1 = 2 * p * r / (p + r) if p + r > 0 else Fraction(0)
    return Metrics(p, r, _ratio(tp + tn, tp + tn + fp + fn), f1)


def metrics(cm: ConfusionMatrix, classes: Iterable[str] | None = None) -> Metrics:
    """Macro average of per-class metrics; by default over classes present in truth."""
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has no counts")
    names = list(classes) if classes is not None else cm.present()
    per = [class_metrics(*cm.tp_fp_fn_tn(c)) for c in names]
    n = len(per)
    return Metrics(
        sum((m.precision for m in per), Fraction(0)) / n,
        sum((m.recall for m in per), Fraction(0)) / n,
        sum((m.accuracy for m in per), Fraction(0)) / n,
        sum((m.f1 for m in per), Fraction(0)) / n,
    )


def _primary(labels: Iterable[str]) -> str | None:
    found = [c for c in CLASSES if c in set(labels)]
    return found[0] if found else None


def face_cell(truth: set[str], pred: set[str]) -> tuple[str, str]:
    """The single (truth, predicted) cell a face contributes.

    A fillet or chamfer label present on both sides counts as correct even if
    either side carries a second label.
    """
    if truth == pred:
        c = _primary(truth) or NONE
        return c, c
    shared_edge = sorted((truth & pred) & EDGE_LABELS, key=CLASSES.index)
    if shared_edge:
        return shared_edge[0], shared_edge[0]
    t = _primary(truth - pred) or _primary(truth) or NONE
    p = _primary(pred - truth) or _primary(pred) or NONE
    return t, p


def confusion(
    truth: Mapping[Hashable, Iterable[str]],
    pred: Mapping[Hashable, Iterable[str]],
    classes: Iterable[str] = CLASSES,
) -> ConfusionMatrix:
    if set(truth) != set(pred):
        missing = sorted(map(str, set(truth) ^ set(pred)))
        raise FaceSetMismatch(f"truth and prediction cover different faces: {', '.join(missing)}")
    cm = ConfusionMatrix.zeros(classes)
    for fid in truth:
        t, p = face_cell(set(truth[fid]), set(pred[fid]))
        cm.add(t, p)
    return cm


def labels_from_document(doc: Mapping) -> dict[int, set[str]]:
    """Face labels from a recognition result or a truth document.

    Both store a ``faces`` list; labels may be plain strings or objects with
    a ``feature`` key.
    """
    try:
        out: dict[int, set[str]] = {}
        for f in doc["faces"]:
            labs = set()
            for lb in f.get("labels", []):
                labs.add(lb["feature"] if isinstance(lb, Mapping) else str(lb))
            unknown = labs - set(CLASSES)
            if unknown:
                raise ValueError(f"face {f['id']}: unknown labels {sorted(unknown)}")
            out[int(f["id"])] = labs
        return out
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed label document: {exc!r}") from None


def report(cm: ConfusionMatrix) -> dict:
    m = metrics(cm)
    per_class = {}
    for c in cm.present():
        tp, fp, fn, tn = cm.tp_fp_fn_tn(c)
        per_class[c] = {"tp": tp, "fp": fp, "fn": fn, "tn": tn, **class_metrics(tp, fp, fn, tn).rounded()}
    return {
        "averaging": AVERAGING,
        "faces": cm.total,
        "metrics": m.rounded(),
        "per_class": per_class,
        "classes": list(cm.classes),
        "confusion": cm.counts.tolist(),
    }
