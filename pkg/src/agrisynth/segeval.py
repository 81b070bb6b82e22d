"""Segmentation scoring over 3-class (soil/crop/weed) masks.

Everything derives from a 3x3 pixel-count confusion matrix: per-class
IoU, precision, recall, and DICE, overall accuracy, and mean IoU over
all three classes (soil included).  Also provides the paired per-image
comparison used to argue one model beats another on a test set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agrisynth.imagery import CLASS_NAMES, LabelMask

COMPARE_METRICS = ("accuracy", "dice", "iou")


class SegEvalError(ValueError):
    """Raised for invalid segmentation-evaluation inputs."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 tally; counts[g][p] = pixels of ground-truth class g predicted p."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (3, 3):
            raise SegEvalError(f"confusion matrix must be 3x3, got {arr.shape}")
        if (arr < 0).any():
            raise SegEvalError("confusion matrix entries must be >= 0")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "counts", arr)

    @classmethod
    def empty(cls) -> "ConfusionMatrix":
        return cls(np.zeros((3, 3), dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return self.merge(other)


def accumulate(gt: LabelMask, pred: LabelMask,
               into: ConfusionMatrix | None = None) -> ConfusionMatrix:
    """Add one ground-truth/prediction mask pair into a confusion matrix.

    Accumulation is matrix addition, so folding a list of pairs gives
    the same result in any order.
    """
    if into is None:
        into = ConfusionMatrix.empty()
    if (gt.height, gt.width) != (pred.height, pred.width):
        raise SegEvalError(
            f"mask dimensions differ: gt {gt.width}x{gt.height} vs "
            f"pred {pred.width}x{pred.height}")
    joint = gt.labels.astype(np.int64).ravel() * 3 + pred.labels.astype(np.int64).ravel()
    counts = np.bincount(joint, minlength=9).reshape(3, 3)
    return ConfusionMatrix(into.counts + counts)


@dataclass(frozen=True)
class ClassScores:
    iou: float
    precision: float
    recall: float
    dice: float


@dataclass(frozen=True)
class SegReport:
    """Per-class scores plus overall accuracy and mean IoU (soil included)."""

    per_class: dict[str, ClassScores]
    miou: float
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "per_class": {name: vars(scores) for name, scores in self.per_class.items()},
            "miou": self.miou,
            "accuracy": self.accuracy,
        }


def _ratio(num: int, den: int, absent: bool) -> float:
    # 0/0 is 1 when the class appears in neither gt nor prediction
    # (vacuously perfect), else 0; avoids NaN on class-free images.
    if den == 0:
        return 1.0 if absent else 0.0
    return num / den


def segmentation_metrics(cm: ConfusionMatrix) -> SegReport:
    """Derive the full IoU/precision/recall/DICE report from a tally."""
    if cm.total == 0:
        raise SegEvalError("empty confusion matrix")
    counts = cm.counts
    per_class: dict[str, ClassScores] = {}
    ious = []
    for c, name in enumerate(CLASS_NAMES):
        tp = int(counts[c, c])
        fp = int(counts[:, c].sum()) - tp
        fn = int(counts[c, :].sum()) - tp
        absent = counts[c, :].sum() == 0 and counts[:, c].sum() == 0
        scores = ClassScores(
            iou=_ratio(tp, tp + fp + fn, absent),
            precision=_ratio(tp, tp + fp, absent),
            recall=_ratio(tp, tp + fn, absent),
            dice=_ratio(2 * tp, 2 * tp + fp + fn, absent),
        )
        per_class[name] = scores
        ious.append(scores.iou)
    return SegReport(per_class=per_class,
                     miou=float(np.mean(ious)),
                     accuracy=float(np.trace(counts)) / cm.total)


def score_pair(gt: LabelMask, pred: LabelMask, metric: str) -> float:
    """One scalar score for a single image pair, for paired comparisons.

    accuracy is the pixel accuracy; iou and dice are the three-class
    means, with absent classes scoring 1 so weed-free images do not NaN.
    """
    if metric not in COMPARE_METRICS:
        raise SegEvalError(f"metric must be one of {COMPARE_METRICS}, got {metric!r}")
    report = segmentation_metrics(accumulate(gt, pred))
    if metric == "accuracy":
        return report.accuracy
    if metric == "iou":
        return report.miou
    return float(np.mean([s.dice for s in report.per_class.values()]))


@dataclass(frozen=True)
class PairedComparison:
    """Per-image win counts of model A against model B on one metric."""

    metric: str
    wins_a: int
    wins_b: int
    total: int
    win_rate_a: float

    def to_dict(self) -> dict:
        return {"metric": self.metric, "wins_a": self.wins_a,
                "wins_b": self.wins_b, "total": self.total,
                "win_rate_a": self.win_rate_a}


def format_percent(fraction: float) -> str:
    return f"{fraction * 100:.2f}%"


def paired_compare(per_image_a: list[float], per_image_b: list[float],
                   metric: str = "accuracy") -> PairedComparison:
    """Count images where model A strictly beats model B.

    Ties count for B, the conservative choice when A is the candidate
    and B the baseline.
    """
    if metric not in COMPARE_METRICS:
        raise SegEvalError(f"metric must be one of {COMPARE_METRICS}, got {metric!r}")
    if len(per_image_a) != len(per_image_b):
        raise SegEvalError(
            f"score lists differ in length: {len(per_image_a)} vs {len(per_image_b)}")
    if not per_image_a:
        raise SegEvalError("empty score lists")
    wins_a = sum(1 for a, b in zip(per_image_a, per_image_b) if a > b)
    total = len(per_image_a)
    return PairedComparison(metric=metric, wins_a=wins_a, wins_b=total - wins_a,
                            total=total, win_rate_a=wins_a / total)


_COLUMNS = ["miou", "acc"] + [
    f"{kind}_{name}" for kind in ("iou", "prec", "rec", "dice")
    for name in CLASS_NAMES
]


def _report_row(report: SegReport) -> list[float]:
    row = [report.miou, report.accuracy]
    for kind in ("iou", "precision", "recall", "dice"):
        row.extend(getattr(report.per_class[name], kind) for name in CLASS_NAMES)
    return row


def report_table(reports: list[tuple[str, SegReport]], fmt: str = "text") -> str:
    """Render labeled reports as aligned text or CSV, 2-decimal values."""
    if fmt not in ("text", "csv"):
        raise SegEvalError(f"fmt must be 'text' or 'csv', got {fmt!r}")
    rows = [(label, [f"{v:.2f}" for v in _report_row(report)])
            for label, report in reports]
    if fmt == "csv":
        lines = ["label," + ",".join(_COLUMNS)]
        lines += [label + "," + ",".join(cells) for label, cells in rows]
        return "\n".join(lines) + "\n"
    label_w = max([len("label")] + [len(label) for label, _ in rows])
    widths = [max(len(col), 4) for col in _COLUMNS]
    header = "  ".join(["label".ljust(label_w)]
                       + [col.rjust(w) for col, w in zip(_COLUMNS, widths)])
    lines = [header]
    for label, cells in rows:
        lines.append("  ".join([label.ljust(label_w)]
                               + [c.rjust(w) for c, w in zip(cells, widths)]))
    return "\n".join(lines) + "\n"
