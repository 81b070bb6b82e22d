"""Scoring segmentation predictions and comparing two models fairly.

Per-image confusion matrices add up associatively, so dataset-level
scores come from one merged 3x3 matrix.  For model-vs-model claims the
paired per-image win count is more robust than comparing two averages:
every image votes, and ties count for the incumbent.
"""

import numpy as np

from agrisynth.imagery import LabelMask
from agrisynth.segeval import (
    ConfusionMatrix,
    accumulate,
    format_percent,
    paired_compare,
    report_table,
    score_pair,
    segmentation_metrics,
)

rng = np.random.default_rng(3)


def noisy_prediction(gt, flip_rate):
    """Ground truth with a fraction of pixels scrambled."""
    pred = gt.copy()
    flips = rng.random(gt.shape) < flip_rate
    pred[flips] = rng.integers(0, 3, int(flips.sum()))
    return pred


images = []
for _ in range(40):
    gt = np.zeros((32, 32), dtype=np.uint8)
    gt[8:20, 4:28] = 1
    gt[24:30, 10:16] = 2
    images.append((gt, noisy_prediction(gt, 0.04), noisy_prediction(gt, 0.12)))

# Dataset-level report per model, built by merging per-image matrices.
rows = []
for label, column in (("model_a", 1), ("model_b", 2)):
    total = ConfusionMatrix.empty()
    for triple in images:
        total = accumulate(LabelMask(triple[0]), LabelMask(triple[column]),
                           total)
    rows.append((label, segmentation_metrics(total)))
print(report_table(rows), end="")

# Paired comparison: how often is model_a strictly better, per image?
for metric in ("accuracy", "dice", "iou"):
    a_scores = [score_pair(LabelMask(g), LabelMask(a), metric)
                for g, a, _ in images]
    b_scores = [score_pair(LabelMask(g), LabelMask(b), metric)
                for g, _, b in images]
    comp = paired_compare(a_scores, b_scores, metric)
    print(f"{metric:<9} model_a wins {comp.wins_a}/{comp.total} "
          f"({format_percent(comp.win_rate_a)})")
