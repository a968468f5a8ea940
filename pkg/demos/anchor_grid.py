"""Anchor generation and labeling against ground-truth boxes."""

import math
from collections import Counter

from orientkit import AnchorConfig, OrientedBox, generate_anchors, label_anchors

# The default configuration: 7 orientations x 3 scales x 3 aspect ratios
# = 63 anchors per feature-map cell.
config = AnchorConfig()
print(f"anchors per cell: {config.anchors_per_cell}")
print(f"orientations (deg): {[round(math.degrees(o), 1) for o in config.orientations]}")

anchors = generate_anchors(4, 4, config)
print(f"4x4 grid -> {len(anchors)} anchors")

# A smaller, denser configuration suited to a toy 64x64 image.
small = AnchorConfig(
    orientations=config.orientations,
    aspect_ratios=(1.0, 0.5, 2.0),
    scales=(12.0, 20.0),
    stride=16.0,
)
anchors = generate_anchors(4, 4, small)
print(f"dense toy grid -> {len(anchors)} anchors")

# Two rotated "fingertips" as ground truth.
gt = [
    OrientedBox(18, 30, 12, 20, math.radians(15)),
    OrientedBox(45, 35, 14, 22, math.radians(-30)),
]
labels = label_anchors(anchors, gt, small)
counts = Counter(lab.kind for lab in labels)
print(f"label counts: {dict(counts)}")

best = max(labels, key=lambda lab: lab.max_iou)
print(f"best anchor IoU: {best.max_iou:.3f} (matched gt {best.matched_gt})")

# Positive anchors remember which ground-truth box they own.
for i, lab in enumerate(labels):
    if lab.kind == "positive":
        a = anchors[i]
        print(f"  positive anchor at cell {a.cell}, "
              f"theta {math.degrees(a.box.theta):5.1f} deg, "
              f"IoU {lab.max_iou:.3f} -> gt {lab.matched_gt}")
