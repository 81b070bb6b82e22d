"""Finding plant instances in a mask and deciding which are replaceable.

Connected components (8-connectivity) of each plant class become
instances with tight bounding boxes and binary footprints.  An instance
qualifies for generator replacement only if its box stays clear of the
image border band and its mass sits centrally inside its own box, so
that pasting a generated patch cannot clip a plant or smear an
off-center one.
"""

import numpy as np

from agrisynth.imagery import LabelMask
from agrisynth.maskops import (
    extract_class_mask,
    extract_instances,
    filter_instances,
    resize_mask,
)

labels = np.zeros((64, 96), dtype=np.uint8)
labels[20:36, 30:46] = 1     # centered crop: replaceable
labels[0:10, 60:70] = 1      # touches the top border: not replaceable
labels[50:60, 4:14] = 2      # close to the left border: depends on margin
mask = LabelMask(labels)

h, w = labels.shape
for margin in (2, 5):
    print(f"margin={margin}:")
    for plant_class in ("crop", "weed"):
        binary = extract_class_mask(mask, plant_class)
        flagged = filter_instances(extract_instances(binary, plant_class),
                                   image_w=w, image_h=h, margin=margin)
        for inst in flagged:
            x0, y0, x1, y1 = inst.bbox
            print(f"  {inst.plant_class:<5} bbox=({x0},{y0})-({x1},{y1}) "
                  f"area={inst.area:<4} eligible={inst.eligible}")

# Footprints are resized to a generator's fixed input size with
# nearest-neighbor mapping; integer upscales invert exactly.
crops = extract_instances(extract_class_mask(mask, "crop"), "crop")
inst = next(i for i in crops if i.area == 256)
small = inst.footprint
big = resize_mask(small, 64, 64)
back = resize_mask(big, *small.shape)
print("16x16 -> 64x64 -> 16x16 footprint identical:",
      bool((back == small).all()))
