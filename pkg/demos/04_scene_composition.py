"""Replacing real plants with generated ones, annotation untouched.

compose_scene swaps every eligible plant instance for a generator patch
pasted only inside the instance's original footprint.  Because the
footprint and the label mask are inherited bit-for-bit, the composed
scene is a new training image with a known-correct annotation for free.

The bundled mock endpoint stands in for a real generator process; a
directory endpoint (pre-rendered patch bank) and a subprocess endpoint
(external generator command) share the same interface.
"""

import tempfile
from pathlib import Path

import numpy as np

from agrisynth.compose import (
    GeneratorEndpoint,
    MixSpec,
    build_dataset,
    compose_scene,
    eligible_instances,
)
from agrisynth.imagery import (
    AnnotatedSample,
    DatasetManifest,
    LabelMask,
    MultiSpectralImage,
    sample_entry,
)

rng = np.random.default_rng(5)
work = Path(tempfile.mkdtemp(prefix="demo04_"))

labels = np.zeros((128, 128), dtype=np.uint8)
labels[30:62, 20:52] = 1     # replaceable crop
labels[80:100, 70:95] = 2    # replaceable weed
labels[0:12, 100:115] = 2    # clipped by the frame: kept as-is
sample = AnnotatedSample(
    image=MultiSpectralImage(rng.integers(0, 120, (128, 128, 4)).astype(np.uint8)),
    mask=LabelMask(labels), id="scene")

endpoint = GeneratorEndpoint(kind="mock", patch_sizes={"crop": 64, "weed": 32})
composed = compose_scene(sample, endpoint, seed=11)

eligible = [i for i in eligible_instances(sample, ("crop", "weed"), margin=5)
            if i.eligible]
changed = int((composed.image.channels != sample.image.channels)
              .any(axis=2).sum())
print("eligible instances:", [(i.plant_class, i.area) for i in eligible])
print("changed pixels:", changed, "== total eligible area:",
      sum(i.area for i in eligible))
print("mask inherited exactly:",
      bool((composed.mask.labels == sample.mask.labels).all()))
print("provenance:", composed.provenance)

# Reruns with one seed are bit-identical, so datasets are reproducible.
assert (compose_scene(sample, endpoint, seed=11).image.channels
        == composed.image.channels).all()

# build_dataset mixes untouched originals with composed variants into a
# new manifest; here 2 originals + 3 semi-artificial from 6 sources.
root = work / "source"
entries = [sample_entry(
    AnnotatedSample(image=sample.image, mask=sample.mask, id=f"src_{i}"),
    root, relative_to=root) for i in range(6)]
source = DatasetManifest(name="source", entries=entries, root=root)
built = build_dataset(source, MixSpec(original_count=2, synthetic_count=3,
                                      seed=1), endpoint, work / "mixed")
print("built entries:",
      sorted((e.id, e.provenance) for e in built.entries))
