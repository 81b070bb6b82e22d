"""End to end: image sets -> AGF1 embedding files -> metric scores.

The companion agf-extractor package turns a dataset manifest into one
matrix row per image (features or class probabilities) and writes the
binary AGF1 container this toolkit reads.  Its stub backend needs no
model download, which makes the whole loop runnable anywhere; swap in
backend="classifier" for real pretrained-network embeddings.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from agf_extractor import ExtractorConfig, extract
from agrisynth.cli import main as agrisynth_cli
from agrisynth.ganmetrics import kernel_mmd, load_agf1, one_nn_accuracy

work = Path(tempfile.mkdtemp(prefix="demo07_"))
rng = np.random.default_rng(2)


def write_set(name, brightness):
    """A directory of PNGs standing in for one dataset's RGB images."""
    folder = work / name
    folder.mkdir()
    for i in range(12):
        pixels = rng.integers(0, brightness, (24, 24, 3)).astype(np.uint8)
        Image.fromarray(pixels).save(folder / f"{i:02d}.png")
    return folder


real_dir = write_set("real", 200)
fake_dir = write_set("fake", 120)     # a visibly darker "generated" set

paths = {}
for label, folder in (("real", real_dir), ("fake", fake_dir)):
    out = work / f"{label}.agf1"
    extract(ExtractorConfig(backend="stub", input=folder, output=out,
                            kind="features", stub_seed=42, dims=8))
    paths[label] = out
    data, _ = load_agf1(out)
    print(f"{label}: {data.shape[0]} rows x {data.shape[1]} dims")

real, _ = load_agf1(paths["real"])
fake, _ = load_agf1(paths["fake"])
print(f"kernel MMD real vs fake: {kernel_mmd(real, fake):.4f}")
print(f"1-NN accuracy real vs fake: {one_nn_accuracy(real, fake):.3f} "
      "(separable sets score near 1)")

# The same files drive the command-line front end.
print("\n$ agrisynth metrics gan --real real.agf1 --fake fake.agf1 --pretty")
agrisynth_cli(["metrics", "gan", "--real", str(paths["real"]),
               "--fake", str(paths["fake"]), "--pretty"])
