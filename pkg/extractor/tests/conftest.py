"""Builders for manifest fixtures in the primary toolkit's on-disk format."""

import json

import numpy as np
import pytest
from PIL import Image


def _write_image_set(root, count=10, size=12, seed=7, order=None):
    """Write count small samples (rgb/nir/mask PNGs) plus a manifest.

    order: optional permutation of range(count) controlling entry order,
    to exercise row-order guarantees against sorted-name order.
    """
    rng = np.random.default_rng(seed)
    for sub in ("rgb", "nir", "mask"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(count):
        name = f"img_{i:02d}"
        rgb = rng.integers(0, 256, (size, size, 3), dtype=np.uint8)
        nir = rng.integers(0, 256, (size, size), dtype=np.uint8)
        mask = rng.integers(0, 3, (size, size)).astype(np.uint8)
        Image.fromarray(rgb).save(root / "rgb" / f"{name}.png")
        Image.fromarray(nir).save(root / "nir" / f"{name}.png")
        Image.fromarray(mask).save(root / "mask" / f"{name}.png")
        entries.append({"id": name, "rgb": f"rgb/{name}.png",
                        "nir": f"nir/{name}.png", "mask": f"mask/{name}.png",
                        "provenance": "real"})
    if order is not None:
        entries = [entries[i] for i in order]
    path = root / "manifest.json"
    path.write_text(json.dumps({"name": "fixture", "entries": entries}))
    return path


@pytest.fixture
def write_image_set():
    # Factory fixture: avoids importing this conftest by module path,
    # which would clash with the primary suite's tests package.
    return _write_image_set
