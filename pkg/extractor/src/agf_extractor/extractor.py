"""Turn an image set into one AGF1 matrix row per image.

Two backends: ``classifier`` runs a pretrained Inception v3 (features
from the penultimate pooled layer, probabilities from the softmax
output); ``stub`` is a deterministic, model-free stand-in for CI that
projects per-channel histograms through a seeded random matrix.  Row
order always follows the input manifest (or sorted directory listing),
because downstream paired analyses align files row by row.

Only the RGB planes are read; NIR and mask files referenced by a
manifest are ignored.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

MAGIC = b"AGF1"
VERSION = 1
KIND_CODES = {"features": 0, "probabilities": 1}
DEFAULT_DIMS = {"features": 8, "probabilities": 10}

_HEADER = struct.Struct("<4sHBBII")
_HIST_BINS = 32
_BATCH = 16


class ExtractorError(Exception):
    """Base for everything this package raises on purpose."""


class InputError(ExtractorError):
    """Bad configuration, unreadable image, or malformed manifest."""


class BackendUnavailableError(ExtractorError):
    """The requested backend cannot run here (missing runtime or weights).

    Deliberately distinct from InputError: the fix is an install or a
    download, not a change to the data.
    """


@dataclass(frozen=True)
class ExtractorConfig:
    """One extraction job.

    ``input`` is either a manifest JSON (rows follow entry order) or a
    directory of PNGs (rows follow sorted filename order).  ``dims``
    only applies to the stub backend; the classifier's layer widths are
    fixed by the model.
    """

    backend: str
    input: Path
    output: Path
    kind: str
    stub_seed: int = 0
    dims: int | None = None

    def __post_init__(self):
        backend = {"pretrained-classifier": "classifier"}.get(
            self.backend, self.backend)
        if backend not in ("stub", "classifier"):
            raise InputError(
                f"backend must be 'stub' or 'classifier', got {self.backend!r}")
        object.__setattr__(self, "backend", backend)
        if self.kind not in KIND_CODES:
            raise InputError(
                f"kind must be 'features' or 'probabilities', got {self.kind!r}")
        if not 0 <= int(self.stub_seed) < 2 ** 64:
            raise InputError("stub_seed must fit an unsigned 64-bit integer")
        if self.dims is not None and self.dims < 1:
            raise InputError(f"dims must be >= 1, got {self.dims}")
        object.__setattr__(self, "input", Path(self.input))
        object.__setattr__(self, "output", Path(self.output))
        parent = self.output.parent
        if not parent.is_dir():
            raise InputError(f"output parent directory does not exist: {parent}")


def image_paths(source: Path) -> list[Path]:
    """Resolve the row-ordered list of RGB image paths for ``source``."""
    source = Path(source)
    if source.is_dir():
        paths = sorted(p for p in source.iterdir()
                       if p.suffix.lower() == ".png")
        if not paths:
            raise InputError(f"no PNG images in directory {source}")
        return paths
    try:
        raw = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read manifest {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed manifest {source}: {exc}") from exc
    entries = raw.get("entries") if isinstance(raw, dict) else None
    if not isinstance(entries, list) or not entries:
        raise InputError(f"manifest {source} has no entries list")
    paths = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "rgb" not in entry:
            raise InputError(f"manifest {source}: entry {i} has no rgb path")
        paths.append(source.parent / entry["rgb"])
    return paths


def load_rgb(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as exc:
        raise InputError(f"cannot read image {path}: {exc}") from exc


def histogram_descriptor(rgb: np.ndarray) -> np.ndarray:
    """Concatenated per-channel 32-bin histograms, normalized to sum 1.

    A pure function of pixel content: equal images always map to equal
    descriptors regardless of path or position in the set.
    """
    planes = [np.bincount(rgb[:, :, c].ravel() >> 3, minlength=_HIST_BINS)
              for c in range(3)]
    hist = np.concatenate(planes).astype(np.float64)
    return hist / hist.sum()


def stub_rows(paths: list[Path], kind: str, dims: int,
              seed: int) -> np.ndarray:
    """Seeded random projection of histogram descriptors.

    The projection matrix depends only on (seed, dims), the descriptor
    only on pixels, so reruns with one seed are bit-reproducible.
    """
    rng = np.random.default_rng(seed)
    projection = rng.normal(size=(3 * _HIST_BINS, dims))
    rows = np.stack([histogram_descriptor(load_rgb(p)) @ projection
                     for p in paths])
    if kind == "probabilities":
        # Histogram projections are small; scale before softmax so the
        # rows are not indistinguishably uniform.
        z = rows * 10.0
        z -= z.max(axis=1, keepdims=True)
        e = np.exp(z)
        rows = e / e.sum(axis=1, keepdims=True)
    return rows.astype(np.float32)


def _load_classifier(kind: str):
    try:
        import torch
        from torchvision.models import Inception_V3_Weights, inception_v3
    except ImportError as exc:
        raise BackendUnavailableError(
            "classifier backend needs torch and torchvision; install the "
            "'classifier' extra or use the stub backend") from exc
    weights = Inception_V3_Weights.IMAGENET1K_V1
    try:
        model = inception_v3(weights=weights)
    except Exception as exc:
        # Covers download failures and corrupt caches alike; either way
        # the model, not the input data, is what is missing.
        raise BackendUnavailableError(
            "pretrained classifier weights unavailable "
            f"({exc}); fetch them with network access or use the stub "
            "backend") from exc
    if kind == "features":
        model.fc = torch.nn.Identity()
    model.eval()
    return torch, model, weights.transforms()


def classifier_rows(paths: list[Path], kind: str) -> np.ndarray:
    torch, model, preprocess = _load_classifier(kind)
    chunks = []
    with torch.no_grad():
        for start in range(0, len(paths), _BATCH):
            batch = torch.stack(
                [preprocess(Image.fromarray(load_rgb(p)))
                 for p in paths[start:start + _BATCH]])
            out = model(batch)
            if kind == "probabilities":
                out = torch.softmax(out, dim=1)
            chunks.append(out.cpu().numpy().astype(np.float32))
    return np.vstack(chunks)


def write_agf1(path: Path, rows: np.ndarray, kind: str) -> Path:
    arr = np.ascontiguousarray(np.asarray(rows, dtype=np.float32))
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"AGF1 payload must be a non-empty matrix, "
                         f"got shape {arr.shape}")
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, KIND_CODES[kind], 0,
                          arr.shape[0], arr.shape[1])
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(arr.tobytes())
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    return path


def read_header(path: Path) -> tuple[str, int, int]:
    """(kind, rows, dims) from an AGF1 file written by this package."""
    with open(path, "rb") as fh:
        magic, version, kind_code, _, rows, dims = _HEADER.unpack(
            fh.read(_HEADER.size))
    if magic != MAGIC or version != VERSION:
        raise InputError(f"{path} is not an AGF1 v{VERSION} file")
    kinds = {v: k for k, v in KIND_CODES.items()}
    return kinds[kind_code], rows, dims


def extract(config: ExtractorConfig) -> Path:
    """Run one extraction job and return the written AGF1 path."""
    paths = image_paths(config.input)
    if config.backend == "stub":
        dims = config.dims if config.dims is not None \
            else DEFAULT_DIMS[config.kind]
        rows = stub_rows(paths, config.kind, dims, config.stub_seed)
    else:
        if config.dims is not None:
            raise InputError("dims is fixed by the classifier backend; "
                             "drop the setting or use the stub backend")
        rows = classifier_rows(paths, config.kind)
    return write_agf1(config.output, rows, config.kind)
