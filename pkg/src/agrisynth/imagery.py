"""Core raster types and lossless file I/O for multi-spectral field imagery.

Images are registered 4-channel rasters (R, G, B, NIR) stored as uint8
arrays of shape (H, W, 4).  Annotations are per-pixel label masks over
{0=soil, 1=crop, 2=weed}.  On disk, the RGB planes live in a 3-channel
8-bit PNG, the NIR plane in a grayscale PNG, and the mask in a grayscale
PNG carrying the raw label values.  PNG is lossless, so save followed by
load reproduces every pixel bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

SOIL = 0
CROP = 1
WEED = 2
CLASS_NAMES = ("soil", "crop", "weed")
VALID_LABELS = (SOIL, CROP, WEED)

PROVENANCE_REAL = "real"
PROVENANCE_SEMI = "semi-artificial"


class ImageryError(ValueError):
    """Raised for invalid raster data or unreadable image files."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MultiSpectralImage:
    """Registered 4-channel raster, channels ordered (R, G, B, NIR)."""

    channels: np.ndarray  # (H, W, 4) uint8

    def __post_init__(self):
        arr = np.asarray(self.channels)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ImageryError(
                f"expected (H, W, 4) channel array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ImageryError(f"expected uint8 planes, got {arr.dtype}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImageryError(f"degenerate image dimensions {arr.shape[:2]}")
        object.__setattr__(self, "channels", _frozen(arr))

    @property
    def height(self) -> int:
        return self.channels.shape[0]

    @property
    def width(self) -> int:
        return self.channels.shape[1]

    @property
    def rgb(self) -> np.ndarray:
        return self.channels[:, :, :3]

    @property
    def nir(self) -> np.ndarray:
        return self.channels[:, :, 3]

    @classmethod
    def from_rgb_nir(cls, rgb: np.ndarray, nir: np.ndarray) -> "MultiSpectralImage":
        rgb = np.asarray(rgb)
        nir = np.asarray(nir)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ImageryError(f"rgb must be (H, W, 3), got {rgb.shape}")
        if nir.ndim != 2:
            raise ImageryError(f"nir must be (H, W), got {nir.shape}")
        if rgb.shape[:2] != nir.shape:
            raise ImageryError(
                f"rgb {rgb.shape[:2]} and nir {nir.shape} dimensions differ")
        return cls(np.dstack([rgb, nir]).astype(np.uint8, copy=False))


@dataclass(frozen=True)
class LabelMask:
    """Per-pixel class annotation over {0=soil, 1=crop, 2=weed}."""

    labels: np.ndarray  # (H, W) uint8

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ImageryError(f"expected (H, W) label array, got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImageryError(f"degenerate mask dimensions {arr.shape}")
        bad = np.setdiff1d(np.unique(arr), VALID_LABELS)
        if bad.size:
            raise ImageryError(f"invalid label value {int(bad[0])}")
        object.__setattr__(self, "labels", _frozen(arr.astype(np.uint8, copy=False)))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def class_counts(self) -> dict[str, int]:
        counts = np.bincount(self.labels.ravel(), minlength=3)
        return {name: int(counts[i]) for i, name in enumerate(CLASS_NAMES)}


@dataclass(frozen=True)
class AnnotatedSample:
    """One image together with its annotation and provenance tag."""

    image: MultiSpectralImage
    mask: LabelMask
    id: str
    provenance: str = PROVENANCE_REAL

    def __post_init__(self):
        if (self.image.height, self.image.width) != (self.mask.height, self.mask.width):
            raise ImageryError(
                f"sample {self.id!r}: image {self.image.width}x{self.image.height} "
                f"and mask {self.mask.width}x{self.mask.height} dimensions differ")
        if self.provenance not in (PROVENANCE_REAL, PROVENANCE_SEMI):
            raise ImageryError(f"unknown provenance {self.provenance!r}")


@dataclass
class ManifestEntry:
    id: str
    rgb: str
    nir: str
    mask: str
    provenance: str = PROVENANCE_REAL

    def to_dict(self) -> dict:
        return {"id": self.id, "rgb": self.rgb, "nir": self.nir,
                "mask": self.mask, "provenance": self.provenance}


@dataclass
class DatasetManifest:
    """Ordered list of sample file references plus an optional count cache.

    Entry paths may be relative; they are resolved against ``root``,
    which defaults to the directory the manifest was loaded from.
    """

    name: str
    entries: list[ManifestEntry] = field(default_factory=list)
    class_counts: dict[str, int] | None = None
    root: Path | None = None

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if p.is_absolute() or self.root is None:
            return p
        return self.root / p

    def to_dict(self) -> dict:
        out = {"name": self.name, "entries": [e.to_dict() for e in self.entries]}
        if self.class_counts is not None:
            out["class_counts"] = self.class_counts
        return out

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ImageryError(f"cannot read manifest {path}: {exc}") from exc
        entries = [ManifestEntry(**e) for e in raw.get("entries", [])]
        return cls(name=raw.get("name", path.stem), entries=entries,
                   class_counts=raw.get("class_counts"), root=path.parent)


def _load_png(path: str | Path, expect_channels: int) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as img:
            arr = np.asarray(img)
    except (OSError, SyntaxError) as exc:
        raise ImageryError(f"cannot read image {path}: {exc}") from exc
    if arr.dtype != np.uint8:
        raise ImageryError(f"{path}: expected 8-bit image, got {arr.dtype}")
    got = 1 if arr.ndim == 2 else arr.shape[2]
    if got != expect_channels:
        raise ImageryError(
            f"{path}: expected {expect_channels}-channel image, got {got}")
    return arr


def load_mask(path: str | Path) -> LabelMask:
    """Load a standalone label mask PNG (grayscale, raw values {0,1,2})."""
    raw = _load_png(path, 1)
    try:
        return LabelMask(raw)
    except ImageryError as exc:
        raise ImageryError(f"{path}: {exc}") from exc


def load_sample(rgb_path: str | Path, nir_path: str | Path,
                mask_path: str | Path, sample_id: str | None = None,
                provenance: str = PROVENANCE_REAL) -> AnnotatedSample:
    """Load one annotated sample from its three PNG files.

    The RGB file must be 3-channel 8-bit, NIR and mask single-channel
    8-bit, all with identical dimensions.  Mask values outside {0, 1, 2}
    are rejected, never clamped.
    """
    rgb = _load_png(rgb_path, 3)
    nir = _load_png(nir_path, 1)
    raw_mask = _load_png(mask_path, 1)
    if rgb.shape[:2] != nir.shape:
        raise ImageryError(
            f"{nir_path}: nir dimensions {nir.shape[::-1]} differ from "
            f"rgb {rgb.shape[1::-1]} in {rgb_path}")
    if rgb.shape[:2] != raw_mask.shape:
        raise ImageryError(
            f"{mask_path}: mask dimensions {raw_mask.shape[::-1]} differ from "
            f"rgb {rgb.shape[1::-1]} in {rgb_path}")
    try:
        mask = LabelMask(raw_mask)
    except ImageryError as exc:
        raise ImageryError(f"{mask_path}: {exc}") from exc
    if sample_id is None:
        sample_id = Path(rgb_path).stem
    image = MultiSpectralImage.from_rgb_nir(rgb, nir)
    return AnnotatedSample(image=image, mask=mask, id=sample_id, provenance=provenance)


def save_sample(sample: AnnotatedSample, out_dir: str | Path) -> dict[str, Path]:
    """Write a sample as ``{rgb,nir,mask}/<id>.png`` under ``out_dir``.

    Round trip guarantee: ``load_sample`` on the written paths reproduces
    every pixel of the sample bit-exactly.
    """
    out_dir = Path(out_dir)
    paths = {}
    for kind, arr in (("rgb", sample.image.rgb), ("nir", sample.image.nir),
                      ("mask", sample.mask.labels)):
        sub = out_dir / kind
        try:
            sub.mkdir(parents=True, exist_ok=True)
            path = sub / f"{sample.id}.png"
            Image.fromarray(np.asarray(arr)).save(path, format="PNG")
        except OSError as exc:
            raise ImageryError(f"cannot write {kind} plane for {sample.id!r}: {exc}") from exc
        paths[kind] = path
    return paths


def sample_entry(sample: AnnotatedSample, out_dir: str | Path,
                 relative_to: str | Path | None = None) -> ManifestEntry:
    """Save a sample and return its manifest entry (paths relative when asked)."""
    paths = save_sample(sample, out_dir)
    if relative_to is not None:
        paths = {k: p.relative_to(relative_to) for k, p in paths.items()}
    return ManifestEntry(id=sample.id, rgb=str(paths["rgb"]), nir=str(paths["nir"]),
                         mask=str(paths["mask"]), provenance=sample.provenance)


def validate_manifest(manifest: DatasetManifest) -> list[str]:
    """Check a manifest for missing files, duplicate ids, and size mismatches.

    Problems are returned as report lines; an empty list means the
    manifest is valid.
    """
    report: list[str] = []
    seen: set[str] = set()
    for entry in manifest.entries:
        if entry.id in seen:
            report.append(f"duplicate id {entry.id!r}")
        seen.add(entry.id)
        if entry.provenance not in (PROVENANCE_REAL, PROVENANCE_SEMI):
            report.append(f"{entry.id}: unknown provenance {entry.provenance!r}")
        sizes = {}
        for kind in ("rgb", "nir", "mask"):
            path = manifest.resolve(getattr(entry, kind))
            if not path.is_file():
                report.append(f"{entry.id}: missing file {path}")
                continue
            try:
                with Image.open(path) as img:
                    sizes[kind] = img.size
            except (OSError, SyntaxError):
                report.append(f"{entry.id}: unreadable file {path}")
        if len(set(sizes.values())) > 1:
            detail = ", ".join(f"{k}={w}x{h}" for k, (w, h) in sorted(sizes.items()))
            report.append(f"{entry.id}: dimension mismatch ({detail})")
    return report


def iter_samples(manifest: DatasetManifest):
    """Yield loaded AnnotatedSamples in manifest order."""
    for entry in manifest.entries:
        yield load_sample(manifest.resolve(entry.rgb), manifest.resolve(entry.nir),
                          manifest.resolve(entry.mask), sample_id=entry.id,
                          provenance=entry.provenance)
