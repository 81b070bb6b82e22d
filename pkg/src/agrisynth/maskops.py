"""Mask algebra and classical augmentation baselines.

Covers per-class extraction from 3-class label masks, connected-component
instance isolation, the replacement-eligibility filter used to decide
which plants may be swapped for generated ones, nearest-neighbor mask
resizing to generator input sizes, thresholding of signed mask encodings,
and the seeded classical augmentations (geometric + photometric) used as
comparison baselines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np
from scipy import ndimage

from agrisynth.imagery import (
    CROP,
    WEED,
    AnnotatedSample,
    LabelMask,
    MultiSpectralImage,
)

CLASS_LABELS = {"crop": CROP, "weed": WEED}

# 8-connectivity: plants have thin diagonal stems that 4-connectivity
# would fragment into separate components.
_EIGHT_CONNECTED = np.ones((3, 3), dtype=np.uint8)

DEFAULT_MARGIN = 5
CENTRALITY_WINDOW = 0.5


class MaskOpsError(ValueError):
    """Raised for invalid mask-operation inputs."""


def _require_plant_class(plant_class: str) -> int:
    if plant_class not in CLASS_LABELS:
        raise MaskOpsError(
            f"plant class must be 'crop' or 'weed', got {plant_class!r}")
    return CLASS_LABELS[plant_class]


@dataclass(frozen=True)
class InstanceMask:
    """One connected plant footprint within a source image.

    ``bbox`` is (x0, y0, x1, y1) in source-image pixel coordinates,
    inclusive-exclusive, and is the tight bounding box of ``footprint``.
    """

    plant_class: str
    bbox: tuple[int, int, int, int]
    footprint: np.ndarray  # (y1-y0, x1-x0) uint8 in {0,1}
    area: int
    eligible: bool = False

    def __post_init__(self):
        _require_plant_class(self.plant_class)
        fp = np.asarray(self.footprint, dtype=np.uint8)
        x0, y0, x1, y1 = self.bbox
        if fp.shape != (y1 - y0, x1 - x0):
            raise MaskOpsError(
                f"footprint shape {fp.shape} does not match bbox {self.bbox}")
        if self.area != int(fp.sum()) or self.area < 1:
            raise MaskOpsError(
                f"area {self.area} does not match footprint ({int(fp.sum())} set pixels)")
        # Tight bbox: the footprint must touch all four bbox edges.
        if not (fp[0].any() and fp[-1].any() and fp[:, 0].any() and fp[:, -1].any()):
            raise MaskOpsError("bbox is not tight around the footprint")
        fp = np.ascontiguousarray(fp)
        fp.flags.writeable = False
        object.__setattr__(self, "footprint", fp)

    @property
    def width(self) -> int:
        return self.bbox[2] - self.bbox[0]

    @property
    def height(self) -> int:
        return self.bbox[3] - self.bbox[1]


def extract_class_mask(mask: LabelMask, plant_class: str) -> np.ndarray:
    """Binary raster with 1 exactly where the mask equals the given class."""
    label = _require_plant_class(plant_class)
    return (mask.labels == label).astype(np.uint8)


def extract_instances(binary: np.ndarray, plant_class: str) -> list[InstanceMask]:
    """Split a binary raster into its 8-connected components.

    The union of the returned footprints, placed at their bboxes,
    reproduces the input; components are pairwise disjoint.
    """
    _require_plant_class(plant_class)
    binary = np.asarray(binary)
    if binary.ndim != 2:
        raise MaskOpsError(f"expected 2-D binary raster, got shape {binary.shape}")
    labeled, count = ndimage.label(binary != 0, structure=_EIGHT_CONNECTED)
    instances = []
    for idx, sl in enumerate(ndimage.find_objects(labeled), start=1):
        fp = (labeled[sl] == idx).astype(np.uint8)
        y0, y1 = sl[0].start, sl[0].stop
        x0, x1 = sl[1].start, sl[1].stop
        instances.append(InstanceMask(plant_class=plant_class,
                                      bbox=(x0, y0, x1, y1),
                                      footprint=fp, area=int(fp.sum())))
    return instances


def replacement_filter(instance: InstanceMask, image_w: int, image_h: int,
                       margin: int = DEFAULT_MARGIN) -> bool:
    """Decide whether a plant instance may be replaced by a generated one.

    Eligible iff the bbox stays clear of the border band of width
    ``margin`` (plants partly out of frame keep their original pixels)
    and the footprint centroid lies within the central 50% of the bbox
    on both axes, a proxy for the stem sitting roughly at the center.
    """
    x0, y0, x1, y1 = instance.bbox
    if x0 < 0 or y0 < 0 or x1 > image_w or y1 > image_h:
        raise MaskOpsError(
            f"bbox {instance.bbox} outside image {image_w}x{image_h}")
    if margin < 0:
        raise MaskOpsError(f"margin must be >= 0, got {margin}")
    if x0 < margin or y0 < margin or x1 > image_w - margin or y1 > image_h - margin:
        return False
    ys, xs = np.nonzero(instance.footprint)
    # Pixel-center coordinates within the bbox.
    cx = float(xs.mean()) + 0.5
    cy = float(ys.mean()) + 0.5
    w, h = instance.width, instance.height
    half = CENTRALITY_WINDOW / 2.0
    return (w * (0.5 - half) <= cx <= w * (0.5 + half)
            and h * (0.5 - half) <= cy <= h * (0.5 + half))


def filter_instances(instances: list[InstanceMask], image_w: int, image_h: int,
                     margin: int = DEFAULT_MARGIN) -> list[InstanceMask]:
    """Return the instances with their ``eligible`` flag evaluated."""
    return [InstanceMask(plant_class=i.plant_class, bbox=i.bbox,
                         footprint=i.footprint, area=i.area,
                         eligible=replacement_filter(i, image_w, image_h, margin))
            for i in instances]


def _nn_indices(out_size: int, in_size: int) -> np.ndarray:
    # Floor mapping: integer-factor upscale then downscale is the identity.
    return (np.arange(out_size) * in_size) // out_size


def resize_mask(footprint: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """Nearest-neighbor resize of a binary raster; output stays binary."""
    footprint = np.asarray(footprint)
    if footprint.ndim != 2:
        raise MaskOpsError(f"expected 2-D raster, got shape {footprint.shape}")
    if target_h < 1 or target_w < 1:
        raise MaskOpsError(f"target dimensions must be >= 1, got {target_w}x{target_h}")
    if not footprint.any():
        raise MaskOpsError("cannot resize an empty footprint")
    rows = _nn_indices(target_h, footprint.shape[0])
    cols = _nn_indices(target_w, footprint.shape[1])
    return (footprint[np.ix_(rows, cols)] != 0).astype(np.uint8)


def resize_plane(plane: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """Nearest-neighbor resize of one intensity plane (no value invention)."""
    plane = np.asarray(plane)
    if plane.ndim != 2:
        raise MaskOpsError(f"expected 2-D plane, got shape {plane.shape}")
    if target_h < 1 or target_w < 1:
        raise MaskOpsError(f"target dimensions must be >= 1, got {target_w}x{target_h}")
    rows = _nn_indices(target_h, plane.shape[0])
    cols = _nn_indices(target_w, plane.shape[1])
    return plane[np.ix_(rows, cols)]


def threshold_signed_mask(raster: np.ndarray) -> np.ndarray:
    """Threshold a signed-encoding mask at 0: >= 0 becomes 1, < 0 becomes 0."""
    raster = np.asarray(raster, dtype=np.float64)
    if np.isnan(raster).any():
        raise MaskOpsError("signed mask contains NaN")
    return (raster >= 0).astype(np.uint8)


_GEOMETRIC = ("rotate90", "flip_h", "flip_v", "shift", "zoom", "crop")
_PHOTOMETRIC = ("gaussian_blur", "median_blur", "noise", "contrast", "brightness")


@dataclass(frozen=True)
class AugmentationSpec:
    """One augmentation step, serializable as a single JSON object.

    Geometric kinds (rotate90/flip_h/flip_v/shift/zoom/crop) transform
    all four channels and the mask together; photometric kinds
    (gaussian_blur/median_blur/noise/contrast/brightness) touch the
    image only.  ``seed`` drives the stochastic kinds.
    """

    kind: str
    k: int | None = None               # rotate90: quarter turns, 1..3
    dx: int | None = None              # shift: +right
    dy: int | None = None              # shift: +down
    factor: float | None = None        # zoom: > 0, > 1 magnifies
    window: tuple[int, int, int, int] | None = None  # crop: x0, y0, w, h
    sigma: float | None = None         # gaussian_blur: > 0
    radius: int | None = None          # median_blur: >= 1
    amplitude: int | None = None       # noise: uniform in [-amplitude, amplitude]
    gain: float | None = None          # contrast: scale about mid-gray
    offset: int | None = None          # brightness: additive
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _GEOMETRIC + _PHOTOMETRIC:
            raise MaskOpsError(f"unknown augmentation kind {self.kind!r}")
        checks = {
            "rotate90": self.k in (1, 2, 3),
            "flip_h": True,
            "flip_v": True,
            "shift": self.dx is not None and self.dy is not None,
            "zoom": self.factor is not None and self.factor > 0,
            "crop": self.window is not None and len(self.window) == 4,
            "gaussian_blur": self.sigma is not None and self.sigma > 0,
            "median_blur": self.radius is not None and self.radius >= 1,
            "noise": self.amplitude is not None and self.amplitude >= 0,
            "contrast": self.gain is not None and self.gain > 0,
            "brightness": self.offset is not None,
        }
        if not checks[self.kind]:
            raise MaskOpsError(f"invalid parameters for augmentation {self.kind!r}")
        if self.window is not None:
            object.__setattr__(self, "window", tuple(int(v) for v in self.window))

    @property
    def geometric(self) -> bool:
        return self.kind in _GEOMETRIC

    def to_json(self) -> str:
        out = {"kind": self.kind}
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name not in ("kind", "seed") and val is not None:
                out[f.name] = list(val) if isinstance(val, tuple) else val
        if self.seed:
            out["seed"] = self.seed
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str) -> "AugmentationSpec":
        raw = json.loads(text)
        if not isinstance(raw, dict) or "kind" not in raw:
            raise MaskOpsError("augmentation JSON must be an object with a 'kind' key")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise MaskOpsError(f"unknown augmentation fields {sorted(unknown)}")
        if "window" in raw:
            raw["window"] = tuple(raw["window"])
        return cls(**raw)


def _zoom_grid(size: int, factor: float) -> np.ndarray:
    # Source coordinate for each output pixel center, scaled about the
    # raster center; floor() picks the nearest-neighbor source index.
    centers = (np.arange(size) + 0.5 - size / 2.0) / factor + size / 2.0
    return np.floor(centers).astype(np.int64)


def _apply_geometric(planes: np.ndarray, mask: np.ndarray,
                     spec: AugmentationSpec) -> tuple[np.ndarray, np.ndarray]:
    h, w = mask.shape
    if spec.kind == "rotate90":
        return np.rot90(planes, spec.k, axes=(0, 1)), np.rot90(mask, spec.k)
    if spec.kind == "flip_h":
        return planes[:, ::-1], mask[:, ::-1]
    if spec.kind == "flip_v":
        return planes[::-1], mask[::-1]
    if spec.kind == "shift":
        out_p = np.zeros_like(planes)
        out_m = np.zeros_like(mask)
        ys = np.arange(h) - spec.dy
        xs = np.arange(w) - spec.dx
        yok = (ys >= 0) & (ys < h)
        xok = (xs >= 0) & (xs < w)
        grid = np.ix_(yok, xok)
        src = np.ix_(ys[yok], xs[xok])
        out_p[grid] = planes[src]
        out_m[grid] = mask[src]
        return out_p, out_m
    if spec.kind == "zoom":
        if h / spec.factor < 1 or w / spec.factor < 1:
            raise MaskOpsError(
                f"zoom factor {spec.factor} leaves no visible source pixel")
        ys = _zoom_grid(h, spec.factor)
        xs = _zoom_grid(w, spec.factor)
        yok = (ys >= 0) & (ys < h)
        xok = (xs >= 0) & (xs < w)
        out_p = np.zeros_like(planes)
        out_m = np.zeros_like(mask)
        grid = np.ix_(yok, xok)
        src = np.ix_(ys[yok], xs[xok])
        out_p[grid] = planes[src]
        out_m[grid] = mask[src]
        return out_p, out_m
    if spec.kind == "crop":
        x0, y0, cw, ch = spec.window
        if cw < 1 or ch < 1 or x0 < 0 or y0 < 0 or x0 + cw > w or y0 + ch > h:
            raise MaskOpsError(
                f"crop window {spec.window} outside image {w}x{h}")
        return planes[y0:y0 + ch, x0:x0 + cw], mask[y0:y0 + ch, x0:x0 + cw]
    raise MaskOpsError(f"not a geometric kind: {spec.kind}")


def _apply_photometric(planes: np.ndarray, spec: AugmentationSpec) -> np.ndarray:
    as_f = planes.astype(np.float64)
    if spec.kind == "gaussian_blur":
        out = np.stack([ndimage.gaussian_filter(as_f[:, :, c], spec.sigma)
                        for c in range(planes.shape[2])], axis=2)
    elif spec.kind == "median_blur":
        size = 2 * spec.radius + 1
        out = np.stack([ndimage.median_filter(planes[:, :, c], size=size)
                        for c in range(planes.shape[2])], axis=2).astype(np.float64)
    elif spec.kind == "noise":
        rng = np.random.default_rng(spec.seed)
        out = as_f + rng.integers(-spec.amplitude, spec.amplitude + 1,
                                  size=planes.shape)
    elif spec.kind == "contrast":
        out = (as_f - 128.0) * spec.gain + 128.0
    elif spec.kind == "brightness":
        out = as_f + spec.offset
    else:
        raise MaskOpsError(f"not a photometric kind: {spec.kind}")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def augment(sample: AnnotatedSample, spec: AugmentationSpec) -> AnnotatedSample:
    """Apply one augmentation step to a sample.

    Geometric steps move every channel and the mask through the same
    nearest-neighbor grid; photometric steps leave the mask bit-identical.
    """
    planes = np.asarray(sample.image.channels)
    mask = np.asarray(sample.mask.labels)
    if spec.geometric:
        planes, mask = _apply_geometric(planes, mask, spec)
    else:
        planes = _apply_photometric(planes, spec)
    return AnnotatedSample(image=MultiSpectralImage(np.ascontiguousarray(planes)),
                           mask=LabelMask(np.ascontiguousarray(mask)),
                           id=sample.id, provenance=sample.provenance)
