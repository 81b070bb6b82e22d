"""Generator abstraction and semi-artificial scene composition.

A generator endpoint turns a binary plant footprint into an RGB+NIR
patch of the class input size (crop 512x512, weed 128x128).  The
composition pipeline extracts eligible plant instances from an annotated
sample, fetches a patch for each, scales the patch back to the instance
bounding box, and overwrites only the pixels under the instance
footprint.  The annotation is inherited unchanged, which is the whole
point: the composed image is new training data with free labels.

Endpoints:
  mock        deterministic in (footprint, class, seed); no model needed.
  directory   precomputed patch bank keyed by a 64-bit footprint hash:
              ``<key>.rgb.png`` / ``<key>.nir.png`` inside the directory.
  subprocess  external generator invoked per patch as
              ``<cmd> --mask <png> --class crop|weed --seed <u64>
              --out-rgb <png> --out-nir <png>`` (exit 0 = success).
              The mask PNG encodes the footprint as 0/255.
"""

from __future__ import annotations

import hashlib
import logging
import shlex
import shutil
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from agrisynth.imagery import (
    PROVENANCE_REAL,
    PROVENANCE_SEMI,
    AnnotatedSample,
    DatasetManifest,
    LabelMask,
    ManifestEntry,
    MultiSpectralImage,
    load_sample,
    sample_entry,
)
from agrisynth.maskops import (
    DEFAULT_MARGIN,
    InstanceMask,
    extract_class_mask,
    extract_instances,
    replacement_filter,
    resize_mask,
)

logger = logging.getLogger(__name__)

DEFAULT_PATCH_SIZES = {"crop": 512, "weed": 128}

# Mock palette: every tone >= 150 with +-8 noise, so composited pixels are
# cleanly separable from darker field imagery in tests and demos.
_MOCK_TONES = {
    "crop": ((150, 210, 150), 220),
    "weed": ((170, 190, 150), 200),
}
_MOCK_SOIL = ((155, 150, 145), 160)
_MOCK_NOISE = 8


class ComposeError(ValueError):
    """Raised for invalid composition inputs."""


class GeneratorError(RuntimeError):
    """Raised when a generator endpoint fails to produce a patch."""


def footprint_key(footprint: np.ndarray) -> str:
    """64-bit content hash of a binary footprint, as 16 hex characters."""
    arr = (np.asarray(footprint) != 0).astype(np.uint8)
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{arr.shape[0]}x{arr.shape[1]}:".encode())
    h.update(arr.tobytes(order="C"))
    return h.hexdigest()


def _stable_seed(*parts) -> int:
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class GeneratorEndpoint:
    """Where generated patches come from.

    ``seed_policy`` is either ``("hash",)`` (per-instance seed derived
    from sample id and instance index, the default) or ``("fixed", v)``
    (every patch uses seed v).
    """

    kind: str  # mock | directory | subprocess
    location: str | None = None
    patch_sizes: dict[str, int] = field(
        default_factory=lambda: dict(DEFAULT_PATCH_SIZES))
    seed_policy: tuple = ("hash",)
    timeout_s: float = 60.0

    def __post_init__(self):
        if self.kind not in ("mock", "directory", "subprocess"):
            raise ComposeError(f"unknown endpoint kind {self.kind!r}")
        if set(self.patch_sizes) != {"crop", "weed"}:
            raise ComposeError("patch_sizes must map exactly 'crop' and 'weed'")
        if any(s < 1 for s in self.patch_sizes.values()):
            raise ComposeError("patch sizes must be >= 1")
        if self.kind == "directory":
            if not self.location or not Path(self.location).is_dir():
                raise ComposeError(
                    f"directory endpoint needs an existing directory, "
                    f"got {self.location!r}")
        if self.kind == "subprocess":
            argv = shlex.split(self.location or "")
            if not argv or shutil.which(argv[0]) is None:
                raise ComposeError(
                    f"subprocess endpoint needs an executable command, "
                    f"got {self.location!r}")
        if self.seed_policy[0] not in ("hash", "fixed"):
            raise ComposeError(f"unknown seed policy {self.seed_policy!r}")
        if self.seed_policy[0] == "fixed" and len(self.seed_policy) != 2:
            raise ComposeError("fixed seed policy needs a value: ('fixed', v)")

    def instance_seed(self, base_seed: int, sample_id: str,
                      instance_index: int) -> int:
        if self.seed_policy[0] == "fixed":
            return int(self.seed_policy[1])
        return _stable_seed(base_seed, sample_id, instance_index)


@dataclass(frozen=True)
class GeneratedPatch:
    """One generated RGB+NIR patch plus the mask that conditioned it."""

    rgb: np.ndarray  # (S, S, 3) uint8
    nir: np.ndarray  # (S, S) uint8
    conditioning_mask: np.ndarray  # (S, S) uint8 in {0,1}

    def __post_init__(self):
        rgb = np.asarray(self.rgb)
        nir = np.asarray(self.nir)
        mask = np.asarray(self.conditioning_mask)
        if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
            raise ComposeError(f"patch rgb must be (S, S, 3) uint8, got "
                               f"{rgb.shape} {rgb.dtype}")
        if nir.shape != rgb.shape[:2] or nir.dtype != np.uint8:
            raise ComposeError("patch nir must match rgb dimensions as uint8")
        if mask.shape != rgb.shape[:2]:
            raise ComposeError("conditioning mask must match patch dimensions")

    @property
    def size(self) -> int:
        return self.rgb.shape[0]


def _mock_patch(footprint: np.ndarray, plant_class: str, seed: int) -> GeneratedPatch:
    size = footprint.shape[0]
    rng = np.random.default_rng(
        [seed & 0xFFFFFFFFFFFFFFFF, int(footprint_key(footprint), 16),
         0 if plant_class == "crop" else 1])
    (class_rgb, class_nir) = _MOCK_TONES[plant_class]
    (soil_rgb, soil_nir) = _MOCK_SOIL
    inside = footprint.astype(bool)
    rgb = np.empty((size, size, 3), dtype=np.float64)
    nir = np.empty((size, size), dtype=np.float64)
    for c in range(3):
        rgb[:, :, c] = np.where(inside, class_rgb[c], soil_rgb[c])
    nir[:] = np.where(inside, class_nir, soil_nir)
    noise = rng.integers(-_MOCK_NOISE, _MOCK_NOISE + 1, size=(size, size, 4))
    rgb += noise[:, :, :3]
    nir += noise[:, :, 3]
    return GeneratedPatch(
        rgb=np.clip(rgb, 0, 255).astype(np.uint8),
        nir=np.clip(nir, 0, 255).astype(np.uint8),
        conditioning_mask=footprint.astype(np.uint8))


def _directory_patch(endpoint: GeneratorEndpoint, footprint: np.ndarray,
                     size: int) -> GeneratedPatch:
    key = footprint_key(footprint)
    base = Path(endpoint.location)
    rgb_path = base / f"{key}.rgb.png"
    nir_path = base / f"{key}.nir.png"
    if not rgb_path.is_file() or not nir_path.is_file():
        raise GeneratorError(
            f"patch bank miss: no {key}.rgb.png / {key}.nir.png in {base}")
    try:
        with Image.open(rgb_path) as img:
            rgb = np.asarray(img.convert("RGB"))
        with Image.open(nir_path) as img:
            nir = np.asarray(img.convert("L"))
    except (OSError, SyntaxError) as exc:
        raise GeneratorError(f"unreadable patch files for key {key}: {exc}") from exc
    if rgb.shape[:2] != (size, size) or nir.shape != (size, size):
        raise GeneratorError(
            f"patch bank entry {key} has wrong size: rgb {rgb.shape[:2]}, "
            f"nir {nir.shape}, expected {size}x{size}")
    return GeneratedPatch(rgb=rgb.astype(np.uint8), nir=nir.astype(np.uint8),
                          conditioning_mask=footprint.astype(np.uint8))


def _subprocess_patch(endpoint: GeneratorEndpoint, footprint: np.ndarray,
                      plant_class: str, seed: int, size: int) -> GeneratedPatch:
    argv = shlex.split(endpoint.location)
    with tempfile.TemporaryDirectory(prefix="agrisynth-gen-") as tmp:
        tmp = Path(tmp)
        mask_path = tmp / "mask.png"
        rgb_path = tmp / "out_rgb.png"
        nir_path = tmp / "out_nir.png"
        Image.fromarray((footprint != 0).astype(np.uint8) * 255).save(mask_path)
        cmd = argv + ["--mask", str(mask_path), "--class", plant_class,
                      "--seed", str(seed), "--out-rgb", str(rgb_path),
                      "--out-nir", str(nir_path)]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True,
                                  timeout=endpoint.timeout_s)
        except subprocess.TimeoutExpired as exc:
            raise GeneratorError(
                f"generator timed out after {endpoint.timeout_s}s: "
                f"{' '.join(argv)}") from exc
        if proc.returncode != 0:
            detail = proc.stderr.strip() or proc.stdout.strip() or "no output"
            raise GeneratorError(
                f"generator exited {proc.returncode}: {detail}")
        if not rgb_path.is_file() or not nir_path.is_file():
            raise GeneratorError("generator exited 0 but wrote no output files")
        try:
            with Image.open(rgb_path) as img:
                rgb = np.asarray(img.convert("RGB"))
            with Image.open(nir_path) as img:
                nir = np.asarray(img.convert("L"))
        except (OSError, SyntaxError) as exc:
            raise GeneratorError(f"generator wrote malformed output: {exc}") from exc
    if rgb.shape[:2] != (size, size) or nir.shape != (size, size):
        raise GeneratorError(
            f"generator output has wrong size: rgb {rgb.shape[:2]}, "
            f"nir {nir.shape}, expected {size}x{size}")
    return GeneratedPatch(rgb=rgb.astype(np.uint8), nir=nir.astype(np.uint8),
                          conditioning_mask=footprint.astype(np.uint8))


def generate_patch(endpoint: GeneratorEndpoint, footprint: np.ndarray,
                   plant_class: str, seed: int) -> GeneratedPatch:
    """Obtain one patch for a footprint already resized to the class size."""
    if plant_class not in ("crop", "weed"):
        raise ComposeError(f"plant class must be 'crop' or 'weed', got {plant_class!r}")
    footprint = np.asarray(footprint)
    size = endpoint.patch_sizes[plant_class]
    if footprint.shape != (size, size):
        raise ComposeError(
            f"footprint must be pre-resized to {size}x{size} for class "
            f"{plant_class}, got {footprint.shape}")
    if endpoint.kind == "mock":
        return _mock_patch(footprint, plant_class, seed)
    if endpoint.kind == "directory":
        return _directory_patch(endpoint, footprint, size)
    return _subprocess_patch(endpoint, footprint, plant_class, seed, size)


def _resize_patch_to_bbox(patch: GeneratedPatch, width: int,
                          height: int) -> tuple[np.ndarray, np.ndarray]:
    # Image planes travel back through bilinear resampling (generated
    # texture is continuous-valued); masks never do.
    rgb = np.asarray(Image.fromarray(np.asarray(patch.rgb)).resize(
        (width, height), Image.BILINEAR))
    nir = np.asarray(Image.fromarray(np.asarray(patch.nir)).resize(
        (width, height), Image.BILINEAR))
    return rgb, nir


def eligible_instances(sample: AnnotatedSample, classes: tuple[str, ...],
                       margin: int = DEFAULT_MARGIN) -> list[InstanceMask]:
    """All plant instances of the selected classes, eligibility evaluated."""
    out = []
    for plant_class in classes:
        binary = extract_class_mask(sample.mask, plant_class)
        for inst in extract_instances(binary, plant_class):
            out.append(InstanceMask(
                plant_class=inst.plant_class, bbox=inst.bbox,
                footprint=inst.footprint, area=inst.area,
                eligible=replacement_filter(inst, sample.image.width,
                                            sample.image.height, margin)))
    return out


def compose_scene(sample: AnnotatedSample, endpoint: GeneratorEndpoint,
                  classes: tuple[str, ...] = ("crop", "weed"),
                  margin: int = DEFAULT_MARGIN, seed: int = 42,
                  strict: bool = True) -> AnnotatedSample:
    """Replace every eligible plant instance with a generated patch.

    Only pixels under each replaced instance's footprint change, in all
    four channels; everything else, including the mask, is bit-identical
    to the input.  Ineligible instances keep their original pixels.  On
    a generator failure the instance is skipped with a log line unless
    ``strict``, in which case the error propagates with the instance id.
    """
    for plant_class in classes:
        if plant_class not in ("crop", "weed"):
            raise ComposeError(f"unknown class {plant_class!r} in selection")
    channels = np.array(sample.image.channels)  # writable working copy
    instances = eligible_instances(sample, classes, margin)
    for index, inst in enumerate(instances):
        if not inst.eligible:
            continue
        size = endpoint.patch_sizes[inst.plant_class]
        footprint = resize_mask(inst.footprint, size, size)
        inst_seed = endpoint.instance_seed(seed, sample.id, index)
        label = f"{sample.id}/{inst.plant_class}#{index}"
        try:
            patch = generate_patch(endpoint, footprint, inst.plant_class, inst_seed)
        except GeneratorError as exc:
            if strict:
                raise GeneratorError(f"instance {label}: {exc}") from exc
            logger.warning("skipping instance %s: %s", label, exc)
            continue
        x0, y0, x1, y1 = inst.bbox
        rgb, nir = _resize_patch_to_bbox(patch, x1 - x0, y1 - y0)
        gate = inst.footprint.astype(bool)
        region = channels[y0:y1, x0:x1]
        region[:, :, :3][gate] = rgb[gate]
        region[:, :, 3][gate] = nir[gate]
    return AnnotatedSample(image=MultiSpectralImage(channels),
                           mask=LabelMask(np.asarray(sample.mask.labels)),
                           id=sample.id, provenance=PROVENANCE_SEMI)


@dataclass(frozen=True)
class MixSpec:
    """How many real and composed images a built dataset contains."""

    original_count: int
    synthetic_count: int
    synthetic_classes: tuple[str, ...] = ("crop", "weed")
    seed: int = 42

    def __post_init__(self):
        if self.original_count < 0 or self.synthetic_count < 0:
            raise ComposeError("counts must be >= 0")
        if self.original_count == 0 and self.synthetic_count == 0:
            raise ComposeError("at least one of the counts must be positive")
        bad = set(self.synthetic_classes) - {"crop", "weed"}
        if bad:
            raise ComposeError(f"unknown synthetic classes {sorted(bad)}")
        object.__setattr__(self, "synthetic_classes",
                           tuple(self.synthetic_classes))


def _load_entry(manifest: DatasetManifest, entry: ManifestEntry) -> AnnotatedSample:
    return load_sample(manifest.resolve(entry.rgb), manifest.resolve(entry.nir),
                       manifest.resolve(entry.mask), sample_id=entry.id,
                       provenance=entry.provenance)


def build_dataset(source: DatasetManifest, spec: MixSpec,
                  endpoint: GeneratorEndpoint, out_dir: str | Path,
                  margin: int = DEFAULT_MARGIN, jobs: int = 1,
                  strict: bool = True, name: str | None = None) -> DatasetManifest:
    """Assemble a mixed real/semi-artificial dataset under ``out_dir``.

    Source entries are drawn without replacement by a seeded shuffle:
    the first ``original_count`` draws are copied through as real, the
    next ``synthetic_count`` are composed.  Output entries are sorted by
    id, so the manifest is identical across runs and worker counts.
    """
    needed = spec.original_count + spec.synthetic_count
    if len(source.entries) < needed:
        raise ComposeError(
            f"source has {len(source.entries)} entries, spec needs {needed}")
    if jobs < 1:
        raise ComposeError(f"jobs must be >= 1, got {jobs}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(len(source.entries))
    original_picks = [source.entries[i] for i in perm[:spec.original_count]]
    synthetic_picks = [source.entries[i]
                       for i in perm[spec.original_count:needed]]

    def passthrough(entry: ManifestEntry) -> ManifestEntry:
        sample = _load_entry(source, entry)
        sample = AnnotatedSample(image=sample.image, mask=sample.mask,
                                 id=sample.id, provenance=PROVENANCE_REAL)
        return sample_entry(sample, out_dir, relative_to=out_dir)

    def compose_entry(entry: ManifestEntry) -> ManifestEntry:
        sample = _load_entry(source, entry)
        composed = compose_scene(sample, endpoint,
                                 classes=spec.synthetic_classes, margin=margin,
                                 seed=spec.seed, strict=strict)
        return sample_entry(composed, out_dir, relative_to=out_dir)

    if jobs == 1:
        entries = [passthrough(e) for e in original_picks]
        entries += [compose_entry(e) for e in synthetic_picks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            real_futs = [pool.submit(passthrough, e) for e in original_picks]
            synth_futs = [pool.submit(compose_entry, e) for e in synthetic_picks]
            entries = [f.result() for f in real_futs]
            entries += [f.result() for f in synth_futs]

    entries.sort(key=lambda e: e.id)
    manifest = DatasetManifest(name=name or f"{source.name}-built",
                               entries=entries, root=out_dir)
    manifest.save(out_dir / "manifest.json")
    return manifest
