"""Semi-artificial multi-spectral crop/weed dataset toolkit.

Builds training datasets by replacing annotated plant instances in
RGB+NIR field imagery with generator-produced patches, and evaluates
both the generative model (six two-sample metrics) and downstream
segmentation predictions (IoU-family metrics plus paired comparison).
"""

from agrisynth.imagery import (
    AnnotatedSample,
    DatasetManifest,
    ImageryError,
    LabelMask,
    ManifestEntry,
    MultiSpectralImage,
    load_sample,
    save_sample,
    validate_manifest,
)

__all__ = [
    "AnnotatedSample",
    "DatasetManifest",
    "ImageryError",
    "LabelMask",
    "ManifestEntry",
    "MultiSpectralImage",
    "load_sample",
    "save_sample",
    "validate_manifest",
]

__version__ = "0.1.0"
