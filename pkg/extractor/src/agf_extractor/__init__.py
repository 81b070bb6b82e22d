"""Image-set to AGF1 matrix exporter (features or class probabilities)."""

from agf_extractor.extractor import (
    BackendUnavailableError,
    ExtractorConfig,
    ExtractorError,
    InputError,
    extract,
    read_header,
    write_agf1,
)

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailableError",
    "ExtractorConfig",
    "ExtractorError",
    "InputError",
    "extract",
    "read_header",
    "write_agf1",
    "__version__",
]
