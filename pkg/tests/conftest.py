"""Shared fixtures and small builders for the test suite."""

import numpy as np
import pytest

from agrisynth.imagery import AnnotatedSample, LabelMask, MultiSpectralImage


def make_image(rng, h, w, high=256):
    """Random 4-channel image with intensities in [0, high)."""
    return MultiSpectralImage(rng.integers(0, high, (h, w, 4), dtype=np.uint8))


def make_mask(rng, h, w):
    """Random 3-class label mask."""
    return LabelMask(rng.integers(0, 3, (h, w), dtype=np.uint8))


def make_sample(rng, h=32, w=32, sample_id="s0", high=256):
    return AnnotatedSample(image=make_image(rng, h, w, high),
                           mask=make_mask(rng, h, w), id=sample_id)


def blob_sample(h, w, blobs, sample_id="s0", fill=100):
    """Sample with rectangular plant blobs on a uniform background.

    blobs: list of (label, y0, x0, bh, bw) rectangles painted in order.
    Image channels are the constant ``fill`` so composition diffs are
    unambiguous.
    """
    labels = np.zeros((h, w), dtype=np.uint8)
    for label, y0, x0, bh, bw in blobs:
        labels[y0:y0 + bh, x0:x0 + bw] = label
    image = MultiSpectralImage(np.full((h, w, 4), fill, dtype=np.uint8))
    return AnnotatedSample(image=image, mask=LabelMask(labels), id=sample_id)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
