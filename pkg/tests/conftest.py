import numpy as np
import pytest

from rotblur.corpus import disk_image, stability_corpus, textured_shape


@pytest.fixture(scope="session")
def shape_img():
    """A generic asymmetric textured shape, 129 px."""
    return textured_shape(129, 7)


@pytest.fixture(scope="session")
def shape_img2():
    return textured_shape(129, 11)


@pytest.fixture(scope="session")
def rim_img():
    """A rim-weighted stability-corpus image, 257 px."""
    return stability_corpus(1)[0]


@pytest.fixture(scope="session")
def disk():
    """Centered uniform disk, radius 40, 129 px."""
    return disk_image(129, 40.0)


@pytest.fixture(scope="session")
def midgray_img():
    """Texture riding on mid-gray, 257 px: noise clamping is negligible."""
    return 60.0 + 140.0 * (textured_shape(257, 3) / 255.0)


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    return np.max(np.abs(a - b) / np.where(scale > 0, scale, 1.0))
