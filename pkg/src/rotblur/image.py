"""Grayscale image representation, I/O, and geometric operations.

Images are 2D float64 numpy arrays in row-major order with intensities in
the nominal range [0, 255].  The continuous image center sits at pixel
coordinate ((width-1)/2, (height-1)/2); all centered coordinates used by
the moment and warping code are relative to that point, with x pointing
right (increasing column) and y pointing up (decreasing row).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

#: Sentinel for add_gaussian_noise meaning "no noise".
NO_NOISE = math.inf


@dataclass(frozen=True)
class SimilarityParams:
    """Planar rotation by ``phi`` (radians) plus isotropic scaling by ``s``."""

    phi: float
    s: float

    def __post_init__(self):
        if not (self.s > 0):
            raise ValueError(f"scale must be positive, got {self.s}")


def as_image(data) -> np.ndarray:
    """Validate and return a 2D float64 image array."""
    img = np.asarray(data, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)) or np.any(img < 0):
        raise ValueError("image intensities must be finite and non-negative")
    return img


def image_center(img: np.ndarray) -> tuple[float, float]:
    """(cx, cy) of the continuous image center in pixel coordinates."""
    h, w = img.shape
    return (w - 1) / 2.0, (h - 1) / 2.0


def centered_coords(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """1D centered coordinate axes (x over columns, y over rows, y up)."""
    h, w = shape
    x = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    y = (h - 1) / 2.0 - np.arange(h, dtype=np.float64)
    return x, y


def load_image(path) -> np.ndarray:
    """Load an 8-bit grayscale PGM (P5) or an 8-bit gray / 24-bit RGB PNG.

    Color input is converted with the ITU-R 601 luma
    0.299 R + 0.587 G + 0.114 B (kept in float, not re-quantized).
    """
    path = str(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    return _load_png(path)


def _load_png(path: str) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            if im.mode == "P":
                im = im.convert("RGB")
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode == "RGB":
                rgb = np.asarray(im, dtype=np.float64)
                r, g, b = LUMA_WEIGHTS
                arr = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
            else:
                raise ValueError(f"unsupported image mode {im.mode!r} in {path}")
    except UnidentifiedImageError as exc:
        raise ValueError(f"unreadable image file: {path}") from exc
    return as_image(arr)


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) 8-bit PGM file."""
    with open(str(path), "rb") as fh:
        data = fh.read()

    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"truncated PGM header in {path}")
        return data[start:pos]

    if next_token() != b"P5":
        raise ValueError(f"not a binary PGM (P5) file: {path}")
    width = int(next_token())
    height = int(next_token())
    maxval = int(next_token())
    if width <= 0 or height <= 0:
        raise ValueError(f"zero-sized PGM image: {path}")
    if not (0 < maxval < 256):
        raise ValueError(f"unsupported PGM bit depth (maxval={maxval}) in {path}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ValueError(f"truncated PGM raster in {path}")
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return arr.astype(np.float64)


def write_pgm(path, img: np.ndarray) -> None:
    """Write a binary (P5) PGM, rounding and clamping intensities to [0, 255]."""
    img = as_image(img)
    h, w = img.shape
    quantized = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    with open(str(path), "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(quantized.tobytes())


def resize_bilinear(img: np.ndarray, new_width: int, new_height: int) -> np.ndarray:
    """Resize with bilinear interpolation (corner-aligned sampling)."""
    img = as_image(img)
    if new_width <= 0 or new_height <= 0:
        raise ValueError("target dimensions must be positive")
    h, w = img.shape
    if (new_height, new_width) == (h, w):
        return img.copy()
    # With a single target sample along an axis, sample the source midpoint.
    if new_width > 1:
        cols = np.arange(new_width) * ((w - 1) / (new_width - 1))
    else:
        cols = np.full(1, (w - 1) / 2.0)
    if new_height > 1:
        rows = np.arange(new_height) * ((h - 1) / (new_height - 1))
    else:
        rows = np.full(1, (h - 1) / 2.0)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(img, [rr, cc], order=1, mode="nearest")


def sample_bilinear(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Bilinear sample at fractional (row, col) positions; outside is 0."""
    return ndimage.map_coordinates(img, [rows, cols], order=1, mode="constant", cval=0.0)


def apply_similarity(img: np.ndarray, params: SimilarityParams) -> np.ndarray:
    """Rotate by ``phi`` and scale by ``s`` about the image center.

    In polar form the output is g(r, theta) = f(r/s, theta - phi).  Output
    dimensions equal input dimensions; samples falling outside the input
    domain are 0.
    """
    img = as_image(img)
    h, w = img.shape
    cx, cy = image_center(img)
    cos_p, sin_p = math.cos(params.phi), math.sin(params.phi)
    x, y = centered_coords(img.shape)
    xg, yg = np.meshgrid(x, y)
    # Inverse map: rotate by -phi, scale by 1/s.
    xs = (xg * cos_p + yg * sin_p) / params.s
    ys = (-xg * sin_p + yg * cos_p) / params.s
    return sample_bilinear(img, cy - ys, cx + xs)


def rotate(img: np.ndarray, phi: float) -> np.ndarray:
    """Rotate counterclockwise by ``phi`` radians about the image center."""
    return apply_similarity(img, SimilarityParams(phi=phi, s=1.0))


def pad_symmetric(img: np.ndarray, margin: int) -> np.ndarray:
    """Zero-pad equally on all sides, keeping content fixed relative to center."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if margin == 0:
        return as_image(img).copy()
    return np.pad(as_image(img), margin, mode="constant")


def support_radius(img: np.ndarray, threshold: float = 0.5) -> float:
    """Largest centered radius of any pixel with intensity above ``threshold``."""
    img = as_image(img)
    x, y = centered_coords(img.shape)
    xg, yg = np.meshgrid(x, y)
    mask = img > threshold
    if not mask.any():
        return 0.0
    return float(np.sqrt(xg[mask] ** 2 + yg[mask] ** 2).max())


def crop_to_support(img: np.ndarray, margin: float = 2.0) -> np.ndarray:
    """Trim empty borders, keeping the frame centered on the image center.

    Crops to the smallest centered frame whose half-extent covers the
    content support plus ``margin`` pixels.  All moments about the image
    center are unchanged because only zero-intensity pixels are removed.
    """
    img = as_image(img)
    half = support_radius(img) + margin
    ky = max(int(math.floor((img.shape[0] - 1) / 2.0 - half)), 0)
    kx = max(int(math.floor((img.shape[1] - 1) / 2.0 - half)), 0)
    return img[ky:img.shape[0] - ky, kx:img.shape[1] - kx].copy()


def noise_sigma(img: np.ndarray, snr_db: float) -> float:
    """Noise standard deviation for a target SNR in dB.

    Signal power is the mean squared intensity over the whole image.
    """
    power = float(np.mean(np.square(img)))
    return math.sqrt(power / (10.0 ** (snr_db / 10.0)))


def add_gaussian_noise(img: np.ndarray, snr_db: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise at the requested SNR.

    The result is clamped to [0, 255].  ``snr_db`` of +inf disables noise.
    Deterministic for a given seed.
    """
    img = as_image(img)
    if snr_db == math.inf:
        return img.copy()
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_sigma(img, snr_db), size=img.shape)
    return np.clip(img + noise, 0.0, 255.0)
