import math

import numpy as np
import pytest

from rotblur.image import (NO_NOISE, SimilarityParams, add_gaussian_noise,
                           apply_similarity, as_image, crop_to_support,
                           load_image, noise_sigma, pad_symmetric, read_pgm,
                           resize_bilinear, rotate, support_radius, write_pgm)
from rotblur.moments import geometric_moments


def test_as_image_rejects_bad_input():
    with pytest.raises(ValueError):
        as_image(np.zeros((2, 2, 3)))
    with pytest.raises(ValueError):
        as_image(np.array([[1.0, -2.0]]))
    with pytest.raises(ValueError):
        as_image(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_image(np.zeros((0, 4)))


def test_similarity_params_validation():
    with pytest.raises(ValueError):
        SimilarityParams(phi=0.0, s=0.0)
    with pytest.raises(ValueError):
        SimilarityParams(phi=0.0, s=-1.0)


# --- PGM / PNG I/O ----------------------------------------------------------

def test_read_pgm_2x2_bytes(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = read_pgm(path)
    assert img.tolist() == [[0.0, 255.0], [128.0, 64.0]]


def test_read_pgm_handles_comments(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n# a comment\n2 1\n255\n" + bytes([7, 9]))
    assert read_pgm(path).tolist() == [[7.0, 9.0]]


def test_read_pgm_errors(tmp_path):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ValueError):
        read_pgm(bad)
    trunc = tmp_path / "trunc.pgm"
    trunc.write_bytes(b"P5\n2 2\n255\n" + bytes([1, 2]))
    with pytest.raises(ValueError):
        read_pgm(trunc)
    deep = tmp_path / "deep.pgm"
    deep.write_bytes(b"P5\n1 1\n65535\n" + bytes(2))
    with pytest.raises(ValueError):
        read_pgm(deep)


def test_pgm_round_trip(shape_img, tmp_path):
    path = tmp_path / "rt.pgm"
    write_pgm(path, shape_img)
    back = load_image(path)
    assert np.max(np.abs(back - shape_img)) <= 0.5


def test_write_pgm_clamps_and_rounds(tmp_path):
    path = tmp_path / "c.pgm"
    write_pgm(path, np.array([[0.4, 254.6, 300.0]]))
    assert read_pgm(path).tolist() == [[0.0, 255.0, 255.0]]


def test_load_png_luma(tmp_path):
    from PIL import Image

    rgb = np.zeros((1, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 255, 255)
    rgb[0, 1] = (255, 0, 0)
    path = tmp_path / "t.png"
    Image.fromarray(rgb, "RGB").save(path)
    img = load_image(path)
    assert img[0, 0] == pytest.approx(255.0)
    assert img[0, 1] == pytest.approx(76.245)


def test_load_png_gray(tmp_path):
    from PIL import Image

    gray = np.array([[0, 100], [200, 255]], dtype=np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(gray, "L").save(path)
    assert load_image(path).tolist() == gray.astype(float).tolist()


def test_load_image_unreadable(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"not an image at all")
    with pytest.raises(ValueError):
        load_image(path)


# --- resize -----------------------------------------------------------------

def test_resize_identity(shape_img):
    out = resize_bilinear(shape_img, shape_img.shape[1], shape_img.shape[0])
    assert np.array_equal(out, shape_img)


def test_resize_constant():
    out = resize_bilinear(np.full((5, 7), 100.0), 13, 3)
    assert out.shape == (3, 13)
    np.testing.assert_allclose(out, 100.0)


def test_resize_2x1_to_3x1():
    out = resize_bilinear(np.array([[0.0, 255.0]]), 3, 1)
    np.testing.assert_allclose(out, [[0.0, 127.5, 255.0]])


def test_resize_rejects_zero_dims(shape_img):
    with pytest.raises(ValueError):
        resize_bilinear(shape_img, 0, 10)


# --- similarity warping -----------------------------------------------------

def test_similarity_identity(shape_img):
    out = apply_similarity(shape_img, SimilarityParams(0.0, 1.0))
    np.testing.assert_allclose(out, shape_img)


def test_similarity_pi_twice(shape_img):
    out = rotate(rotate(shape_img, math.pi), math.pi)
    assert np.abs(out - shape_img).mean() < 1.0


def test_similarity_disk_rotation_fixed_point(disk):
    out = rotate(disk, 0.7)
    assert np.abs(out - disk).mean() < 2.0


def test_similarity_inverse_round_trip(shape_img):
    for s in (1.2, 0.8):
        fwd = apply_similarity(shape_img, SimilarityParams(math.pi / 6, s))
        back = apply_similarity(fwd, SimilarityParams(-math.pi / 6, 1.0 / s))
        assert np.abs(back - shape_img).mean() < 2.0


def test_similarity_preserves_shape(shape_img):
    out = apply_similarity(shape_img, SimilarityParams(0.3, 1.3))
    assert out.shape == shape_img.shape


# --- padding / support / cropping -------------------------------------------

def test_pad_symmetric_keeps_moments(shape_img):
    padded = pad_symmetric(shape_img, 17)
    assert padded.shape == (shape_img.shape[0] + 34, shape_img.shape[1] + 34)
    a = geometric_moments(shape_img, 3).values
    b = geometric_moments(padded, 3).values
    np.testing.assert_allclose(b, a, rtol=1e-12)
    with pytest.raises(ValueError):
        pad_symmetric(shape_img, -1)


def test_support_radius_disk(disk):
    r = support_radius(disk)
    assert 39.0 <= r <= 41.0
    assert support_radius(np.zeros((9, 9)) + 0.1) == 0.0


def test_crop_to_support_keeps_moments(shape_img):
    padded = pad_symmetric(shape_img, 40)
    cropped = crop_to_support(padded)
    assert cropped.shape[0] < padded.shape[0]
    a = geometric_moments(padded, 4).values
    b = geometric_moments(cropped, 4).values
    np.testing.assert_allclose(b, a, rtol=1e-10)


# --- noise ------------------------------------------------------------------

def test_noise_disabled_sentinel(shape_img):
    out = add_gaussian_noise(shape_img, NO_NOISE, seed=1)
    assert np.array_equal(out, shape_img)


def test_noise_rejects_nan(shape_img):
    with pytest.raises(ValueError):
        add_gaussian_noise(shape_img, math.nan, seed=1)


def test_noise_deterministic(shape_img):
    a = add_gaussian_noise(shape_img, 10.0, seed=42)
    b = add_gaussian_noise(shape_img, 10.0, seed=42)
    assert np.array_equal(a, b)
    c = add_gaussian_noise(shape_img, 10.0, seed=43)
    assert not np.array_equal(a, c)


def test_noise_sigma_constant_image():
    img = np.full((257, 257), 100.0)
    assert noise_sigma(img, 20.0) == pytest.approx(10.0)
    out = add_gaussian_noise(img, 20.0, seed=3)
    sd = np.std(out - img)
    assert abs(sd - 10.0) <= 0.5


def test_noise_empirical_snr(midgray_img):
    # Mid-gray signal: clamping is negligible, so output - input is the
    # injected noise itself.
    for snr_db in (20.0, 10.0):
        out = add_gaussian_noise(midgray_img, snr_db, seed=9)
        noise = out - midgray_img
        emp = 10.0 * math.log10(np.mean(midgray_img**2) / np.mean(noise**2))
        assert abs(emp - snr_db) <= 0.5


def test_noise_clamped_to_range(shape_img):
    out = add_gaussian_noise(shape_img, 0.0, seed=5)
    assert out.min() >= 0.0 and out.max() <= 255.0
