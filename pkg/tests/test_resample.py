import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msinpaint.raster import Image, Mask
from msinpaint.resample import (cubic_kernel, downsample_mask, downsample_nearest,
                                upsample_bicubic)

from conftest import random_image


def labelled(h, w):
    """Image whose value encodes its coordinates: 10*y + x."""
    ys, xs = np.mgrid[0:h, 0:w]
    return Image((10 * ys + xs).astype(float))


def test_factor_one_is_identity(rng):
    img = random_image(rng, 5, 7, 3)
    assert downsample_nearest(img, 1) == img
    m = Mask(rng.random((5, 7)) < 0.5)
    assert downsample_mask(m, 1) == m


@pytest.mark.parametrize("side", [4, 3])
def test_factor_two_picks_even_pixels(side):
    out = downsample_nearest(labelled(side, side), 2)
    # pixels (0,0), (2,0), (0,2), (2,2) as (x, y)
    assert out.data[:, :, 0].tolist() == [[0, 2], [20, 22]]


def index_oracle(n, f):
    return [min(i * f, n - 1) for i in range(-(-n // f))]


@given(st.integers(1, 23), st.integers(1, 23), st.integers(1, 9))
def test_downsample_matches_index_oracle(h, w, f):
    out = downsample_nearest(labelled(h, w), f)
    ys, xs = index_oracle(h, f), index_oracle(w, f)
    expected = [[10 * y + x for x in xs] for y in ys]
    assert out.data[:, :, 0].tolist() == expected


def test_downsample_introduces_no_new_values(rng):
    img = random_image(rng, 17, 13, 3)
    out = downsample_nearest(img, 3)
    assert set(out.samples.tolist()) <= set(img.samples.tolist())


def test_mask_downsampling():
    assert np.all(downsample_mask(Mask(np.ones((9, 5), bool)), 4).bits)
    bits = np.zeros((4, 4), bool)
    bits[:, 1] = True
    assert not downsample_mask(Mask(bits), 2).bits.any()


def test_bad_factor():
    with pytest.raises(ValueError):
        downsample_nearest(Image(np.zeros((2, 2))), 0)
    with pytest.raises(ValueError):
        downsample_mask(Mask.empty(2, 2), -1)


def test_kernel_is_catmull_rom():
    assert cubic_kernel(0.0) == 1.0
    assert cubic_kernel(1.0) == 0.0
    assert cubic_kernel(2.0) == 0.0
    assert cubic_kernel(0.5) == pytest.approx(0.5625)
    assert cubic_kernel(1.5) == pytest.approx(-0.0625)
    t = np.linspace(0, 1, 11)
    assert np.allclose(sum(cubic_kernel(t - k) for k in range(-1, 3)), 1.0)


def kernel_sum_oracle(v, positions):
    """Direct evaluation of sum_j k(pos - j) v[clamp(j)]."""
    out = []
    n = len(v)
    for pos in positions:
        acc = 0.0
        for j in range(int(np.floor(pos)) - 3, int(np.floor(pos)) + 4):
            acc += float(cubic_kernel(pos - j)) * v[min(max(j, 0), n - 1)]
        out.append(acc)
    return np.array(out)


def test_ramp_upsampled_two_x():
    ramp = [0.0, 10.0, 20.0, 30.0]
    out = upsample_bicubic(Image(np.array([ramp])), 8, 1).data[0, :, 0]
    positions = np.arange(8) * 0.5
    assert np.allclose(out, kernel_sum_oracle(ramp, positions), atol=1e-12)
    # interior points (all four taps inside the row) lie on the line
    interior = [2, 3]
    assert np.allclose(out[interior], [10.0, 15.0], atol=1e-9)


def test_constant_survives_any_size():
    img = Image(np.full((5, 7, 3), 77.0))
    for tw, th in [(7, 5), (13, 9), (40, 31)]:
        assert np.allclose(upsample_bicubic(img, tw, th).data, 77.0, atol=1e-9)
    assert np.allclose(upsample_bicubic(img, 28, 20, factor=4).data, 77.0, atol=1e-9)


def test_same_size_is_identity(rng):
    img = random_image(rng, 6, 9, 3)
    assert upsample_bicubic(img, 9, 6) == img


def test_shrinking_is_rejected():
    with pytest.raises(ValueError):
        upsample_bicubic(Image(np.zeros((4, 4))), 3, 4)


@settings(max_examples=30)
@given(st.integers(2, 12), st.integers(2, 12), st.integers(2, 4),
       st.floats(-3, 3), st.floats(-3, 3), st.floats(60, 120))
def test_affine_reproduced_in_interior(h, w, f, a, b, c):
    ys, xs = np.mgrid[0:h, 0:w]
    img = Image(c + a * xs + b * ys)
    out = upsample_bicubic(img, w * f, h * f, factor=f).data[:, :, 0]
    Y, X = np.mgrid[0:h * f, 0:w * f] / f
    inner = (X >= 1) & (X <= w - 2) & (Y >= 1) & (Y <= h - 2)
    assert np.allclose(out[inner], (c + a * X + b * Y)[inner], atol=1e-9)


@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 5))
def test_grid_alignment_round_trip(h, w, f):
    img = labelled(h, w)
    small = downsample_nearest(img, f)
    big = upsample_bicubic(small, w, h, factor=f)
    ys, xs = index_oracle(h, f), index_oracle(w, f)
    # sampled positions that are exact multiples of f return their own values
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            if y == i * f and x == j * f:
                assert big.data[y, x, 0] == pytest.approx(small.data[i, j, 0], abs=1e-9)


def test_output_clamped(rng):
    # alternating extremes overshoot under Catmull-Rom; results stay in range
    arr = np.tile([0.0, 255.0], 8)[None, :].repeat(4, 0)
    out = upsample_bicubic(Image(arr), 47, 11)
    assert out.data.min() >= 0 and out.data.max() <= 255
