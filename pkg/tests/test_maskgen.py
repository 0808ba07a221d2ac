import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msinpaint.maskgen import (ScratchSpec, SplitMix64, estimate_width, generate_scratches,
                               rasterize_segment, scratch_segments)
from msinpaint.raster import Mask


def test_splitmix_reference_vector():
    # published SplitMix64 outputs for seed 1234567
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821]


def test_uniform_range():
    r = SplitMix64(7)
    u = [r.uniform() for _ in range(2000)]
    assert min(u) >= 0.0 and max(u) < 1.0
    assert abs(np.mean(u) - 0.5) < 0.03


def test_no_lines_no_damage():
    assert generate_scratches(40, 30, ScratchSpec(0, 5, 10, 20, 3)).n_missing == 0


def seg_distance(px, py, seg):
    x0, y0, x1, y1 = seg
    dx, dy = x1 - x0, y1 - y0
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else min(max(((px - x0) * dx + (py - y0) * dy) / L2, 0.0), 1.0)
    return math.hypot(px - (x0 + t * dx), py - (y0 + t * dy))


def brute_raster(h, w, segs, thickness):
    bits = np.zeros((h, w), bool)
    for y in range(h):
        for x in range(w):
            bits[y, x] = any(seg_distance(x, y, s) <= thickness / 2 for s in segs)
    return bits


def test_horizontal_line_thickness_three():
    bits = np.zeros((20, 40), bool)
    r = 9
    rasterize_segment(bits, (5.0, r, 30.0, r), 3)
    assert np.array_equal(bits, brute_raster(20, 40, [(5.0, r, 30.0, r)], 3))
    assert bits[r - 1:r + 2, 5:31].all()
    assert not bits[r - 2].any() and not bits[r + 2].any()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 63), st.integers(1, 7))
def test_generator_matches_brute_force(seed, thickness):
    spec = ScratchSpec(3, thickness, 4, 25, seed)
    segs = scratch_segments(30, 24, spec)
    assert np.array_equal(generate_scratches(30, 24, spec).bits,
                          brute_raster(24, 30, segs, thickness))


def test_same_seed_same_mask():
    spec = ScratchSpec(6, 5, 20, 80, 42)
    assert generate_scratches(96, 64, spec) == generate_scratches(96, 64, spec)
    other = ScratchSpec(6, 5, 20, 80, 43)
    assert generate_scratches(96, 64, spec) != generate_scratches(96, 64, other)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 63), st.integers(1, 9))
def test_missing_pixels_near_a_segment(seed, thickness):
    spec = ScratchSpec(4, thickness, 5, 40, seed)
    segs = scratch_segments(50, 40, spec)
    mask = generate_scratches(50, 40, spec)
    for y, x in zip(*np.nonzero(mask.bits)):
        assert min(seg_distance(x, y, s) for s in segs) <= thickness / 2 + 0.5


def test_segment_draws_respect_scratch_params():
    spec = ScratchSpec(50, 3, 10, 30, 9)
    for x0, y0, x1, y1 in scratch_segments(100, 60, spec):
        assert 0 <= x0 < 100 and 0 <= y0 < 60
        assert 10 - 1e-9 <= math.hypot(x1 - x0, y1 - y0) <= 30 + 1e-9
        assert y1 >= y0 - 1e-9  # angle in [0, pi)


def test_spec_validation():
    for args in [(-1, 3, 1, 2), (1, 0, 1, 2), (1, 3, 0, 2), (1, 3, 5, 2)]:
        with pytest.raises(ValueError):
            ScratchSpec(*args)


# ---------------------------------------------------------------- width

def edt_oracle(bits):
    """Largest distance from a missing pixel centre to the nearest known one."""
    ky, kx = np.nonzero(~bits)
    best = 0.0
    for y, x in zip(*np.nonzero(bits)):
        best = max(best, float(np.min(np.hypot(ky - y, kx - x))))
    return best


def test_single_pixel_width():
    bits = np.zeros((7, 7), bool)
    bits[3, 3] = True
    assert estimate_width(Mask(bits)) == 1


def test_five_wide_stripe():
    bits = np.zeros((30, 40), bool)
    bits[10:15, :] = True
    d = edt_oracle(bits)
    assert d == 3.0
    assert estimate_width(Mask(bits)) == round(2 * d - 1) == 5


def test_width_needs_damage():
    with pytest.raises(ValueError):
        estimate_width(Mask.empty(5, 5))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.floats(0, math.pi, exclude_max=True), st.floats(-3, 3),
       st.floats(-3, 3))
def test_single_line_width_within_one(t, theta, cx, cy):
    h = w = 64
    x0, y0 = w / 2 + cx, h / 2 + cy
    L = 18
    seg = (x0 - L * math.cos(theta), y0 - L * math.sin(theta),
           x0 + L * math.cos(theta), y0 + L * math.sin(theta))
    bits = np.zeros((h, w), bool)
    rasterize_segment(bits, seg, t)
    assert t - 1 <= estimate_width(Mask(bits)) <= t + 1


def test_width_matches_edt_oracle(rng):
    for _ in range(5):
        bits = generate_scratches(40, 32, ScratchSpec(3, int(rng.integers(1, 8)), 5, 30,
                                                      int(rng.integers(0, 10 ** 9)))).bits
        if not bits.any():
            continue
        d = edt_oracle(bits)
        assert estimate_width(Mask(bits)) == max(1, math.floor(2 * d - 1 + 0.5))
