"""Synthetic scratch masks and stroke-width estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from .raster import Mask

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood constants).

    Used instead of numpy's generators so masks are reproducible from the
    seed alone, in any language.
    """

    GOLDEN = 0x9E3779B97F4A7C15
    MIX1 = 0xBF58476D1CE4E5B9
    MIX2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class ScratchSpec:
    n_lines: int
    thickness: int
    min_len: float
    max_len: float
    seed: int = 0

    def __post_init__(self):
        if self.n_lines < 0:
            raise ValueError("n_lines must be >= 0")
        if self.thickness < 1:
            raise ValueError("thickness must be >= 1")
        if not 1 <= self.min_len <= self.max_len:
            raise ValueError("need 1 <= min_len <= max_len")


Segment = Tuple[float, float, float, float]


def scratch_segments(width: int, height: int, spec: ScratchSpec) -> list:
    """Endpoints (x0, y0, x1, y1) of each scratch, drawn in a fixed order:
    start x, start y, angle in [0, pi), length."""
    rng = SplitMix64(spec.seed)
    segs = []
    for _ in range(spec.n_lines):
        x0 = rng.uniform() * width
        y0 = rng.uniform() * height
        theta = rng.uniform() * math.pi
        length = spec.min_len + rng.uniform() * (spec.max_len - spec.min_len)
        segs.append((x0, y0, x0 + length * math.cos(theta), y0 + length * math.sin(theta)))
    return segs


def rasterize_segment(bits: np.ndarray, seg: Segment, thickness: float) -> None:
    """Set (in place) every pixel whose centre lies within thickness/2 of the
    segment.  Pixel (x, y) has its centre at integer coordinates."""
    h, w = bits.shape
    x0, y0, x1, y1 = seg
    r = thickness / 2.0
    xa = max(int(math.floor(min(x0, x1) - r)), 0)
    xb = min(int(math.ceil(max(x0, x1) + r)), w - 1)
    ya = max(int(math.floor(min(y0, y1) - r)), 0)
    yb = min(int(math.ceil(max(y0, y1) + r)), h - 1)
    if xa > xb or ya > yb:
        return
    ys, xs = np.mgrid[ya:yb + 1, xa:xb + 1].astype(np.float64)
    dx, dy = x1 - x0, y1 - y0
    len2 = dx * dx + dy * dy
    if len2 > 0:
        t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / len2, 0.0, 1.0)
    else:
        t = np.zeros_like(xs)
    d2 = (xs - (x0 + t * dx)) ** 2 + (ys - (y0 + t * dy)) ** 2
    bits[ya:yb + 1, xa:xb + 1] |= d2 <= r * r


def generate_scratches(width: int, height: int, spec: ScratchSpec) -> Mask:
    if width < 1 or height < 1:
        raise ValueError("mask dimensions must be >= 1")
    bits = np.zeros((height, width), dtype=bool)
    for seg in scratch_segments(width, height, spec):
        rasterize_segment(bits, seg, spec.thickness)
    return Mask(bits)


def estimate_width(mask: Mask) -> int:
    """Stroke width as twice the largest inscribed radius of the missing
    region: round(2 * (d_max - 1/2)), where d_max is the largest Euclidean
    distance from a missing pixel centre to a known pixel centre."""
    if mask.n_missing == 0:
        raise ValueError("mask has no missing pixels")
    if mask.n_missing == mask.bits.size:
        return max(mask.width, mask.height)
    d_max = float(ndimage.distance_transform_edt(mask.bits).max())
    return max(1, int(math.floor(2.0 * d_max - 1.0 + 0.5)))
