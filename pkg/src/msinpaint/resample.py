"""Nearest-neighbour downsampling and Catmull-Rom bicubic upsampling."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .raster import Image, Mask

CATMULL_ROM_A = -0.5


def _check_factor(factor: int) -> int:
    if int(factor) != factor or factor < 1:
        raise ValueError(f"downsample factor must be an integer >= 1, got {factor!r}")
    return int(factor)


def _nearest_index(n: int, factor: int) -> np.ndarray:
    # top-left anchored: output i samples input min(i*factor, n-1)
    m = -(-n // factor)
    return np.minimum(np.arange(m) * factor, n - 1)


def downsample_nearest(img: Image, factor: int) -> Image:
    factor = _check_factor(factor)
    if factor == 1:
        return img
    ys = _nearest_index(img.height, factor)
    xs = _nearest_index(img.width, factor)
    return Image(img.data[np.ix_(ys, xs)])


def downsample_mask(mask: Mask, factor: int) -> Mask:
    factor = _check_factor(factor)
    if factor == 1:
        return mask
    ys = _nearest_index(mask.height, factor)
    xs = _nearest_index(mask.width, factor)
    return Mask(mask.bits[np.ix_(ys, xs)])


def cubic_kernel(x, a: float = CATMULL_ROM_A):
    """Keys cubic convolution kernel; a = -0.5 is Catmull-Rom."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2, x3 = x * x, x * x * x
    near = (a + 2) * x3 - (a + 3) * x2 + 1
    far = a * x3 - 5 * a * x2 + 8 * a * x - 4 * a
    return np.where(x <= 1, near, np.where(x < 2, far, 0.0))


def _axis_weights(n_src: int, n_dst: int, scale: float):
    """Source taps (n_dst, 4) and weights (n_dst, 4) for one axis."""
    pos = np.arange(n_dst) * scale
    base = np.floor(pos)
    frac = pos - base
    offs = np.arange(-1, 3)
    taps = base[:, None].astype(np.int64) + offs[None, :]
    weights = cubic_kernel(frac[:, None] - offs[None, :])
    return np.clip(taps, 0, n_src - 1), weights


def _resize_axis(data: np.ndarray, axis: int, n_dst: int, scale: float) -> np.ndarray:
    taps, weights = _axis_weights(data.shape[axis], n_dst, scale)
    moved = np.moveaxis(data, axis, 0)
    out = np.zeros((n_dst,) + moved.shape[1:])
    wshape = (n_dst,) + (1,) * (moved.ndim - 1)
    for k in range(4):
        out += weights[:, k].reshape(wshape) * moved[taps[:, k]]
    return np.moveaxis(out, 0, axis)


def upsample_bicubic(img: Image, target_w: int, target_h: int,
                     factor: Optional[int] = None) -> Image:
    """Separable Catmull-Rom resize to ``target_w`` x ``target_h``.

    Destination pixel ``d`` reads source coordinate ``d * src/dst``.  Pass the
    ``factor`` used by :func:`downsample_nearest` to read ``d / factor``
    instead, so sampled grid points land exactly on their source pixels.
    Borders replicate edge samples; output is clamped to [0, 255].
    """
    if target_w < img.width or target_h < img.height:
        raise ValueError(
            f"target {target_w}x{target_h} is smaller than source {img.width}x{img.height}")
    if factor is not None:
        sx = sy = 1.0 / _check_factor(factor)
    else:
        sx = img.width / target_w
        sy = img.height / target_h
    data = img.data
    if target_w != img.width or sx != 1.0:
        data = _resize_axis(data, 1, target_w, sx)
    if target_h != img.height or sy != 1.0:
        data = _resize_axis(data, 0, target_h, sy)
    return Image(np.clip(data, 0.0, 255.0))
