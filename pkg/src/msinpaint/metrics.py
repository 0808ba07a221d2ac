"""PSNR and SSIM on 0-255 images."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .raster import DimensionMismatchError, Image, Mask

PEAK = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
C1 = (0.01 * PEAK) ** 2
C2 = (0.03 * PEAK) ** 2


def _check_shapes(a: Image, b: Image) -> None:
    if a.data.shape != b.data.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.data.shape} vs {b.data.shape}")


def mse(a: Image, b: Image, mask: Optional[Mask] = None) -> float:
    """Mean squared error over every sample (all channels jointly).

    With ``mask`` only the masked pixels count.
    """
    _check_shapes(a, b)
    diff = a.data - b.data
    if mask is not None:
        if mask.bits.shape != a.data.shape[:2]:
            raise DimensionMismatchError("mask does not match images")
        diff = diff[mask.bits]
        if diff.size == 0:
            return 0.0
    return float(np.mean(diff * diff))


def psnr_from_mse(err: float) -> float:
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / err)


def psnr(a: Image, b: Image, mask: Optional[Mask] = None) -> float:
    """Peak signal-to-noise ratio in dB; identical inputs give ``inf``."""
    return psnr_from_mse(mse(a, b, mask))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    k = g.size
    x = sliding_window_view(x, k, axis=0) @ g
    return sliding_window_view(x, k, axis=1) @ g


def ssim(a: Image, b: Image) -> float:
    """Mean single-scale SSIM over all full 11x11 Gaussian windows (sigma 1.5).

    Colour images are compared on their luma.
    """
    _check_shapes(a, b)
    if min(a.width, a.height) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images at least {SSIM_WINDOW}x{SSIM_WINDOW}")
    x = a.luma()
    y = b.luma()
    g = gaussian_window()
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mu_x * mu_x
    syy = _filter_valid(y * y, g) - mu_y * mu_y
    sxy = _filter_valid(x * y, g) - mu_x * mu_y
    num = (2 * mu_x * mu_y + C1) * (2 * sxy + C2)
    den = (mu_x * mu_x + mu_y * mu_y + C1) * (sxx + syy + C2)
    return float(np.mean(num / den))
