"""Multiscale pipeline: plan scales, downsample, inpaint each scale, upsample
back to full size and vote."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import metrics
from .inpaint_core import InpaintError, InpaintParams, inpaint_scale
from .maskgen import estimate_width
from .raster import DimensionMismatchError, Image, Mask, RunReport, check_pair
from .resample import downsample_mask, downsample_nearest, upsample_bicubic
from .scalesel import ScalePlan, Strategy, plan_scales


@dataclass(frozen=True)
class PipelineConfig:
    strategy: Strategy = Strategy.PYRAMID
    thickness: Optional[int] = None          # None: estimate from the mask
    scale_override: Optional[int] = None     # extra levels; None uses floor(log2 w)
    weights: Optional[Tuple[float, ...]] = None
    inpaint: InpaintParams = field(default_factory=InpaintParams)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if any(v < 0 for v in w) or not any(v > 0 for v in w):
                raise ValueError("weights must be >= 0 with a positive sum")
            object.__setattr__(self, "weights", w)


def vote(candidates: Sequence[Image], mask: Mask, original: Image,
         weights: Optional[Sequence[float]] = None) -> Image:
    """Weighted average of full-size candidates on the masked pixels.

    Off-mask pixels come from ``original`` unchanged.  The average is taken
    relative to the first candidate, so identical candidates reproduce it
    exactly, and it is clamped to the candidates' range at each pixel.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    if weights is None:
        weights = [1.0] * len(candidates)
    if len(weights) != len(candidates):
        raise ValueError(f"{len(weights)} weights for {len(candidates)} candidates")
    check_pair(original, mask)
    for c in candidates:
        if c.data.shape != original.data.shape:
            raise DimensionMismatchError(
                f"candidate shape {c.data.shape} differs from original {original.data.shape}")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be >= 0 with a positive sum")
    w = w / w.sum()

    base = candidates[0].data
    acc = np.zeros_like(base)
    lo = base.copy()
    hi = base.copy()
    for wi, c in zip(w[1:], candidates[1:]):
        acc += wi * (c.data - base)
        np.minimum(lo, c.data, out=lo)
        np.maximum(hi, c.data, out=hi)
    fused = np.clip(base + acc, lo, hi)
    out = np.where(mask.bits[:, :, None], fused, original.data)
    return Image(np.clip(out, 0.0, 255.0))


def _scale_candidate(img: Image, mask: Mask, factor: int, params: InpaintParams) -> Optional[Image]:
    if factor == 1:
        return inpaint_scale(img, mask, params)
    small_mask = downsample_mask(mask, factor)
    if small_mask.n_missing == small_mask.bits.size:
        return None
    small = inpaint_scale(downsample_nearest(img, factor), small_mask, params)
    return upsample_bicubic(small, img.width, img.height, factor=factor)


def run_multiscale(img: Image, mask: Mask, cfg: Optional[PipelineConfig] = None,
                   reference: Optional[Image] = None) -> Tuple[Image, RunReport]:
    """Restore ``img`` where ``mask`` is set.

    Scales whose downsampled mask is entirely missing are skipped (with their
    weight).  PSNR/SSIM are filled in when a ground-truth ``reference`` is
    given; the wall time covers the computation only.
    """
    cfg = cfg or PipelineConfig()
    check_pair(img, mask)
    if mask.n_missing == mask.bits.size:
        raise InpaintError("mask marks every pixel missing; nothing to interpolate from")
    t0 = time.perf_counter()

    if mask.n_missing == 0:
        thickness = cfg.thickness or 1
    else:
        thickness = cfg.thickness if cfg.thickness is not None else estimate_width(mask)
    plan = plan_scales(thickness, cfg.strategy, cfg.scale_override, img.width, img.height)
    weights = cfg.weights
    if weights is not None and len(weights) != len(plan.factors):
        raise ValueError(f"{len(weights)} weights for {len(plan.factors)} scales {plan.factors}")

    candidates: List[Image] = []
    used_factors: List[int] = []
    used_weights: List[float] = []
    for i, f in enumerate(plan.factors):
        cand = _scale_candidate(img, mask, f, cfg.inpaint)
        if cand is None:
            continue
        candidates.append(cand)
        used_factors.append(f)
        used_weights.append(1.0 if weights is None else weights[i])
    if sum(used_weights) <= 0:
        used_weights = [1.0] * len(candidates)

    if len(candidates) == 1:
        out = candidates[0]
    else:
        out = vote(candidates, mask, img, used_weights)
    wall = time.perf_counter() - t0

    report = RunReport(wall_seconds=wall, scale_factors=tuple(used_factors),
                       strategy=plan.strategy.value,
                       config={"thickness": thickness, "n_scales": len(used_factors) - 1})
    if reference is not None:
        report.psnr_db = metrics.psnr(reference, out)
        if min(out.width, out.height) >= metrics.SSIM_WINDOW:
            report.ssim = metrics.ssim(reference, out)
    return out, report
