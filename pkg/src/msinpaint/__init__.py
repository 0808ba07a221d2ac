"""Multiscale spline-interpolation inpainting for scratched images."""

from .raster import Image, Mask, RunReport, load_image, load_mask, save_image, save_mask
from .scalesel import ScalePlan, Strategy, max_scales_integer, max_scales_pyramid, plan_scales
from .resample import downsample_mask, downsample_nearest, upsample_bicubic
from .inpaint_core import InpaintParams, inpaint_scale
from .maskgen import ScratchSpec, estimate_width, generate_scratches
from .metrics import mse, psnr, ssim
from .pipeline import PipelineConfig, run_multiscale, vote

__version__ = "0.1.0"
