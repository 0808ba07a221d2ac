"""Command-line front end.

    msinpaint inpaint  --image in.ppm --mask m.pgm --out restored.ppm
    msinpaint gen-mask --width 768 --height 512 --lines 5 --thickness 5 --seed 1 --out m.pgm
    msinpaint metrics  --ref truth.ppm --test restored.ppm
    msinpaint bench    --images corpus/ --out report.csv

Exit codes: 0 ok, 2 bad flags, 3 I/O failure, 4 pipeline error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import metrics
from .inpaint_core import InpaintError, InpaintParams
from .maskgen import ScratchSpec, generate_scratches
from .pipeline import PipelineConfig, run_multiscale
from .raster import (DimensionMismatchError, Image, Mask, RasterError, load_image, load_mask,
                     save_image, save_mask)
from .scalesel import Strategy

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PIPELINE = 0, 2, 3, 4

CSV_COLUMNS = ["image_id", "seed", "strategy", "n_scales", "thickness", "psnr_db", "ssim",
               "wall_seconds"]
IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".png")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# I/O helpers; PNG goes through Pillow, everything else is a pixmap

def _is_png(path) -> bool:
    return str(path).lower().endswith(".png")


def read_image(path) -> Image:
    try:
        if _is_png(path):
            from PIL import Image as PILImage
            with PILImage.open(path) as im:
                im = im.convert("L" if im.mode in ("1", "L", "I", "I;16", "F") else "RGB")
                return Image(np.asarray(im, dtype=np.float64))
        return load_image(path)
    except (RasterError, OSError) as exc:
        raise CliError(EXIT_IO, f"cannot read image {path}: {exc}") from exc


def read_mask(path) -> Mask:
    try:
        if _is_png(path):
            from PIL import Image as PILImage
            with PILImage.open(path) as im:
                return Mask(np.asarray(im.convert("L")) >= 128)
        return load_mask(path)
    except (RasterError, OSError) as exc:
        raise CliError(EXIT_IO, f"cannot read mask {path}: {exc}") from exc


def write_image(img: Image, path) -> None:
    try:
        if _is_png(path):
            from PIL import Image as PILImage
            from .raster import quantize
            arr = quantize(img.data)
            PILImage.fromarray(arr[:, :, 0] if img.channels == 1 else arr).save(path)
        else:
            save_image(img, path)
    except (RasterError, OSError) as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def write_mask(mask: Mask, path) -> None:
    try:
        if _is_png(path):
            from PIL import Image as PILImage
            PILImage.fromarray(np.where(mask.bits, 255, 0).astype(np.uint8)).save(path)
        else:
            save_mask(mask, path)
    except (RasterError, OSError) as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def fmt_value(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "na"
    if math.isinf(v):
        return "inf"
    return f"{v:.4f}"


# ---------------------------------------------------------------------------
# argument parsing

def _thickness_arg(value: str):
    if value == "auto":
        return None
    try:
        w = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {value!r}") from None
    if w < 1:
        raise argparse.ArgumentTypeError("thickness must be >= 1")
    return w


def _nonneg_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _int_list(value: str) -> List[int]:
    """'5', '3,5,9' or a range '0..4'."""
    try:
        if ".." in value:
            lo, hi = value.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {value!r}") from None


def _sweep_arg(value: str):
    if value == "auto":
        return [None]
    out = _int_list(value)
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError("scale counts must be >= 0")
    return out


def _strategies_arg(value: str) -> List[Strategy]:
    try:
        return [Strategy.parse(v.strip()) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_inpaint_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", type=Strategy.parse, default=Strategy.PYRAMID,
                   choices=list(Strategy), metavar="{pyramid,integer}")
    p.add_argument("--thickness", type=_thickness_arg, default=None, metavar="N|auto",
                   help="scratch width in pixels (default: estimated from the mask)")
    p.add_argument("--scales", type=_nonneg_int, default=None, metavar="N",
                   help="extra downscaled levels (default: floor(log2 thickness))")
    p.add_argument("--tau", type=float, default=InpaintParams.outlier_tau,
                   help="outlier rejection distance for fusion")
    p.add_argument("--edge-threshold", type=float, default=InpaintParams.edge_threshold)
    p.add_argument("--edge-window", type=int, default=InpaintParams.edge_window)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msinpaint",
                                     description="Multiscale spline inpainting of scratched images.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inpaint", help="restore one image")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reference", help="ground-truth image; adds PSNR/SSIM to the report")
    _add_inpaint_flags(p)

    p = sub.add_parser("gen-mask", help="write a synthetic scratch mask")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--lines", type=_nonneg_int, required=True)
    p.add_argument("--thickness", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--min-len", type=float, default=None,
                   help="default: a quarter of the shorter side")
    p.add_argument("--max-len", type=float, default=None,
                   help="default: three quarters of the longer side")
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="PSNR/SSIM between two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--mask", help="with --masked-only, score only masked pixels")
    p.add_argument("--masked-only", action="store_true")

    p = sub.add_parser("bench", help="scratch-mask benchmark over an image corpus")
    p.add_argument("--images", required=True, help="directory of ground-truth images")
    p.add_argument("--out", required=True, help="CSV report path")
    p.add_argument("--json", dest="json_out", help="also write the rows as JSON")
    p.add_argument("--seeds", type=_nonneg_int, default=5, help="masks per image (default 5)")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--thickness-list", type=_int_list, default=[5])
    p.add_argument("--strategies", type=_strategies_arg, default=[Strategy.PYRAMID])
    p.add_argument("--scale-sweep", type=_sweep_arg, default=[None],
                   help="extra-level counts, e.g. 0..4 or 0,2 (default: auto)")
    p.add_argument("--baseline", action="store_true",
                   help="add single-scale (0 extra levels) rows for every config")
    p.add_argument("--lines", type=_nonneg_int, default=5)
    p.add_argument("--min-len", type=float, default=None)
    p.add_argument("--max-len", type=float, default=None)
    p.add_argument("--masked-only", action="store_true",
                   help="score PSNR on masked pixels only (diagnostic)")
    p.add_argument("--no-timing", action="store_true",
                   help="write 'na' for wall_seconds so reports are byte-reproducible")
    p.add_argument("--tau", type=float, default=InpaintParams.outlier_tau)
    p.add_argument("--edge-threshold", type=float, default=InpaintParams.edge_threshold)
    p.add_argument("--edge-window", type=int, default=InpaintParams.edge_window)
    return parser


def _inpaint_params(args) -> InpaintParams:
    try:
        return InpaintParams(edge_window=args.edge_window, edge_threshold=args.edge_threshold,
                             outlier_tau=args.tau)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc


def _default_lengths(width: int, height: int, min_len, max_len):
    lo = min_len if min_len is not None else max(1.0, min(width, height) / 4)
    hi = max_len if max_len is not None else max(lo, max(width, height) * 0.75)
    return lo, hi


# ---------------------------------------------------------------------------
# commands

def cmd_inpaint(args) -> int:
    params = _inpaint_params(args)
    img = read_image(args.image)
    mask = read_mask(args.mask)
    reference = read_image(args.reference) if args.reference else None
    cfg = PipelineConfig(strategy=args.strategy, thickness=args.thickness,
                         scale_override=args.scales, inpaint=params)
    try:
        out, report = run_multiscale(img, mask, cfg, reference=reference)
    except (DimensionMismatchError, InpaintError, ValueError) as exc:
        raise CliError(EXIT_PIPELINE, str(exc)) from exc
    write_image(out, args.out)
    print(report.line())
    return EXIT_OK


def cmd_gen_mask(args) -> int:
    if args.width < 1 or args.height < 1 or args.thickness < 1:
        raise CliError(EXIT_USAGE, "width, height and thickness must be >= 1")
    lo, hi = _default_lengths(args.width, args.height, args.min_len, args.max_len)
    try:
        spec = ScratchSpec(args.lines, args.thickness, lo, hi, args.seed)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    write_mask(generate_scratches(args.width, args.height, spec), args.out)
    return EXIT_OK


def cmd_metrics(args) -> int:
    ref = read_image(args.ref)
    test = read_image(args.test)
    mask = read_mask(args.mask) if args.mask else None
    if args.masked_only and mask is None:
        raise CliError(EXIT_USAGE, "--masked-only needs --mask")
    try:
        p = metrics.psnr(ref, test, mask if args.masked_only else None)
        s = metrics.ssim(ref, test) if min(ref.width, ref.height) >= metrics.SSIM_WINDOW else None
    except (DimensionMismatchError, ValueError) as exc:
        raise CliError(EXIT_PIPELINE, str(exc)) from exc
    print(f"psnr={fmt_value(p)} ssim={fmt_value(s)}")
    return EXIT_OK


@dataclass
class BenchRow:
    image_id: str
    seed: int
    strategy: str
    n_scales: int
    thickness: int
    psnr_db: float
    ssim: Optional[float]
    wall_seconds: Optional[float]

    def csv_fields(self) -> List[str]:
        return [self.image_id, str(self.seed), self.strategy, str(self.n_scales),
                str(self.thickness), fmt_value(self.psnr_db), fmt_value(self.ssim),
                fmt_value(self.wall_seconds)]


@dataclass(frozen=True)
class _Cell:
    image_id: str
    seed: int
    thickness: int
    strategy: Strategy
    count: Optional[int]
    lines: int
    min_len: Optional[float]
    max_len: Optional[float]
    params: InpaintParams
    masked_only: bool
    timing: bool


def _run_cell(cell: _Cell, truth: Image) -> BenchRow:
    lo, hi = _default_lengths(truth.width, truth.height, cell.min_len, cell.max_len)
    mask = generate_scratches(truth.width, truth.height,
                              ScratchSpec(cell.lines, cell.thickness, lo, hi, cell.seed))
    damaged = Image(np.where(mask.bits[:, :, None], 0.0, truth.data))
    cfg = PipelineConfig(strategy=cell.strategy, thickness=cell.thickness,
                         scale_override=cell.count, inpaint=cell.params)
    if mask.n_missing == mask.bits.size:
        raise InpaintError(f"{cell.image_id}: seed {cell.seed} masks every pixel")
    out, report = run_multiscale(damaged, mask, cfg)
    score = metrics.psnr(truth, out, mask if cell.masked_only else None)
    sim = metrics.ssim(truth, out) if min(truth.width, truth.height) >= metrics.SSIM_WINDOW else None
    return BenchRow(cell.image_id, cell.seed, cell.strategy.value, len(report.scale_factors) - 1,
                    cell.thickness, score, sim, report.wall_seconds if cell.timing else None)


def _run_cell_star(args):
    return _run_cell(*args)


def thread_count() -> int:
    raw = os.environ.get("INPAINT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"INPAINT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise CliError(EXIT_USAGE, "INPAINT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def list_corpus(directory) -> List[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise CliError(EXIT_IO, f"image corpus {directory} is not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file())
    if not files:
        raise CliError(EXIT_IO, f"no .pgm/.ppm/.png images in {directory}")
    return files


def _write_reports(rows: Sequence[BenchRow], csv_path, json_path, timing: bool) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(r.csv_fields())
    try:
        Path(csv_path).write_text(buf.getvalue())
        if json_path:
            payload = [dict(zip(CSV_COLUMNS, r.csv_fields())) for r in rows]
            Path(json_path).write_text(json.dumps(payload, indent=1) + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write report: {exc}") from exc


def summarize(rows: Sequence[BenchRow]) -> List[str]:
    """Mean PSNR/SSIM/time per (strategy, thickness, n_scales), plus the gain
    over the single-scale rows of the same strategy and thickness."""
    groups = {}
    for r in rows:
        groups.setdefault((r.strategy, r.thickness, r.n_scales), []).append(r)
    lines = []
    for key in sorted(groups):
        g = groups[key]
        finite = [r.psnr_db for r in g if math.isfinite(r.psnr_db)]
        mean_psnr = float(np.mean(finite)) if finite else math.inf
        sims = [r.ssim for r in g if r.ssim is not None]
        walls = [r.wall_seconds for r in g if r.wall_seconds is not None]
        line = (f"strategy={key[0]} thickness={key[1]} n_scales={key[2]} rows={len(g)} "
                f"mean_psnr={fmt_value(mean_psnr)} "
                f"mean_ssim={fmt_value(float(np.mean(sims)) if sims else None)} "
                f"mean_wall={fmt_value(float(np.mean(walls)) if walls else None)}")
        base = groups.get((key[0], key[1], 0))
        if base is not None and key[2] > 0:
            base_finite = [r.psnr_db for r in base if math.isfinite(r.psnr_db)]
            if base_finite and finite:
                line += f" gain_vs_single_db={mean_psnr - float(np.mean(base_finite)):+.4f}"
        lines.append(line)
    return lines


def cmd_bench(args) -> int:
    params = _inpaint_params(args)
    files = list_corpus(args.images)
    workers = thread_count()
    timing = not args.no_timing

    configs = []
    for t in args.thickness_list:
        if t < 1:
            raise CliError(EXIT_USAGE, "thickness values must be >= 1")
        for s in args.strategies:
            counts = list(args.scale_sweep)
            if args.baseline and 0 not in counts:
                counts.insert(0, 0)
            for c in counts:
                configs.append((t, s, c))

    rows: List[BenchRow] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for path in files:
            try:
                truth = read_image(path)
            except CliError:
                _write_reports(rows, args.out, args.json_out, timing)
                raise
            cells = [_Cell(path.stem, args.seed_base + k, t, s, c, args.lines, args.min_len,
                           args.max_len, params, args.masked_only, timing)
                     for k in range(args.seeds) for (t, s, c) in configs]
            jobs = [(cell, truth) for cell in cells]
            try:
                if pool is None:
                    rows.extend(map(_run_cell_star, jobs))
                else:
                    rows.extend(pool.map(_run_cell_star, jobs))
            except (InpaintError, ValueError) as exc:
                _write_reports(rows, args.out, args.json_out, timing)
                raise CliError(EXIT_PIPELINE, str(exc)) from exc
    finally:
        if pool is not None:
            pool.shutdown()

    _write_reports(rows, args.out, args.json_out, timing)
    if timing:
        print("# wall times cover the pipeline only, excluding file I/O")
    for line in summarize(rows):
        print(line)
    return EXIT_OK


COMMANDS = {"inpaint": cmd_inpaint, "gen-mask": cmd_gen_mask, "metrics": cmd_metrics,
            "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"msinpaint {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
