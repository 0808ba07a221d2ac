"""Raster types and binary pixmap (P5/P6) I/O.

Images hold float64 samples in [0, 255] with shape (height, width, channels);
masks hold booleans with shape (height, width) where True marks a missing
pixel.  Both wrap read-only numpy arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

PathLike = Union[str, os.PathLike]

_WHITESPACE = b" \t\n\r\v\f"


class RasterError(Exception):
    """Base class for pixmap decoding and raster validation errors."""


class PixmapNotFoundError(RasterError, FileNotFoundError):
    pass


class MalformedHeaderError(RasterError):
    pass


class DimensionError(MalformedHeaderError):
    """Header declares a zero or negative width/height."""


class MaxvalError(RasterError):
    pass


class TruncatedPayloadError(RasterError):
    pass


class UnwritablePathError(RasterError, OSError):
    pass


class DimensionMismatchError(ValueError):
    """Two rasters that must agree in shape do not."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Image:
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(f"image data must be (H, W, 1|3), got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image samples must be finite")
        if arr.size and (arr.min() < 0.0 or arr.max() > 255.0):
            raise ValueError("image samples must lie in [0, 255]")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def from_samples(cls, width: int, height: int, channels: int,
                     samples: Sequence[float]) -> "Image":
        """Build from a flat row-major, channel-interleaved sample list."""
        arr = np.asarray(samples, dtype=np.float64)
        if arr.size != width * height * channels:
            raise ValueError("samples length must equal width*height*channels")
        return cls(arr.reshape(height, width, channels))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def samples(self) -> np.ndarray:
        return self.data.reshape(-1)

    def luma(self) -> np.ndarray:
        if self.channels == 1:
            return self.data[:, :, 0]
        d = self.data
        return 0.299 * d[:, :, 0] + 0.587 * d[:, :, 1] + 0.114 * d[:, :, 2]

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.data.shape == other.data.shape and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class Mask:
    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"mask bits must be a non-empty 2-D grid, got shape {arr.shape}")
        object.__setattr__(self, "bits", _frozen(arr))

    @classmethod
    def empty(cls, width: int, height: int) -> "Mask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def n_missing(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and np.array_equal(self.bits, other.bits)


def check_pair(img: Image, mask: Mask) -> None:
    if (img.width, img.height) != (mask.width, mask.height):
        raise DimensionMismatchError(
            f"dimension mismatch: image {img.width}x{img.height}, "
            f"mask {mask.width}x{mask.height}")


@dataclass
class RunReport:
    wall_seconds: float
    scale_factors: tuple
    strategy: str
    psnr_db: Optional[float] = None
    ssim: Optional[float] = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.wall_seconds < 0:
            raise ValueError("wall_seconds must be >= 0")
        f = tuple(int(v) for v in self.scale_factors)
        if not f or f[0] != 1 or any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError(f"scale factors must start at 1 and increase: {f}")
        self.scale_factors = f

    def line(self) -> str:
        """One-line ``key=value`` summary; wall time excludes file I/O."""
        def fmt(v):
            if v is None:
                return "na"
            return "inf" if v == float("inf") else f"{v:.4f}"
        factors = ",".join(str(f) for f in self.scale_factors)
        return (f"strategy={self.strategy} factors={factors} psnr={fmt(self.psnr_db)} "
                f"ssim={fmt(self.ssim)} wall_seconds={self.wall_seconds:.4f}")


# ---------------------------------------------------------------------------
# pixmap codec

def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError as exc:
        raise PixmapNotFoundError(f"no such file: {path}") from exc
    except IsADirectoryError as exc:
        raise PixmapNotFoundError(f"not a file: {path}") from exc


def _parse_header(buf: bytes):
    """Return (magic, width, height, maxval, payload_offset)."""
    if len(buf) < 2 or buf[:2] not in (b"P5", b"P6"):
        raise MalformedHeaderError("not a binary pixmap (expected P5 or P6 magic)")
    magic = buf[:2].decode()
    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(buf):
            raise MalformedHeaderError("header ended early")
        c = buf[pos:pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            nl = buf.find(b"\n", pos)
            if nl < 0:
                raise MalformedHeaderError("unterminated header comment")
            pos = nl + 1
        else:
            start = pos
            while pos < len(buf) and buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#":
                pos += 1
            tok = buf[start:pos]
            if not tok.isdigit():
                raise MalformedHeaderError(f"bad header token {tok!r}")
            tokens.append(int(tok))
            if len(tokens) < 3 and pos >= len(buf):
                raise MalformedHeaderError("header ended early")
    if pos >= len(buf) or buf[pos:pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("maxval must be followed by one whitespace byte")
    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise DimensionError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise MaxvalError(f"unsupported maxval {maxval} (only 255)")
    return magic, width, height, maxval, pos + 1


def _decode(path: PathLike):
    buf = _read_bytes(path)
    magic, width, height, _, off = _parse_header(buf)
    channels = 1 if magic == "P5" else 3
    need = width * height * channels
    payload = buf[off:off + need]
    if len(payload) < need:
        raise TruncatedPayloadError(f"payload has {len(payload)} bytes, expected {need}")
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return magic, arr


def _encode(path: PathLike, arr: np.ndarray) -> None:
    h, w, c = arr.shape
    magic = b"P5" if c == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (w, h)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(arr, dtype=np.uint8).tobytes())
    except OSError as exc:
        raise UnwritablePathError(f"cannot write {path}: {exc}") from exc


def quantize(data: np.ndarray) -> np.ndarray:
    """Round half-up, then clamp to [0, 255], as uint8."""
    return np.clip(np.floor(np.asarray(data, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def load_image(path: PathLike) -> Image:
    _, arr = _decode(path)
    return Image(arr.astype(np.float64))


def save_image(img: Image, path: PathLike) -> None:
    _encode(path, quantize(img.data))


def load_mask(path: PathLike) -> Mask:
    magic, arr = _decode(path)
    if magic != "P5":
        raise MalformedHeaderError("mask must be a P5 graymap")
    return Mask(arr[:, :, 0] >= 128)


def save_mask(mask: Mask, path: PathLike) -> None:
    arr = np.where(mask.bits, 255, 0).astype(np.uint8)[:, :, None]
    _encode(path, arr)
