"""Single-scale adaptive inpainting.

Every missing pixel is predicted by 1-D Lagrange interpolation along four
rays (horizontal, vertical, 45 and 135 degrees) through the nearest known
pixels, up to two on each side, so the polynomial degree follows the number
of samples found.  A horizontal/vertical edge test on the surrounding window
picks the ray to trust; away from edges, predictions far from the median are
dropped and the rest averaged.

The per-pixel functions (``collect_ray_samples``, ``spline_predict``,
``detect_edge``, ``fuse``) are the reference definitions.  ``inpaint_scale``
runs the same arithmetic vectorised over all missing pixels at once.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .raster import DimensionMismatchError, Image, Mask, check_pair

SIDE_BUDGET = 2
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class Direction(Enum):
    HORIZONTAL = (1, 0)
    VERTICAL = (0, 1)
    DIAG45 = (1, -1)
    DIAG135 = (1, 1)

    @property
    def step(self) -> Tuple[int, int]:
        return self.value


DIRECTIONS = tuple(Direction)


class EdgeLabel(Enum):
    NONE = "none"
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    BOTH = "both"


_EDGE_CODE = {EdgeLabel.NONE: 0, EdgeLabel.HORIZONTAL: 1, EdgeLabel.VERTICAL: 2, EdgeLabel.BOTH: 3}


@dataclass(frozen=True)
class RaySamples:
    offsets: Tuple[int, ...] = ()
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.offsets) != len(self.values):
            raise ValueError("offsets and values differ in length")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])) or 0 in self.offsets:
            raise ValueError("offsets must be nonzero and strictly increasing")
        if sum(o < 0 for o in self.offsets) > SIDE_BUDGET or sum(o > 0 for o in self.offsets) > SIDE_BUDGET:
            raise ValueError("at most two samples per side")

    def __len__(self):
        return len(self.offsets)


@dataclass(frozen=True)
class DirectionalPrediction:
    value: float
    valid: bool
    n_samples: int


@dataclass(frozen=True)
class InpaintParams:
    """Tuning knobs.  ``None`` for max_reach/max_passes derives them from the
    stroke width of the mask being filled (2w + 2 and max(w, 10))."""
    max_reach: Optional[int] = None
    edge_window: int = 5
    edge_threshold: float = 40.0
    outlier_tau: float = 25.0
    max_passes: Optional[int] = None

    def __post_init__(self):
        if self.edge_window < 3 or self.edge_window % 2 == 0:
            raise ValueError("edge_window must be odd and >= 3")
        if self.edge_threshold <= 0 or self.outlier_tau <= 0:
            raise ValueError("thresholds must be positive")
        if self.max_reach is not None and self.max_reach < 1:
            raise ValueError("max_reach must be >= 1")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")

    def resolved(self, mask: Mask) -> "InpaintParams":
        if self.max_reach is not None and self.max_passes is not None:
            return self
        from .maskgen import estimate_width
        w = estimate_width(mask) if mask.n_missing else 1
        reach = self.max_reach
        if reach is None:
            reach = min(2 * w + 2, max(mask.width, mask.height))
        passes = self.max_passes if self.max_passes is not None else max(w, 10)
        return replace(self, max_reach=reach, max_passes=passes)


class UnresolvablePixel(Exception):
    """No direction produced a usable prediction."""


class InpaintError(ValueError):
    pass


# ---------------------------------------------------------------------------
# reference per-pixel operations

def _plane(img: Union[Image, np.ndarray], channel: int) -> np.ndarray:
    if isinstance(img, Image):
        return img.data[:, :, channel]
    arr = np.asarray(img, dtype=np.float64)
    return arr[:, :, channel] if arr.ndim == 3 else arr


def collect_ray_samples(img, known: np.ndarray, p: Tuple[int, int], direction: Direction,
                        max_reach: int, channel: int = 0) -> RaySamples:
    """Walk from ``p = (x, y)`` both ways along ``direction``, keeping the
    first two known pixels on each side within ``max_reach`` steps."""
    plane = _plane(img, channel)
    known = np.asarray(known, dtype=bool)
    h, w = known.shape
    dx, dy = direction.step
    x0, y0 = p
    found = []
    for sign in (-1, 1):
        side = []
        for k in range(1, max_reach + 1):
            x, y = x0 + sign * k * dx, y0 + sign * k * dy
            if not (0 <= x < w and 0 <= y < h):
                break
            if known[y, x]:
                side.append((sign * k, float(plane[y, x])))
                if len(side) == SIDE_BUDGET:
                    break
        found.extend(side)
    found.sort()
    return RaySamples(tuple(o for o, _ in found), tuple(v for _, v in found))


def _lagrange_at_zero(xs: Sequence[float], vs: Sequence[float]) -> float:
    # weights sum to one, so interpolate deviations from the first sample;
    # flat rays then reproduce their value exactly
    base = vs[0]
    total = 0.0
    for i, (xi, vi) in enumerate(zip(xs, vs)):
        weight = 1.0
        for j, xj in enumerate(xs):
            if j != i:
                weight *= (0.0 - xj) / (xi - xj)
        total += weight * (vi - base)
    return base + total


def spline_predict(samples: RaySamples) -> DirectionalPrediction:
    """Interpolate the ray samples at offset 0 with a polynomial of degree
    len(samples) - 1; one-sided (extrapolated) results are clamped to the
    sample range."""
    n = len(samples)
    if n == 0:
        return DirectionalPrediction(0.0, False, 0)
    value = _lagrange_at_zero(samples.offsets, samples.values)
    if samples.offsets[0] > 0 or samples.offsets[-1] < 0:
        value = min(max(value, min(samples.values)), max(samples.values))
    return DirectionalPrediction(min(max(value, 0.0), 255.0), True, n)


def _window_gradient(lum: np.ndarray, known: np.ndarray, x0: int, y0: int,
                     half: int, axis: int) -> float:
    h, w = known.shape
    total, count = 0.0, 0
    # pair (x, y)-(x+1, y) for axis 1, (x, y)-(x, y+1) for axis 0
    ry = range(-half, half) if axis == 0 else range(-half, half + 1)
    rx = range(-half, half) if axis == 1 else range(-half, half + 1)
    for dy in ry:
        for dx in rx:
            x, y = x0 + dx, y0 + dy
            x2, y2 = (x + 1, y) if axis == 1 else (x, y + 1)
            if 0 <= x and 0 <= y and x2 < w and y2 < h and known[y, x] and known[y2, x2]:
                total += abs(lum[y2, x2] - lum[y, x])
                count += 1
    return total / count if count >= 2 else 0.0


def _classify(gx, gy, threshold):
    if gx > threshold and gy > threshold:
        return EdgeLabel.BOTH
    if gy > threshold:
        return EdgeLabel.HORIZONTAL
    if gx > threshold:
        return EdgeLabel.VERTICAL
    return EdgeLabel.NONE


def detect_edge(img, known: np.ndarray, p: Tuple[int, int], params: InpaintParams) -> EdgeLabel:
    """Label the window around ``p``: a strong vertical gradient means the
    edge runs horizontally, and vice versa."""
    lum = img.luma() if isinstance(img, Image) else _plane(img, 0)
    known = np.asarray(known, dtype=bool)
    half = params.edge_window // 2
    gx = _window_gradient(lum, known, p[0], p[1], half, axis=1)
    gy = _window_gradient(lum, known, p[0], p[1], half, axis=0)
    return _classify(gx, gy, params.edge_threshold)


def _median(vals):
    s = sorted(vals)
    k = len(s)
    return (s[(k - 1) // 2] + s[k // 2]) / 2


def fuse(preds: Sequence[DirectionalPrediction], edge: EdgeLabel, tau: float) -> float:
    """Combine the four directional predictions (ordered H, V, D45, D135)."""
    h, v = preds[0], preds[1]
    if edge is EdgeLabel.HORIZONTAL and h.valid:
        return h.value
    if edge is EdgeLabel.VERTICAL and v.valid:
        return v.value
    if edge is EdgeLabel.BOTH and (h.valid or v.valid):
        if h.valid and v.valid:
            return (h.value + v.value) / 2
        return h.value if h.valid else v.value
    vals = [p.value for p in preds if p.valid]
    if not vals:
        raise UnresolvablePixel("no valid directional prediction")
    med = _median(vals)
    keep = [x for x in vals if abs(x - med) <= tau] or vals
    base = keep[0]
    total = 0.0
    for x in keep:
        total += x - base
    return base + total / len(keep)


# ---------------------------------------------------------------------------
# vectorised engine

@lru_cache(maxsize=64)
def _ray_lines(direction: Direction, h: int, w: int):
    """Flat pixel indices of every line along ``direction``, left-aligned and
    padded with -1, plus each pixel's (line, position)."""
    ys, xs = np.mgrid[0:h, 0:w]
    if direction is Direction.HORIZONTAL:
        key, order = ys, xs
    elif direction is Direction.VERTICAL:
        key, order = xs, ys
    elif direction is Direction.DIAG135:
        key, order = xs - ys, xs
    else:
        key, order = xs + ys, xs
    key = key.ravel()
    order = order.ravel()
    flat = np.arange(h * w)
    sort = np.lexsort((order, key))
    key_sorted = key[sort]
    uniq, starts, counts = np.unique(key_sorted, return_index=True, return_counts=True)
    line_of_sorted = np.repeat(np.arange(len(uniq)), counts)
    pos_sorted = np.arange(h * w) - np.repeat(starts, counts)
    lines = np.full((len(uniq), counts.max()), -1, dtype=np.int64)
    lines[line_of_sorted, pos_sorted] = flat[sort]
    line_of = np.empty(h * w, dtype=np.int64)
    pos_of = np.empty(h * w, dtype=np.int64)
    line_of[flat[sort]] = line_of_sorted
    pos_of[flat[sort]] = pos_sorted
    for a in (lines, line_of, pos_of):
        a.flags.writeable = False
    return lines, line_of, pos_of


def _neighbours(known_flat: np.ndarray, direction: Direction, h: int, w: int,
                targets: np.ndarray, reach: int):
    """Offsets (m, 4) of the two nearest known pixels on each side of each
    target along ``direction`` (0 where absent) and their flat indices."""
    lines, line_of, pos_of = _ray_lines(direction, h, w)
    n_lines, length = lines.shape
    kext = np.append(known_flat, False)
    k = kext[np.where(lines < 0, known_flat.size, lines)]
    pos = np.arange(length)

    prev_incl = np.maximum.accumulate(np.where(k, pos, -1), axis=1)
    next_incl = np.minimum.accumulate(np.where(k, pos, length)[:, ::-1], axis=1)[:, ::-1]

    li = line_of[targets]
    pi = pos_of[targets]
    prev1 = np.where(pi > 0, prev_incl[li, np.maximum(pi - 1, 0)], -1)
    prev2 = np.where(prev1 > 0, prev_incl[li, np.maximum(prev1 - 1, 0)], -1)
    next1 = np.where(pi < length - 1, next_incl[li, np.minimum(pi + 1, length - 1)], length)
    next2 = np.where(next1 < length - 1, next_incl[li, np.minimum(next1 + 1, length - 1)], length)

    cols = np.stack([prev2, prev1, next1, next2], axis=1)
    offs = cols - pi[:, None]
    present = (cols >= 0) & (cols < length) & (np.abs(offs) <= reach)
    safe_cols = np.clip(cols, 0, length - 1)
    src = lines[li[:, None], safe_cols]
    present &= src >= 0
    return np.where(present, offs, 0), np.where(present, src, 0), present


def _predict_batch(offs: np.ndarray, vals: np.ndarray, present: np.ndarray):
    """Vectorised ``spline_predict``: offs/present (m, 4), vals (m, 4, C)."""
    x = offs.astype(np.float64)
    m, _, c = vals.shape
    base = vals[:, 0, :]
    total = np.zeros((m, c))
    for i in range(4):
        weight = np.ones(m)
        for j in range(4):
            if j == i:
                continue
            denom = np.where(present[:, j], x[:, i] - x[:, j], 1.0)
            denom = np.where(denom == 0, 1.0, denom)
            factor = np.where(present[:, j], (0.0 - x[:, j]) / denom, 1.0)
            weight = weight * factor
        total = total + np.where(present[:, i], weight, 0.0)[:, None] * (vals[:, i, :] - base)
    total = base + total
    n = present.sum(axis=1)
    one_sided = (n > 0) & ~(present[:, :2].any(axis=1) & present[:, 2:].any(axis=1))
    big = np.where(present[:, :, None], vals, np.inf).min(axis=1)
    small = np.where(present[:, :, None], vals, -np.inf).max(axis=1)
    clamped = np.minimum(np.maximum(total, big), small)
    total = np.where(one_sided[:, None], clamped, total)
    return np.clip(total, 0.0, 255.0), n > 0


def _edge_maps(lum: np.ndarray, known: np.ndarray, half: int, threshold: float) -> np.ndarray:
    """Edge code per pixel (see ``_EDGE_CODE``), summed in the same order as
    ``_window_gradient``."""
    h, w = lum.shape

    def grad(axis):
        if axis == 1:
            diff = np.abs(lum[:, 1:] - lum[:, :-1])
            ok = known[:, 1:] & known[:, :-1]
            ry, rx = range(-half, half + 1), range(-half, half)
        else:
            diff = np.abs(lum[1:, :] - lum[:-1, :])
            ok = known[1:, :] & known[:-1, :]
            ry, rx = range(-half, half), range(-half, half + 1)
        # pair (y, x) sits at [y + half, x + half]; every shifted view is (h, w)
        dpad = np.pad(np.where(ok, diff, 0.0), half)
        opad = np.pad(ok.astype(np.int64), half)
        total = np.zeros((h, w))
        count = np.zeros((h, w), dtype=np.int64)
        for dy in ry:
            for dx in rx:
                ys = slice(half + dy, half + dy + h)
                xs = slice(half + dx, half + dx + w)
                total = total + dpad[ys, xs]
                count = count + opad[ys, xs]
        return np.where(count >= 2, total / np.maximum(count, 1), 0.0)

    gx = grad(1)
    gy = grad(0)
    codes = np.zeros((h, w), dtype=np.int8)
    codes[(gy > threshold) & ~(gx > threshold)] = 1
    codes[(gx > threshold) & ~(gy > threshold)] = 2
    codes[(gx > threshold) & (gy > threshold)] = 3
    return codes


def _luma(data: np.ndarray) -> np.ndarray:
    if data.shape[2] == 1:
        return data[:, :, 0]
    r, g, b = LUMA_WEIGHTS
    return r * data[:, :, 0] + g * data[:, :, 1] + b * data[:, :, 2]


def _fuse_batch(pred: np.ndarray, valid: np.ndarray, codes: np.ndarray, tau: float):
    """Vectorised ``fuse``: pred (m, 4, C), valid (m, 4), codes (m,)."""
    m, _, c = pred.shape
    out = np.full((m, c), np.nan)
    vmat = np.broadcast_to(valid[:, :, None], pred.shape)

    # median/outlier rule, sequential sum to match the reference
    sortable = np.where(vmat, pred, np.inf)
    s = np.sort(sortable, axis=1)
    k = valid.sum(axis=1)
    lo = np.clip((k - 1) // 2, 0, 3)
    hi = np.clip(k // 2, 0, 3)
    med = (np.take_along_axis(s, lo[:, None, None].repeat(c, 2), 1)[:, 0, :]
           + np.take_along_axis(s, hi[:, None, None].repeat(c, 2), 1)[:, 0, :]) / 2
    keep = vmat & (np.abs(pred - med[:, None, :]) <= tau)
    none_kept = ~keep.any(axis=1)
    keep = np.where(none_kept[:, None, :], vmat, keep)
    # first surviving prediction anchors the sum, as in ``fuse``
    first = np.argmax(keep, axis=1)
    base = np.take_along_axis(pred, first[:, None, :], 1)[:, 0, :]
    total = np.zeros((m, c))
    cnt = np.zeros((m, c))
    for i in range(4):
        total = total + np.where(keep[:, i, :], pred[:, i, :] - base, 0.0)
        cnt = cnt + keep[:, i, :]
    generic = np.where(cnt > 0, base + total / np.maximum(cnt, 1), np.nan)
    out[:] = generic

    hv, vv = valid[:, 0], valid[:, 1]
    both = (codes == 3) & (hv | vv)
    mean_hv = np.where((hv & vv)[:, None], (pred[:, 0, :] + pred[:, 1, :]) / 2,
                       np.where(hv[:, None], pred[:, 0, :], pred[:, 1, :]))
    out = np.where(both[:, None], mean_hv, out)
    out = np.where(((codes == 2) & vv)[:, None], pred[:, 1, :], out)
    out = np.where(((codes == 1) & hv)[:, None], pred[:, 0, :], out)
    return out, valid.any(axis=1)


def _predict_pass(data: np.ndarray, known: np.ndarray, targets: np.ndarray,
                  params: InpaintParams, lum: np.ndarray):
    h, w, c = data.shape
    flat = data.reshape(-1, c)
    known_flat = known.ravel()
    m = targets.size
    pred = np.zeros((m, 4, c))
    valid = np.zeros((m, 4), dtype=bool)
    for d, direction in enumerate(DIRECTIONS):
        offs, src, present = _neighbours(known_flat, direction, h, w, targets, params.max_reach)
        vals = flat[src]
        # sort by offset so sample order matches the reference
        key = np.where(present, offs, 10 ** 9)
        order = np.argsort(key, axis=1, kind="stable")
        offs = np.take_along_axis(offs, order, 1)
        present = np.take_along_axis(present, order, 1)
        vals = np.take_along_axis(vals, order[:, :, None].repeat(c, 2), 1)
        pred[:, d, :], valid[:, d] = _predict_batch(offs, vals, present)
    codes = _edge_maps(lum, known, params.edge_window // 2, params.edge_threshold).ravel()[targets]
    return _fuse_batch(pred, valid, codes, params.outlier_tau)


def inpaint_scale(img: Image, mask: Mask, params: Optional[InpaintParams] = None) -> Image:
    """Fill every masked pixel of ``img``; known pixels are copied verbatim.

    Pass 1 predicts all missing pixels from the originally known ones only.
    Pixels with no usable ray are deferred to later passes, which may also
    read pixels filled earlier.  Anything left after ``max_passes`` takes the
    per-channel mean of the known pixels.
    """
    check_pair(img, mask)
    if mask.n_missing == 0:
        return img
    if mask.n_missing == mask.bits.size:
        raise InpaintError("mask marks every pixel missing; nothing to interpolate from")
    params = (params or InpaintParams()).resolved(mask)

    h, w, c = img.data.shape
    data = np.array(img.data)
    known = ~mask.bits
    original_known = known.copy()
    pending = np.flatnonzero(mask.bits)

    for _ in range(params.max_passes):
        lum = _luma(data)
        values, ok = _predict_pass(data, known, pending, params, lum)
        if not ok.any():
            break
        done = pending[ok]
        data.reshape(-1, c)[done] = values[ok]
        known.ravel()[done] = True
        pending = pending[~ok]
        if pending.size == 0:
            break

    if pending.size:
        fill = img.data[original_known].mean(axis=0)
        data.reshape(-1, c)[pending] = fill
    data[original_known] = img.data[original_known]
    return Image(np.clip(data, 0.0, 255.0))
