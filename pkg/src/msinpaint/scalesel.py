"""Scale-count selection from scratch thickness."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple


class Strategy(str, Enum):
    PYRAMID = "pyramid"    # factors 1, 2, 4, 8, ...
    INTEGER = "integer"    # factors 1, 2, 3, 4, ...

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown strategy {value!r}; expected pyramid or integer") from None


MIN_COARSE_SIDE = 8


@dataclass(frozen=True)
class ScalePlan:
    strategy: Strategy
    factors: Tuple[int, ...]

    def __post_init__(self):
        f = self.factors
        if not f or f[0] != 1 or any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError(f"factors must start at 1 and strictly increase: {f}")

    @property
    def n_scales(self) -> int:
        """Downscaled levels beyond the original."""
        return len(self.factors) - 1


def _check_thickness(w: int) -> int:
    if isinstance(w, bool) or int(w) != w or w < 1:
        raise ValueError(f"thickness must be an integer >= 1, got {w!r}")
    return int(w)


def max_scales_pyramid(w: int) -> int:
    """floor(log2 w), computed exactly on integers."""
    return _check_thickness(w).bit_length() - 1


def max_scales_integer(w: int) -> int:
    return _check_thickness(w) - 1


def _factor(strategy: Strategy, level: int) -> int:
    return 2 ** level if strategy is Strategy.PYRAMID else level + 1


def plan_scales(w: int, strategy="pyramid", override_count: Optional[int] = None,
                width: Optional[int] = None, height: Optional[int] = None) -> ScalePlan:
    """Downscale factors for a scratch of thickness ``w``.

    The number of extra levels is ``override_count`` when given, otherwise
    floor(log2 w) for either strategy.  When the image size is known, levels
    whose factor would exceed min(width, height) / 8 are dropped.
    """
    w = _check_thickness(w)
    strategy = Strategy.parse(strategy)
    if override_count is None:
        n = max_scales_pyramid(w)
    else:
        if int(override_count) != override_count or override_count < 0:
            raise ValueError(f"scale count must be >= 0, got {override_count!r}")
        n = int(override_count)
    if width is not None and height is not None:
        limit = min(width, height) / MIN_COARSE_SIDE
        while n > 0 and _factor(strategy, n) > limit:
            n -= 1
    return ScalePlan(strategy, tuple(_factor(strategy, k) for k in range(n + 1)))
