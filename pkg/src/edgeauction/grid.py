"""Discretized price domain and enumeration of its k-fold product."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapacityError

# An interval end is treated as a grid point when the span is this close to
# an integer multiple of the granularity.
_MULTIPLE_TOL = 1e-12

_MAX_INDEX = 2**63 - 1


@dataclass(frozen=True)
class PriceGrid:
    """Uniform grid over [c_min, c_max] with the given point spacing.

    Points are ``c_min + t * granularity``; c_max is included exactly when
    the span is an integer multiple of the spacing (within 1e-12).
    """

    c_min: float
    c_max: float
    granularity: float

    def __post_init__(self):
        if self.granularity <= 0:
            raise ValueError(f"granularity must be positive, got {self.granularity}")
        if self.c_max < self.c_min:
            raise ValueError("c_max must be >= c_min")

    @property
    def levels(self) -> int:
        span = self.c_max - self.c_min
        ratio = span / self.granularity
        nearest = round(ratio)
        if abs(span - nearest * self.granularity) <= _MULTIPLE_TOL:
            return int(nearest) + 1
        return int(math.floor(ratio)) + 1

    def points(self) -> np.ndarray:
        """Ascending grid points as float64."""
        return self.c_min + np.arange(self.levels, dtype=np.float64) * self.granularity

    def product_count(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        return self.levels ** k


def grid_points(grid: PriceGrid) -> list[float]:
    """Grid points as plain floats."""
    return [float(p) for p in grid.points()]


def product_matrix(grid: PriceGrid, k: int) -> np.ndarray:
    """All price vectors of the k-fold product as a (count, k) array.

    Rows are in lexicographic order with the first coordinate most
    significant; deterministic argmax over rows therefore picks the
    lexicographically smallest maximizer.
    """
    count = grid.product_count(k)
    if count > _MAX_INDEX:
        raise CapacityError(
            f"price grid product has {count} vectors, beyond indexable range")
    pts = grid.points()
    if k == 1:
        return pts.reshape(-1, 1)
    mesh = np.meshgrid(*([pts] * k), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, k)


def product_slice(grid: PriceGrid, k: int, start: int, stop: int) -> np.ndarray:
    """Rows [start, stop) of the lexicographic product, for chunked scoring."""
    count = grid.product_count(k)
    if not 0 <= start <= stop <= count:
        raise ValueError(f"invalid slice [{start}, {stop}) of {count} rows")
    pts = grid.points()
    levels = grid.levels
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), k), dtype=np.float64)
    for col in range(k - 1, -1, -1):
        out[:, col] = pts[idx % levels]
        idx = idx // levels
    return out


def enumerate_product(grid: PriceGrid, k: int) -> Iterator[tuple[float, ...]]:
    """Yield every price vector of the k-fold product lexicographically."""
    if grid.product_count(k) > _MAX_INDEX:
        raise CapacityError("price grid product beyond indexable range")
    return itertools.product(grid_points(grid), repeat=k)
