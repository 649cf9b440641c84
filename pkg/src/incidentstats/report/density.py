from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class Bounds:
    lat_min: float = 24.0
    lat_max: float = 50.0
    lon_min: float = -125.0
    lon_max: float = -66.0

    def __post_init__(self):
        vals = (self.lat_min, self.lat_max, self.lon_min, self.lon_max)
        if not all(math.isfinite(v) for v in vals):
            raise DataError("bounds must be finite")
        if not (self.lat_max > self.lat_min and self.lon_max > self.lon_min):
            raise DataError("degenerate bounds: max must exceed min on both axes")

    def contains(self, lat, lon):
        return (self.lat_min <= lat <= self.lat_max) and (self.lon_min <= lon <= self.lon_max)


US_BOUNDS = Bounds()


@dataclass
class DensityGrid:
    bounds: Bounds
    nx: int
    ny: int
    cells: np.ndarray  # shape (ny, nx); row 0 is the southern edge
    out_of_bounds: int = 0

    @property
    def total(self) -> int:
        return int(self.cells.sum())


def _index(value, lo, hi, n):
    i = int(math.floor((value - lo) / (hi - lo) * n))
    return min(max(i, 0), n - 1)


def bin_points(points: Iterable[Tuple[float, float]], bounds: Bounds = US_BOUNDS,
               nx: int = 60, ny: int = 30) -> DensityGrid:
    """Count (lat, lon) points on an equirectangular grid.

    Cells are half-open [lo, hi) except that the maximum edge is included
    in the last cell, so a point on an interior edge lands in the
    higher-index cell.
    """
    if nx < 1 or ny < 1:
        raise DataError("grid must have at least one cell per axis")
    cells = np.zeros((ny, nx), dtype=np.int64)
    outside = 0
    for lat, lon in points:
        if not bounds.contains(lat, lon):
            outside += 1
            continue
        cells[_index(lat, bounds.lat_min, bounds.lat_max, ny),
              _index(lon, bounds.lon_min, bounds.lon_max, nx)] += 1
    return DensityGrid(bounds, nx, ny, cells, outside)


def bin_density(records, bounds: Bounds = US_BOUNDS, nx: int = 60, ny: int = 30) -> DensityGrid:
    return bin_points(((r.latitude, r.longitude) for r in records), bounds, nx, ny)
