"""Hexagonal aggregation for the map widget's data preview.

Pointy-top hexagons on an axial grid in projected space.  Cell size halves
with every zoom level so the preview resolves more detail as the user zooms
in; the dual color/size encoding of counts is a client concern, this module
emits counts only.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .errors import ValidationError
from .geometry import LonLat, Rectangle, unproject
from .quadtree import GeoPoint

BASE_ZOOM = 3          # zoom at which the viewport is 24 columns wide
COLUMNS_AT_BASE = 24
MAX_ZOOM = 22

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class HexGridSpec:
    """Pointy-top axial grid: an origin in projected space and a cell size."""

    origin: tuple[float, float]
    hex_size: float         # center-to-vertex distance, projected units

    def __post_init__(self):
        if not (math.isfinite(self.hex_size) and self.hex_size > 0):
            raise ValidationError(f"hex_size must be positive, got {self.hex_size}")


@dataclass(frozen=True)
class HexBin:
    center: LonLat
    count: int
    cell_id: tuple[int, int]


def hex_size_for_zoom(zoom: int, viewport: Rectangle) -> float:
    """Cell size for a zoom level: 24 columns at base zoom, halving per level.

    size = projected_viewport_width / (24 * 2**(zoom - 3)), strictly
    decreasing over the whole zoom range.
    """
    if not 0 <= zoom <= MAX_ZOOM:
        raise ValidationError(f"zoom must be in [0, {MAX_ZOOM}], got {zoom}")
    x0, _, x1, _ = viewport.projected_bounds()
    width = x1 - x0
    return width / (COLUMNS_AT_BASE * 2.0 ** (zoom - BASE_ZOOM))


def _axial_round(qf: float, rf: float) -> tuple[int, int]:
    """Cube-coordinate rounding; picks the nearest hex center."""
    xf, zf = qf, rf
    yf = -xf - zf
    rx, ry, rz = round(xf), round(yf), round(zf)
    dx, dy, dz = abs(rx - xf), abs(ry - yf), abs(rz - zf)
    if dx > dy and dx > dz:
        rx = -ry - rz
    elif dy > dz:
        ry = -rx - rz
    else:
        rz = -rx - ry
    return int(rx), int(rz)


def assign_hex(point: LonLat, grid: HexGridSpec) -> tuple[int, int]:
    """Axial (q, r) cell of the hexagon whose center is nearest the point."""
    px = math.radians(point.lon) - grid.origin[0]
    py = math.sin(math.radians(point.lat)) - grid.origin[1]
    qf = (_SQRT3 / 3.0 * px - py / 3.0) / grid.hex_size
    rf = (2.0 / 3.0 * py) / grid.hex_size
    return _axial_round(qf, rf)


def hex_center(cell: tuple[int, int], grid: HexGridSpec) -> LonLat:
    """Lon/lat of a cell's center (latitude clamped at the poles)."""
    q, r = cell
    x = grid.origin[0] + grid.hex_size * (_SQRT3 * q + _SQRT3 / 2.0 * r)
    y = grid.origin[1] + grid.hex_size * (1.5 * r)
    return unproject(x, y)


def grid_for_viewport(viewport: Rectangle, zoom: int,
                      hex_size: float | None = None) -> HexGridSpec:
    """Grid anchored at the viewport's south-west corner."""
    size = hex_size if hex_size is not None else hex_size_for_zoom(zoom, viewport)
    x0, y0, _, _ = viewport.projected_bounds()
    return HexGridSpec(origin=(x0, y0), hex_size=size)


def aggregate_hexbins(points: Iterable[GeoPoint], viewport: Rectangle, zoom: int,
                      hex_size: float | None = None) -> list[HexBin]:
    """Group in-viewport points into hex cells; empty cells are omitted.

    Counts are conserved: the sum over bins equals the number of points in
    the viewport.  Bins come back sorted by count descending, then cell id
    for determinism.
    """
    grid = grid_for_viewport(viewport, zoom, hex_size)
    counts: Counter[tuple[int, int]] = Counter()
    for p in points:
        if viewport.contains(p.position):
            counts[assign_hex(p.position, grid)] += 1
    bins = [
        HexBin(center=hex_center(cell, grid), count=n, cell_id=cell)
        for cell, n in counts.items()
    ]
    bins.sort(key=lambda b: (-b.count, b.cell_id))
    return bins
