"""Shared test oracles, deliberately independent of the library's internals.

Membership here is a winding-number implementation (the library uses even-odd
ray casting); Monte-Carlo areas use matplotlib's C point-in-path test.  Both
stay valid no matter how the library code evolves.
"""
from __future__ import annotations

import math

import numpy as np
from matplotlib.path import Path

from georegion.geometry import LonLat, Polygon, unproject


def project(lon: float, lat: float) -> tuple[float, float]:
    return math.radians(lon), math.sin(math.radians(lat))


def winding_number(px: float, py: float, ring_xy: list[tuple[float, float]]) -> int:
    """Sunday's winding number; nonzero means inside (projected coords)."""
    wn = 0
    n = len(ring_xy)
    for i in range(n):
        x1, y1 = ring_xy[i]
        x2, y2 = ring_xy[(i + 1) % n]
        is_left = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
        if y1 <= py:
            if y2 > py and is_left > 0:
                wn += 1
        else:
            if y2 <= py and is_left < 0:
                wn -= 1
    return wn


def winding_contains(p: LonLat, poly: Polygon) -> bool:
    """Independent membership oracle (boundary behavior unspecified)."""
    px, py = project(p.lon, p.lat)
    rings = [[tuple(v) for v in poly.exterior_xy]]
    rings += [[tuple(v) for v in h] for h in poly.holes_xy]
    parity = 0
    for ring in rings:
        if winding_number(px, py, ring) != 0:
            parity ^= 1
    return bool(parity)


def random_simple_polygon(rng: np.random.Generator, center=(0.0, 0.0),
                          radius: float = 0.3, n_min: int = 5, n_max: int = 14) -> Polygon:
    """Star-shaped (hence simple, often concave) polygon in projected space."""
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n))
    # keep angular gaps from degenerating into near-duplicate vertices
    radii = rng.uniform(0.35 * radius, radius, size=n)
    cx, cy = center
    verts = []
    for a, r in zip(angles, radii):
        x = cx + r * math.cos(a)
        y = cy + r * math.sin(a)
        verts.append(unproject(x, np.clip(y, -0.95, 0.95)))
    return Polygon(verts)


def mpl_contains(poly: Polygon, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Point membership via matplotlib's C implementation (projected coords)."""
    inside = Path(poly.exterior_xy).contains_points(np.column_stack([xs, ys]))
    for hole in poly.holes_xy:
        inside &= ~Path(hole).contains_points(np.column_stack([xs, ys]))
    return inside


def mc_intersection_area(a: Polygon, b: Polygon, n_samples: int,
                         rng: np.random.Generator) -> tuple[float, float]:
    """Monte-Carlo estimate of area(a & b) and its 1-sigma binomial error."""
    ax0, ay0, ax1, ay1 = a.bounds_xy
    bx0, by0, bx1, by1 = b.bounds_xy
    x0, y0 = min(ax0, bx0), min(ay0, by0)
    x1, y1 = max(ax1, bx1), max(ay1, by1)
    box_area = (x1 - x0) * (y1 - y0)
    xs = rng.uniform(x0, x1, size=n_samples)
    ys = rng.uniform(y0, y1, size=n_samples)
    hits = mpl_contains(a, xs, ys) & mpl_contains(b, xs, ys)
    p = hits.mean()
    estimate = p * box_area
    sigma = box_area * math.sqrt(max(p * (1.0 - p), 1.0 / n_samples) / n_samples)
    return estimate, sigma
