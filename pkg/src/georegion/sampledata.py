"""Deterministic synthetic fixtures: a states GeoJSON and an event CSV.

The geography is a jittered 8x6 partition of the continental-US extent with
real state names, exact shared borders (neighbouring cells walk identical
vertex sequences), and one MultiPolygon state.  The CSV mimics the usual
earthquake-catalog column layout, with event density skewed to the west.

These fixtures drive desk-scale tests and the demo CLI; the service loads
any files with the same schemas.
"""
from __future__ import annotations

import csv
import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .geometry import Rectangle

DOMAIN = Rectangle(west=-124.0, south=25.0, east=-68.0, north=49.0)
GRID_COLS = 8
GRID_ROWS = 6
SUBDIV = 10          # fine segments per cell edge
JITTER_DEG = 0.22    # boundary jitter amplitude, degrees

# west-to-east, south-to-north; loosely geographic
STATE_LAYOUT = [
    ["California", "Arizona", "New Mexico", "Texas",
     "Louisiana", "Mississippi", "Alabama", "Florida"],
    ["Nevada", "Utah", "Colorado", "Oklahoma",
     "Arkansas", "Tennessee", "Georgia", "South Carolina"],
    ["Oregon", "Idaho", "Kansas", "Missouri",
     "Kentucky", "Virginia", "North Carolina", "Maryland"],
    ["Washington", "Wyoming", "Nebraska", "Iowa",
     "Illinois", "Ohio", "West Virginia", "Delaware"],
    ["Montana", "South Dakota", "Minnesota", "Wisconsin",
     "Indiana", "Pennsylvania", "New Jersey", "Connecticut"],
    ["North Dakota", "Michigan", "New York", "Vermont",
     "New Hampshire", "Massachusetts", "Rhode Island", "Maine"],
]
MULTIPART_STATE = "Florida"     # emitted as a two-part MultiPolygon


def state_names() -> list[str]:
    return [name for row in STATE_LAYOUT for name in row]


def state_cell_bounds(name: str) -> Rectangle:
    """Unjittered lon/lat cell of a state (handy for drawing selections)."""
    for r, row in enumerate(STATE_LAYOUT):
        for c, candidate in enumerate(row):
            if candidate == name:
                dlon = (DOMAIN.east - DOMAIN.west) / GRID_COLS
                dlat = (DOMAIN.north - DOMAIN.south) / GRID_ROWS
                return Rectangle(
                    DOMAIN.west + c * dlon, DOMAIN.south + r * dlat,
                    DOMAIN.west + (c + 1) * dlon, DOMAIN.south + (r + 1) * dlat)
    raise KeyError(f"unknown state {name!r}")


def _grid_nodes(seed: int) -> np.ndarray:
    """Fine lattice of jittered (lon, lat) nodes; the domain border stays straight."""
    rng = np.random.default_rng(seed)
    nx = GRID_COLS * SUBDIV + 1
    ny = GRID_ROWS * SUBDIV + 1
    lons = np.linspace(DOMAIN.west, DOMAIN.east, nx)
    lats = np.linspace(DOMAIN.south, DOMAIN.north, ny)
    nodes = np.empty((nx, ny, 2))
    jx = rng.uniform(-JITTER_DEG, JITTER_DEG, size=(nx, ny))
    jy = rng.uniform(-JITTER_DEG, JITTER_DEG, size=(nx, ny))
    jx[0, :] = jx[-1, :] = 0.0
    jy[:, 0] = jy[:, -1] = 0.0
    nodes[:, :, 0] = lons[:, None] + jx
    nodes[:, :, 1] = lats[None, :] + jy
    return nodes


def _ring(nodes: np.ndarray, i_lo: int, i_hi: int, j_lo: int, j_hi: int) -> list[list[float]]:
    """Counter-clockwise perimeter walk over the fine lattice."""
    ring = []
    for i in range(i_lo, i_hi):
        ring.append(nodes[i, j_lo])
    for j in range(j_lo, j_hi):
        ring.append(nodes[i_hi, j])
    for i in range(i_hi, i_lo, -1):
        ring.append(nodes[i, j_hi])
    for j in range(j_hi, j_lo, -1):
        ring.append(nodes[i_lo, j])
    coords = [[round(float(x), 6), round(float(y), 6)] for x, y in ring]
    coords.append(coords[0])
    return coords


def generate_states_geojson(seed: int = 0) -> dict:
    """FeatureCollection of named states partitioning the domain exactly."""
    nodes = _grid_nodes(seed)
    features = []
    for r, row in enumerate(STATE_LAYOUT):
        for c, name in enumerate(row):
            i_lo, i_hi = c * SUBDIV, (c + 1) * SUBDIV
            j_lo, j_hi = r * SUBDIV, (r + 1) * SUBDIV
            if name == MULTIPART_STATE:
                mid = i_lo + SUBDIV // 2
                geometry = {
                    "type": "MultiPolygon",
                    "coordinates": [
                        [_ring(nodes, i_lo, mid, j_lo, j_hi)],
                        [_ring(nodes, mid, i_hi, j_lo, j_hi)],
                    ],
                }
            else:
                geometry = {
                    "type": "Polygon",
                    "coordinates": [_ring(nodes, i_lo, i_hi, j_lo, j_hi)],
                }
            features.append({
                "type": "Feature",
                "properties": {"name": name},
                "geometry": geometry,
            })
    return {"type": "FeatureCollection", "features": features}


def write_states_geojson(path: str | Path, seed: int = 0) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(generate_states_geojson(seed)))
    return path


CSV_COLUMNS = ["time", "latitude", "longitude", "depth", "mag", "magType",
               "nst", "gap", "dmin", "rms", "net", "id", "updated", "place", "type"]


def generate_points_rows(n: int = 10_000, seed: int = 0) -> list[dict]:
    """Catalog-style rows; density skewed toward the western seismic band."""
    rng = np.random.default_rng(seed)
    start = datetime(2013, 1, 1, tzinfo=timezone.utc)
    span = timedelta(days=540)
    rows = []
    for i in range(n):
        mode = rng.random()
        if mode < 0.55:         # western band
            lon = rng.uniform(DOMAIN.west + 0.2, DOMAIN.west + 12.0)
            lat = rng.uniform(DOMAIN.south + 0.2, DOMAIN.north - 0.2)
        elif mode < 0.65:       # diagonal "fault"
            t = rng.random()
            lon = DOMAIN.west + 3.0 + t * 18.0 + rng.normal(0, 0.8)
            lat = DOMAIN.south + 5.0 + t * 12.0 + rng.normal(0, 0.8)
        else:                   # background
            lon = rng.uniform(DOMAIN.west + 0.2, DOMAIN.east - 0.2)
            lat = rng.uniform(DOMAIN.south + 0.2, DOMAIN.north - 0.2)
        lon = float(np.clip(lon, DOMAIN.west + 0.05, DOMAIN.east - 0.05))
        lat = float(np.clip(lat, DOMAIN.south + 0.05, DOMAIN.north - 0.05))
        mag = float(np.clip(rng.exponential(1.3) + 0.3, 0.3, 7.9))
        when = start + timedelta(seconds=float(rng.uniform(0, span.total_seconds())))
        rows.append({
            "time": when.strftime("%Y-%m-%dT%H:%M:%S.") + f"{when.microsecond // 1000:03d}Z",
            "latitude": f"{lat:.5f}",
            "longitude": f"{lon:.5f}",
            "depth": f"{rng.uniform(0.5, 40.0):.2f}",
            "mag": f"{mag:.2f}",
            "magType": "ml",
            "nst": str(int(rng.integers(4, 60))),
            "gap": f"{rng.uniform(30, 270):.1f}",
            "dmin": f"{rng.uniform(0.01, 2.0):.3f}",
            "rms": f"{rng.uniform(0.05, 1.2):.2f}",
            "net": "us",
            "id": f"ev{seed:02d}{i:07d}",
            "updated": when.strftime("%Y-%m-%dT%H:%M:%S.") + f"{when.microsecond // 1000:03d}Z",
            "place": "synthetic locality",
            "type": "earthquake",
        })
    return rows


def write_points_csv(path: str | Path, n: int = 10_000, seed: int = 0) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(generate_points_rows(n, seed))
    return path
