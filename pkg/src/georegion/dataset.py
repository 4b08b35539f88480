"""Dataset ingestion: points CSV, admin-geography GeoJSON, and assembly.

The points file follows the common earthquake-catalog CSV layout: required
columns ``id, time, latitude, longitude, mag`` in any order, extra columns
ignored, ``time`` in ISO 8601.  Rows with missing or non-finite required
fields are skipped and counted rather than failing the load.

Each point is assigned its containing admin geography once, here, by
point-in-polygon against the registry; everything downstream reads the
stored assignment.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .coverage import AdminGeography
from .errors import (
    AllRowsInvalid,
    DuplicateGeographyName,
    EmptyDataset,
    HeaderMismatch,
    InvalidGeoJSON,
    MissingNameProperty,
)
from .geometry import LonLat, Rectangle, geometry_from_geojson, points_in_polygon
from .quadtree import GeoPoint, QuadTree, build_quadtree
from .query import DescriptorThresholds, descriptor_thresholds

REQUIRED_COLUMNS = ("id", "time", "latitude", "longitude", "mag")
UNASSIGNED = "none"


@dataclass(frozen=True)
class PointLoadResult:
    points: tuple[GeoPoint, ...]
    skipped: int


def _parse_time(value: str) -> datetime:
    dt = datetime.fromisoformat(value.strip().replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def load_points(path: str | Path,
                registry: Sequence[AdminGeography] = ()) -> PointLoadResult:
    """Parse the points CSV and resolve each point's admin geography."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"points file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        headers = [h.strip().lower() for h in (reader.fieldnames or [])]
        missing = [c for c in REQUIRED_COLUMNS if c not in headers]
        if missing:
            raise HeaderMismatch(
                f"points CSV is missing required columns: {', '.join(missing)}")
        key = {c: (reader.fieldnames or [])[headers.index(c)] for c in REQUIRED_COLUMNS}

        rows = []
        skipped = 0
        seen_ids: set[str] = set()
        for row in reader:
            try:
                pid = (row[key["id"]] or "").strip()
                lat = float(row[key["latitude"]])
                lon = float(row[key["longitude"]])
                mag = float(row[key["mag"]])
                ts = _parse_time(row[key["time"]])
                if not pid or pid in seen_ids:
                    raise ValueError("missing or duplicate id")
                if not all(math.isfinite(v) for v in (lat, lon, mag)):
                    raise ValueError("non-finite value")
                position = LonLat(lon, lat)
            except Exception:
                skipped += 1
                continue
            seen_ids.add(pid)
            rows.append((pid, position, mag, ts))

    if not rows:
        raise AllRowsInvalid(f"points CSV {path} contains no loadable rows"
                             f" ({skipped} skipped)")

    assignments = _assign_geographies([r[1] for r in rows], registry)
    points = tuple(
        GeoPoint(pid, pos, mag, ts, admin_geography=geo)
        for (pid, pos, mag, ts), geo in zip(rows, assignments)
    )
    return PointLoadResult(points=points, skipped=skipped)


def _assign_geographies(positions: Sequence[LonLat],
                        registry: Sequence[AdminGeography]) -> list[str]:
    """First containing geography in registry order; 'none' when outside all."""
    assigned = [UNASSIGNED] * len(positions)
    if not registry or not positions:
        return assigned
    lons = np.array([p.lon for p in positions])
    lats = np.array([p.lat for p in positions])
    unresolved = np.ones(len(positions), dtype=bool)
    for geo in registry:
        if not unresolved.any():
            break
        candidates = np.flatnonzero(unresolved)
        inside = points_in_polygon(lons[candidates], lats[candidates], geo.shape)
        for i in candidates[inside]:
            assigned[i] = geo.name
            unresolved[i] = False
    return assigned


def load_admin(path: str | Path) -> list[AdminGeography]:
    """Parse a GeoJSON FeatureCollection of named Polygon/MultiPolygon features."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"admin geography file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidGeoJSON(f"admin file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("type") != "FeatureCollection":
        raise InvalidGeoJSON("admin file must be a GeoJSON FeatureCollection")
    features = raw.get("features")
    if not isinstance(features, list) or not features:
        raise InvalidGeoJSON("admin FeatureCollection has no features")

    registry: list[AdminGeography] = []
    seen: set[str] = set()
    for feature in features:
        if not isinstance(feature, dict) or feature.get("type") != "Feature":
            raise InvalidGeoJSON("admin entries must be GeoJSON Features")
        props = feature.get("properties") or {}
        name = props.get("name")
        if not isinstance(name, str) or not name.strip():
            raise MissingNameProperty(
                "every admin feature needs a string 'name' property")
        name = name.strip()
        if name.lower() in seen:
            raise DuplicateGeographyName(f"duplicate geography name {name!r}")
        seen.add(name.lower())
        shape = geometry_from_geojson(feature.get("geometry") or {})
        registry.append(AdminGeography(name=name, shape=shape))
    return registry


@dataclass(frozen=True)
class Dataset:
    """Everything the service needs, loaded once and immutable thereafter."""

    points: tuple[GeoPoint, ...]
    index: QuadTree
    registry: tuple[AdminGeography, ...]
    thresholds: DescriptorThresholds
    bounds: Rectangle
    skipped_rows: int

    @property
    def geography_names(self) -> list[str]:
        return [g.name for g in self.registry]


def build_dataset(points_path: str | Path, admin_path: str | Path) -> Dataset:
    """Load both files, assign geographies, fill counts, and build the index."""
    registry = load_admin(admin_path)
    result = load_points(points_path, registry)
    counts: dict[str, int] = {}
    for p in result.points:
        counts[p.admin_geography] = counts.get(p.admin_geography, 0) + 1
    registry = [g.with_total_points(counts.get(g.name, 0)) for g in registry]

    index = build_quadtree(result.points)
    if index.count == 0:
        raise EmptyDataset("no points loaded")
    west, south, east, north = index.bounds()
    pad = 1e-6      # keep the box non-degenerate for single-point datasets
    bounds = Rectangle(west, south, max(east, west + pad), max(north, south + pad))
    return Dataset(
        points=result.points,
        index=index,
        registry=tuple(registry),
        thresholds=descriptor_thresholds(result.points),
        bounds=bounds,
        skipped_rows=result.skipped,
    )
