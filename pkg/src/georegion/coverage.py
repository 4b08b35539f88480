"""Selection coverage scoring: which admin geographies does a drawn region imply?

For every geography touched by the selection we compute the fraction of its
area the selection overlaps and the fraction of its data points the selection
captures, blend them into a confidence score (area weighted 0.65, points
0.35 by default), drop scores under the threshold (default 0.2), and sort
descending.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import EmptyRegistry, ValidationError
from .geometry import (
    AnyPolygon,
    Polygon,
    Rectangle,
    geometry_from_geojson,
    geometry_to_geojson,
    polygon_area,
    polygon_intersection_area,
    rectangle_to_polygon,
    validate_freehand,
)
from .quadtree import QuadTree

DEFAULT_WEIGHT_AREA = 0.65
DEFAULT_WEIGHT_POINTS = 0.35
DEFAULT_THRESHOLD = 0.2

RECTANGLE = "rectangle"
FREEHAND = "freehand"


@dataclass(frozen=True)
class AdminGeography:
    """A named administrative polygon with its precomputed size and point count."""

    name: str
    shape: AnyPolygon
    total_area: Optional[float] = None    # equal-area units; derived from shape if omitted
    total_points: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValidationError("geography name must be non-empty")
        if self.total_area is None:
            object.__setattr__(self, "total_area", polygon_area(self.shape))
        if not self.total_area > 0:
            raise ValidationError(f"geography {self.name!r} must have positive area")
        if self.total_points < 0:
            raise ValidationError(f"geography {self.name!r} has negative point count")

    def with_total_points(self, n: int) -> "AdminGeography":
        return AdminGeography(self.name, self.shape, self.total_area, n)


@dataclass(frozen=True)
class CoverageConfig:
    """Score weights and retention threshold; weights must sum to 1."""

    weight_area: float = DEFAULT_WEIGHT_AREA
    weight_points: float = DEFAULT_WEIGHT_POINTS
    threshold: float = DEFAULT_THRESHOLD
    # "per-geography" divides a geography's selected points by its own total;
    # "dataset" divides by the whole dataset's point count instead.
    points_denominator: str = "per-geography"

    def __post_init__(self):
        for name, v in (("weight_area", self.weight_area),
                        ("weight_points", self.weight_points),
                        ("threshold", self.threshold)):
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must be in [0, 1], got {v}")
        if abs(self.weight_area + self.weight_points - 1.0) > 1e-9:
            raise ValidationError(
                f"weights must sum to 1, got {self.weight_area} + {self.weight_points}")
        if self.points_denominator not in ("per-geography", "dataset"):
            raise ValidationError(
                f"points_denominator must be 'per-geography' or 'dataset', "
                f"got {self.points_denominator!r}")


@dataclass(frozen=True)
class SelectionGeometry:
    """A user selection: rectangle-drag or freehand draw, as a normalized polygon."""

    kind: str
    shape: Polygon

    def __post_init__(self):
        if self.kind not in (RECTANGLE, FREEHAND):
            raise ValidationError(f"selection kind must be rectangle|freehand, got {self.kind!r}")

    @classmethod
    def from_rectangle(cls, r: Rectangle) -> "SelectionGeometry":
        return cls(RECTANGLE, rectangle_to_polygon(r))

    @classmethod
    def from_freehand(cls, path) -> "SelectionGeometry":
        return cls(FREEHAND, validate_freehand(list(path)))

    @classmethod
    def from_geojson(cls, geometry: dict, kind: str = FREEHAND) -> "SelectionGeometry":
        shape = geometry_from_geojson(geometry)
        if not isinstance(shape, Polygon):
            raise ValidationError("selection must be a single Polygon")
        if kind == FREEHAND:
            shape.validate_simple()
        return cls(kind, shape)

    def to_geojson(self) -> dict:
        return geometry_to_geojson(self.shape)


@dataclass(frozen=True)
class CoverageEntry:
    geography: str
    p_area: float
    p_points: float
    score: float
    selected_point_ids: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class CoverageResult:
    entries: tuple[CoverageEntry, ...]
    config: CoverageConfig
    selection: SelectionGeometry

    def entry_names(self) -> list[str]:
        return [e.geography for e in self.entries]


def confidence_score(p_area: float, p_points: float,
                     cfg: CoverageConfig = CoverageConfig()) -> float:
    """Weighted blend of area and point proportions, in [0, 1]."""
    for name, v in (("p_area", p_area), ("p_points", p_points)):
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise ValidationError(f"{name} must be in [0, 1], got {v}")
    return cfg.weight_area * p_area + cfg.weight_points * p_points


def compute_coverage(selection: SelectionGeometry, index: QuadTree,
                     registry: Sequence[AdminGeography],
                     cfg: CoverageConfig = CoverageConfig()) -> CoverageResult:
    """Score every geography the selection plausibly covers.

    Geographies whose bounding box misses the selection are skipped (they
    provably score zero on both proportions).  A geography with no data
    points contributes only area evidence.
    """
    if not registry:
        raise EmptyRegistry("no admin geographies loaded")
    shape = selection.shape

    selected_ids = index.query_polygon(shape)
    per_geo_counts: Counter[str] = Counter()
    per_geo_ids: dict[str, set[str]] = {}
    for pid in selected_ids:
        geo = index.point_by_id(pid).admin_geography
        per_geo_counts[geo] += 1
        per_geo_ids.setdefault(geo, set()).add(pid)

    sel_box = shape.bounds_xy
    entries = []
    for geo in registry:
        gbox = geo.shape.bounds_xy
        if gbox[2] < sel_box[0] or sel_box[2] < gbox[0] \
                or gbox[3] < sel_box[1] or sel_box[3] < gbox[1]:
            continue
        overlap = polygon_intersection_area(geo.shape, shape)
        p_area = float(min(overlap / geo.total_area, 1.0))
        selected_here = per_geo_counts.get(geo.name, 0)
        if cfg.points_denominator == "dataset":
            denom = index.count
        else:
            denom = geo.total_points
        p_points = min(selected_here / denom, 1.0) if denom > 0 else 0.0
        score = confidence_score(p_area, p_points, cfg)
        if score >= cfg.threshold:
            entries.append(CoverageEntry(
                geography=geo.name,
                p_area=p_area,
                p_points=p_points,
                score=score,
                selected_point_ids=frozenset(per_geo_ids.get(geo.name, set())),
            ))
    entries.sort(key=lambda e: (-e.score, e.geography))
    return CoverageResult(entries=tuple(entries), config=cfg, selection=selection)
