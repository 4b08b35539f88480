"""Quadtree over projected point positions for rectangle and polygon queries.

The tree is built once per dataset load and immutable afterwards.  Space is
partitioned in projected coordinates (the same plane the geometry module
measures in) so polygon pruning and membership agree exactly.  Leaf checks
for rectangle queries compare raw degrees so results match a degree-space
linear scan bit-for-bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .geometry import (
    AnyPolygon,
    LonLat,
    Rectangle,
    _points_in_polygon_xy,
)

LEAF_CAPACITY = 16
MAX_DEPTH = 20


@dataclass(frozen=True)
class GeoPoint:
    """One data record: identity, position, event magnitude, time, geography."""

    id: str
    position: LonLat
    magnitude: float
    timestamp: datetime
    admin_geography: str = "none"

    def __post_init__(self):
        if not self.id:
            raise ValidationError("point id must be non-empty")
        if not math.isfinite(self.magnitude):
            raise ValidationError(f"point {self.id!r} has non-finite magnitude")
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))


class _Node:
    __slots__ = ("box", "indices", "children")

    def __init__(self, box: tuple[float, float, float, float]):
        self.box = box
        self.indices: Optional[np.ndarray] = None     # leaf payload
        self.children: Optional[list["_Node"]] = None


class QuadTree:
    """Immutable point index; build with :func:`build_quadtree`."""

    def __init__(self, points: Sequence[GeoPoint], leaf_capacity: int, max_depth: int):
        ids = [p.id for p in points]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate point ids in dataset")
        self.points: tuple[GeoPoint, ...] = tuple(points)
        self.leaf_capacity = leaf_capacity
        self.max_depth = max_depth
        self._by_id = {p.id: p for p in self.points}
        self.lons = np.array([p.position.lon for p in self.points], dtype=float)
        self.lats = np.array([p.position.lat for p in self.points], dtype=float)
        self.xs = np.radians(self.lons)
        self.ys = np.sin(np.radians(self.lats))
        self.root: Optional[_Node] = None
        if self.points:
            box = (
                float(self.xs.min()), float(self.ys.min()),
                float(self.xs.max()), float(self.ys.max()),
            )
            self.root = self._build(np.arange(len(self.points)), box, 0)

    def _build(self, indices: np.ndarray, box: tuple[float, float, float, float],
               depth: int) -> _Node:
        node = _Node(box)
        if len(indices) <= self.leaf_capacity or depth >= self.max_depth:
            node.indices = indices
            return node
        x0, y0, x1, y1 = box
        cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        xs, ys = self.xs[indices], self.ys[indices]
        west, south = xs < cx, ys < cy
        quadrants = (
            (indices[west & south], (x0, y0, cx, cy)),
            (indices[~west & south], (cx, y0, x1, cy)),
            (indices[west & ~south], (x0, cy, cx, y1)),
            (indices[~west & ~south], (cx, cy, x1, y1)),
        )
        # zero-extent boxes cannot split further; keep an over-full leaf
        if cx in (x0, x1) and cy in (y0, y1):
            node.indices = indices
            return node
        node.children = [self._build(idx, child_box, depth + 1)
                         for idx, child_box in quadrants]
        return node

    @property
    def count(self) -> int:
        return len(self.points)

    def point_by_id(self, point_id: str) -> GeoPoint:
        return self._by_id[point_id]

    def bounds(self) -> Optional[tuple[float, float, float, float]]:
        """(west, south, east, north) in degrees, or None for an empty tree."""
        if not self.points:
            return None
        return (
            float(self.lons.min()), float(self.lats.min()),
            float(self.lons.max()), float(self.lats.max()),
        )

    def query_rectangle(self, r: Rectangle) -> set[str]:
        """Ids of points inside the rectangle, boundaries inclusive."""
        if self.root is None:
            return set()
        qbox = r.projected_bounds()
        out: set[str] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if _disjoint(node.box, qbox):
                continue
            if node.children is not None:
                stack.extend(node.children)
                continue
            for i in node.indices:
                if (r.west <= self.lons[i] <= r.east
                        and r.south <= self.lats[i] <= r.north):
                    out.add(self.points[i].id)
        return out

    def query_polygon(self, poly: AnyPolygon) -> set[str]:
        """Ids of points inside the polygon (boundary inclusive).

        Nodes are pruned against the polygon's bounding box; surviving
        candidates get the exact membership test in one vectorized pass.
        """
        if self.root is None:
            return set()
        pbox = poly.bounds_xy
        candidates: list[np.ndarray] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if _disjoint(node.box, pbox):
                continue
            if node.children is not None:
                stack.extend(node.children)
                continue
            if len(node.indices):
                candidates.append(node.indices)
        if not candidates:
            return set()
        idx = np.concatenate(candidates)
        inside = _points_in_polygon_xy(self.xs[idx], self.ys[idx], poly)
        return {self.points[i].id for i in idx[inside]}


def _disjoint(a: tuple[float, float, float, float],
              b: tuple[float, float, float, float]) -> bool:
    return a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]


def build_quadtree(points: Iterable[GeoPoint], *, leaf_capacity: int = LEAF_CAPACITY,
                   max_depth: int = MAX_DEPTH) -> QuadTree:
    """Build an immutable quadtree containing exactly the given points."""
    return QuadTree(list(points), leaf_capacity, max_depth)
