"""Geometric foundation: coordinates, polygons, membership, equal-area areas.

All area arithmetic happens in a Lambert cylindrical equal-area projection
(``x = lon_radians``, ``y = sin(lat_radians)``) with polygon edges treated as
straight segments in projected space.  Only area *ratios* are consumed
downstream, so any consistent equal-area convention works; this one is cheap
and exactly invertible.

Intersection areas are computed by decomposing each ring into signed fan
triangles and clipping triangle pairs with Sutherland-Hodgman.  The signed
decomposition is valid for arbitrary simple rings (winding numbers of the fan
triangles sum to the ring's indicator function almost everywhere), so no
general vertex-classification clipper is needed and collinear or shared-edge
inputs cost nothing in robustness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DegeneratePolygon,
    InvalidGeoJSON,
    SelfIntersectingSelection,
    TooFewVertices,
    ValidationError,
)

DEGENERACY_TOL = 1e-12   # absolute projected area below which a ring is degenerate
RELATIVE_TOL = 1e-9      # relative tolerance for geometric equality
DUPLICATE_TOL = 1e-9     # projected distance for collapsing consecutive vertices
BOUNDARY_TOL = 1e-12     # projected distance for the on-boundary tie-break


def _project_x(lon: float) -> float:
    return math.radians(lon)


def _project_y(lat: float) -> float:
    return math.sin(math.radians(lat))


@dataclass(frozen=True)
class LonLat:
    """A position in degrees, longitude in [-180, 180], latitude in [-90, 90]."""

    lon: float
    lat: float

    def __post_init__(self):
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise ValidationError(f"coordinates must be finite, got ({self.lon}, {self.lat})")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"longitude {self.lon} out of [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} out of [-90, 90]")


def project_equal_area(p: LonLat) -> tuple[float, float]:
    """Map a LonLat to the equal-area plane (lon radians, sin of lat)."""
    return (_project_x(p.lon), _project_y(p.lat))


def unproject(x: float, y: float) -> LonLat:
    """Inverse of :func:`project_equal_area`; ``y`` is clamped to [-1, 1]."""
    return LonLat(math.degrees(x), math.degrees(math.asin(max(-1.0, min(1.0, y)))))


@dataclass(frozen=True)
class Rectangle:
    """An axis-aligned lon/lat box; west < east so antimeridian crossing is rejected."""

    west: float
    south: float
    east: float
    north: float

    def __post_init__(self):
        for v in (self.west, self.south, self.east, self.north):
            if not math.isfinite(v):
                raise ValidationError("rectangle bounds must be finite")
        if not (-180.0 <= self.west and self.east <= 180.0):
            raise ValidationError("rectangle longitudes out of [-180, 180]")
        if not (-90.0 <= self.south and self.north <= 90.0):
            raise ValidationError("rectangle latitudes out of [-90, 90]")
        if not self.west < self.east:
            raise ValidationError(f"rectangle requires west < east, got {self.west} >= {self.east}")
        if not self.south < self.north:
            raise ValidationError(f"rectangle requires south < north, got {self.south} >= {self.north}")

    def projected_bounds(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) in projected space; projection is monotone per axis."""
        return (
            _project_x(self.west),
            _project_y(self.south),
            _project_x(self.east),
            _project_y(self.north),
        )

    def contains(self, p: LonLat) -> bool:
        """Boundary-inclusive containment, matching the polygon tie-break."""
        return self.west <= p.lon <= self.east and self.south <= p.lat <= self.north


# ---------------------------------------------------------------------------
# ring helpers (projected (n, 2) float arrays, implicitly closed)
# ---------------------------------------------------------------------------

def _ring_xy(vertices: Sequence[LonLat]) -> np.ndarray:
    return np.array([[_project_x(v.lon), _project_y(v.lat)] for v in vertices], dtype=float)


def _ring_signed_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def _dedupe_ring(vertices: list[LonLat]) -> list[LonLat]:
    """Drop an explicit closing vertex and collapse consecutive near-duplicates."""
    if len(vertices) >= 2 and vertices[0] == vertices[-1]:
        vertices = vertices[:-1]
    out: list[LonLat] = []
    for v in vertices:
        if out:
            px, py = project_equal_area(out[-1])
            qx, qy = project_equal_area(v)
            if math.hypot(qx - px, qy - py) < DUPLICATE_TOL:
                continue
        out.append(v)
    # wrap-around duplicate after closure drop
    while len(out) >= 2:
        px, py = project_equal_area(out[0])
        qx, qy = project_equal_area(out[-1])
        if math.hypot(qx - px, qy - py) < DUPLICATE_TOL:
            out.pop()
        else:
            break
    return out


def _segments_properly_cross(p1, p2, p3, p4) -> bool:
    """True when segment p1p2 intersects p3p4 other than at shared endpoints."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_segment(a, b, c):
        return (
            min(a[0], b[0]) - BOUNDARY_TOL <= c[0] <= max(a[0], b[0]) + BOUNDARY_TOL
            and min(a[1], b[1]) - BOUNDARY_TOL <= c[1] <= max(a[1], b[1]) + BOUNDARY_TOL
        )

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    # collinear / endpoint-touching cases
    scale = max(abs(v) for p in (p1, p2, p3, p4) for v in p) + 1.0
    eps = DEGENERACY_TOL * scale
    if abs(d1) <= eps and on_segment(p3, p4, p1):
        return True
    if abs(d2) <= eps and on_segment(p3, p4, p2):
        return True
    if abs(d3) <= eps and on_segment(p1, p2, p3):
        return True
    if abs(d4) <= eps and on_segment(p1, p2, p4):
        return True
    return False


def _ring_is_simple(xy: np.ndarray) -> bool:
    """O(n^2) simplicity test; adjacent edges may share only their endpoint."""
    n = len(xy)
    for i in range(n):
        a1, a2 = xy[i], xy[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                # adjacent edges: a back-tracking spike would have been collapsed
                # as a duplicate vertex; skip the shared-endpoint contact
                continue
            b1, b2 = xy[j], xy[(j + 1) % n]
            if _segments_properly_cross(tuple(a1), tuple(a2), tuple(b1), tuple(b2)):
                return False
    return True


def _points_in_ring_xy(xs: np.ndarray, ys: np.ndarray, xy: np.ndarray) -> np.ndarray:
    """Even-odd crossing parity for many points against one ring (no boundary rule)."""
    inside = np.zeros(len(xs), dtype=bool)
    n = len(xy)
    for i in range(n):
        x1, y1 = xy[i]
        x2, y2 = xy[(i + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 > ys) != (y2 > ys)
        if not crosses.any():
            continue
        xint = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (xs < xint)
    return inside


def _points_on_ring_xy(xs: np.ndarray, ys: np.ndarray, xy: np.ndarray,
                       tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Points within ``tol`` of any ring edge."""
    on = np.zeros(len(xs), dtype=bool)
    n = len(xy)
    for i in range(n):
        x1, y1 = xy[i]
        x2, y2 = xy[(i + 1) % n]
        dx, dy = x2 - x1, y2 - y1
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            d2 = (xs - x1) ** 2 + (ys - y1) ** 2
        else:
            t = np.clip(((xs - x1) * dx + (ys - y1) * dy) / seg2, 0.0, 1.0)
            d2 = (xs - (x1 + t * dx)) ** 2 + (ys - (y1 + t * dy)) ** 2
        on |= d2 <= tol * tol
    return on


# ---------------------------------------------------------------------------
# polygon types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polygon:
    """A simple ring with optional holes, normalized to CCW exterior / CW holes.

    The constructor drops an explicit closing vertex, collapses consecutive
    near-duplicate vertices, fixes orientation, and rejects degenerate rings.
    Simplicity is *not* verified here (see :func:`validate_freehand` for
    untrusted freehand input); malformed input geometry is out of scope.
    """

    exterior: tuple[LonLat, ...]
    holes: tuple[tuple[LonLat, ...], ...] = ()

    def __init__(self, exterior: Iterable[LonLat], holes: Iterable[Iterable[LonLat]] = ()):
        ext = _dedupe_ring(list(exterior))
        if len(ext) < 3:
            raise TooFewVertices(f"polygon exterior needs >= 3 distinct vertices, got {len(ext)}")
        if _ring_signed_area(_ring_xy(ext)) < 0:
            ext = ext[::-1]
        norm_holes = []
        for hole in holes:
            h = _dedupe_ring(list(hole))
            if len(h) < 3:
                raise TooFewVertices("polygon hole needs >= 3 distinct vertices")
            if _ring_signed_area(_ring_xy(h)) > 0:
                h = h[::-1]
            norm_holes.append(tuple(h))
        object.__setattr__(self, "exterior", tuple(ext))
        object.__setattr__(self, "holes", tuple(norm_holes))
        if abs(_ring_signed_area(self.exterior_xy)) < DEGENERACY_TOL:
            raise DegeneratePolygon("polygon exterior has (near-)zero area")
        if self.area < DEGENERACY_TOL:
            raise DegeneratePolygon("polygon area is zero after subtracting holes")

    @cached_property
    def exterior_xy(self) -> np.ndarray:
        return _ring_xy(self.exterior)

    @cached_property
    def holes_xy(self) -> tuple[np.ndarray, ...]:
        return tuple(_ring_xy(h) for h in self.holes)

    @cached_property
    def bounds_xy(self) -> tuple[float, float, float, float]:
        xy = self.exterior_xy
        return (
            float(xy[:, 0].min()),
            float(xy[:, 1].min()),
            float(xy[:, 0].max()),
            float(xy[:, 1].max()),
        )

    @cached_property
    def area(self) -> float:
        total = abs(_ring_signed_area(self.exterior_xy))
        for h in self.holes_xy:
            total -= abs(_ring_signed_area(h))
        return total

    def validate_simple(self) -> None:
        """Raise SelfIntersectingSelection when any ring self-intersects."""
        if not _ring_is_simple(self.exterior_xy):
            raise SelfIntersectingSelection("selection ring intersects itself")
        for h in self.holes_xy:
            if not _ring_is_simple(h):
                raise SelfIntersectingSelection("polygon hole ring intersects itself")


@dataclass(frozen=True)
class MultiPolygon:
    """A collection of pairwise non-overlapping polygons (one per landmass part)."""

    parts: tuple[Polygon, ...]

    def __init__(self, parts: Iterable[Polygon]):
        parts = tuple(parts)
        if not parts:
            raise ValidationError("multipolygon needs >= 1 part")
        object.__setattr__(self, "parts", parts)

    @cached_property
    def bounds_xy(self) -> tuple[float, float, float, float]:
        boxes = [p.bounds_xy for p in self.parts]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    @cached_property
    def area(self) -> float:
        return sum(p.area for p in self.parts)


AnyPolygon = Union[Polygon, MultiPolygon]


def _parts(poly: AnyPolygon) -> tuple[Polygon, ...]:
    return poly.parts if isinstance(poly, MultiPolygon) else (poly,)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def polygon_area(poly: AnyPolygon) -> float:
    """Projected equal-area square units (radians x sin-lat); holes subtract."""
    total = sum(p.area for p in _parts(poly))
    if total < DEGENERACY_TOL:
        raise DegeneratePolygon("polygon area is zero within tolerance")
    return total


def points_in_polygon(lons: np.ndarray, lats: np.ndarray, poly: AnyPolygon) -> np.ndarray:
    """Vectorized even-odd membership; boundary points count as inside."""
    lons = np.asarray(lons, dtype=float)
    lats = np.asarray(lats, dtype=float)
    xs = np.radians(lons)
    ys = np.sin(np.radians(lats))
    return _points_in_polygon_xy(xs, ys, poly)


def _points_in_polygon_xy(xs: np.ndarray, ys: np.ndarray, poly: AnyPolygon) -> np.ndarray:
    result = np.zeros(len(xs), dtype=bool)
    for part in _parts(poly):
        x0, y0, x1, y1 = part.bounds_xy
        pad = BOUNDARY_TOL
        box = (xs >= x0 - pad) & (xs <= x1 + pad) & (ys >= y0 - pad) & (ys <= y1 + pad)
        if not box.any():
            continue
        bx, by = xs[box], ys[box]
        inside = _points_in_ring_xy(bx, by, part.exterior_xy)
        on = _points_on_ring_xy(bx, by, part.exterior_xy)
        for hole in part.holes_xy:
            inside ^= _points_in_ring_xy(bx, by, hole)
            on |= _points_on_ring_xy(bx, by, hole)
        result[box] |= inside | on
    return result


def point_in_polygon(p: LonLat, poly: AnyPolygon) -> bool:
    """Even-odd membership for one point; boundary counts as inside."""
    x, y = project_equal_area(p)
    return bool(_points_in_polygon_xy(np.array([x]), np.array([y]), poly)[0])


def rectangle_to_polygon(r: Rectangle) -> Polygon:
    """Four-corner CCW polygon of the rectangle."""
    return Polygon(
        [
            LonLat(r.west, r.south),
            LonLat(r.east, r.south),
            LonLat(r.east, r.north),
            LonLat(r.west, r.north),
        ]
    )


def validate_freehand(path: Sequence[LonLat]) -> Polygon:
    """Close and normalize a freehand path into a simple Polygon.

    The path is closed by joining the last vertex back to the first;
    consecutive near-duplicate vertices are collapsed.  Raises
    TooFewVertices when fewer than 3 distinct vertices remain and
    SelfIntersectingSelection when the closed ring is non-simple.
    """
    cleaned = _dedupe_ring(list(path))
    if len(cleaned) < 3:
        raise TooFewVertices(
            f"freehand selection needs >= 3 distinct vertices, got {len(cleaned)}"
        )
    if not _ring_is_simple(_ring_xy(cleaned)):
        raise SelfIntersectingSelection("freehand selection crosses itself")
    return Polygon(cleaned)


# ---------------------------------------------------------------------------
# intersection area: signed fan decomposition + Sutherland-Hodgman
# ---------------------------------------------------------------------------

def _clip_convex(subject: list[tuple[float, float]],
                 clip: np.ndarray) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of a convex subject against a CCW convex ring."""
    output = subject
    n = len(clip)
    for i in range(n):
        if not output:
            return output
        cx1, cy1 = clip[i]
        cx2, cy2 = clip[(i + 1) % n]
        ex, ey = cx2 - cx1, cy2 - cy1
        input_list = output
        output = []
        sx, sy = input_list[-1]
        s_in = ex * (sy - cy1) - ey * (sx - cx1) >= 0.0
        for px, py in input_list:
            p_in = ex * (py - cy1) - ey * (px - cx1) >= 0.0
            if p_in != s_in:
                dx, dy = px - sx, py - sy
                denom = ex * dy - ey * dx
                if denom != 0.0:
                    t = (ex * (cy1 - sy) - ey * (cx1 - sx)) / denom
                    output.append((sx + t * dx, sy + t * dy))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
    return output


def _poly_list_area(pts: list[tuple[float, float]]) -> float:
    if len(pts) < 3:
        return 0.0
    total = 0.0
    x0, y0 = pts[-1]
    for x1, y1 in pts:
        total += x0 * y1 - x1 * y0
        x0, y0 = x1, y1
    return 0.5 * total


def _fan_triangles(xy: np.ndarray, origin: tuple[float, float]):
    """Signed fan triangles (vertices, sign, bbox) covering the ring's interior.

    For any origin O, the winding numbers of triangles (O, v_i, v_i+1) sum to
    the ring's indicator function away from edges, so signed triangle
    intersections integrate to exact intersection areas.
    """
    ox, oy = origin
    n = len(xy)
    tris = []
    for i in range(n):
        ax, ay = xy[i]
        bx, by = xy[(i + 1) % n]
        twice_area = (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)
        if abs(twice_area) < DEGENERACY_TOL:
            continue
        sign = 1.0 if twice_area > 0 else -1.0
        verts = [(ox, oy), (ax, ay), (bx, by)] if sign > 0 else [(ox, oy), (bx, by), (ax, ay)]
        bbox = (
            min(ox, ax, bx), min(oy, ay, by),
            max(ox, ax, bx), max(oy, ay, by),
        )
        tris.append((verts, sign, bbox))
    return tris


def _ring_is_convex(xy: np.ndarray) -> bool:
    n = len(xy)
    if n < 4:
        return True
    sign = 0
    for i in range(n):
        ax, ay = xy[i]
        bx, by = xy[(i + 1) % n]
        cx, cy = xy[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if abs(cross) < DEGENERACY_TOL:
            continue
        s = 1 if cross > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def _boxes_disjoint(a, b) -> bool:
    return a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]


def _ring_bbox(xy: np.ndarray):
    return (
        float(xy[:, 0].min()), float(xy[:, 1].min()),
        float(xy[:, 0].max()), float(xy[:, 1].max()),
    )


def _ring_pair_intersection_area(ra: np.ndarray, rb: np.ndarray) -> float:
    """Intersection area of two simple rings (orientation-insensitive)."""
    box_a, box_b = _ring_bbox(ra), _ring_bbox(rb)
    if _boxes_disjoint(box_a, box_b):
        return 0.0
    origin = (
        (max(box_a[0], box_b[0]) + min(box_a[2], box_b[2])) / 2.0,
        (max(box_a[1], box_b[1]) + min(box_a[3], box_b[3])) / 2.0,
    )
    # one convex operand lets us clip the other's fan against it directly
    for fan_ring, convex_ring in ((ra, rb), (rb, ra)):
        if _ring_is_convex(convex_ring):
            clip = convex_ring if _ring_signed_area(convex_ring) > 0 else convex_ring[::-1]
            clip_box = _ring_bbox(clip)
            total = 0.0
            for verts, sign, bbox in _fan_triangles(fan_ring, origin):
                if _boxes_disjoint(bbox, clip_box):
                    continue
                total += sign * _poly_list_area(_clip_convex(verts, clip))
            return max(total, 0.0)
    fans_a = _fan_triangles(ra, origin)
    fans_b = [
        (np.array(verts), sign, bbox) for verts, sign, bbox in _fan_triangles(rb, origin)
    ]
    total = 0.0
    for verts_a, sign_a, box_ta in fans_a:
        for verts_b, sign_b, box_tb in fans_b:
            if _boxes_disjoint(box_ta, box_tb):
                continue
            total += sign_a * sign_b * _poly_list_area(_clip_convex(verts_a, verts_b))
    return max(total, 0.0)


def polygon_intersection_area(a: AnyPolygon, b: AnyPolygon) -> float:
    """Area of a's intersection with b in projected units.

    Commutative and bounded by min(area(a), area(b)).  Holes enter through
    inclusion-exclusion over ring pairs: with exterior rings weighted +1 and
    hole rings -1, area(A & B) = sum of signed pairwise ring intersections.
    """
    area_a = polygon_area(a)
    area_b = polygon_area(b)
    if _boxes_disjoint(a.bounds_xy, b.bounds_xy):
        return 0.0

    def rings(poly: AnyPolygon):
        for part in _parts(poly):
            yield part.exterior_xy, 1.0
            for hole in part.holes_xy:
                yield hole, -1.0

    total = 0.0
    rings_b = list(rings(b))
    for ring_a, sign_a in rings(a):
        box_a = _ring_bbox(ring_a)
        for ring_b, sign_b in rings_b:
            if _boxes_disjoint(box_a, _ring_bbox(ring_b)):
                continue
            total += sign_a * sign_b * _ring_pair_intersection_area(ring_a, ring_b)
    return min(max(total, 0.0), area_a, area_b)


# ---------------------------------------------------------------------------
# GeoJSON conversion
# ---------------------------------------------------------------------------

def _ring_from_coords(coords) -> list[LonLat]:
    try:
        return [LonLat(float(lon), float(lat)) for lon, lat, *_ in coords]
    except (TypeError, ValueError) as exc:
        raise InvalidGeoJSON(f"bad ring coordinates: {exc}") from exc


def geometry_from_geojson(obj: dict) -> AnyPolygon:
    """Parse a GeoJSON Polygon or MultiPolygon geometry into domain types."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidGeoJSON("geometry must be an object with a 'type'")
    gtype = obj.get("type")
    coords = obj.get("coordinates")
    if coords is None:
        raise InvalidGeoJSON(f"{gtype} geometry missing 'coordinates'")
    try:
        if gtype == "Polygon":
            rings = [_ring_from_coords(r) for r in coords]
            if not rings:
                raise InvalidGeoJSON("Polygon has no rings")
            return Polygon(rings[0], rings[1:])
        if gtype == "MultiPolygon":
            parts = []
            for part in coords:
                rings = [_ring_from_coords(r) for r in part]
                if not rings:
                    raise InvalidGeoJSON("MultiPolygon part has no rings")
                parts.append(Polygon(rings[0], rings[1:]))
            return MultiPolygon(parts)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidGeoJSON(f"malformed {gtype} coordinates: {exc}") from exc
    raise InvalidGeoJSON(f"unsupported geometry type {gtype!r}")


def geometry_to_geojson(poly: AnyPolygon) -> dict:
    """Emit a GeoJSON geometry with explicitly closed rings."""
    def ring_coords(ring: tuple[LonLat, ...]):
        coords = [[v.lon, v.lat] for v in ring]
        coords.append(coords[0])
        return coords

    if isinstance(poly, MultiPolygon):
        return {
            "type": "MultiPolygon",
            "coordinates": [
                [ring_coords(p.exterior)] + [ring_coords(h) for h in p.holes]
                for p in poly.parts
            ],
        }
    return {
        "type": "Polygon",
        "coordinates": [ring_coords(poly.exterior)]
        + [ring_coords(h) for h in poly.holes],
    }


def point_to_geojson(p: LonLat) -> dict:
    return {"type": "Point", "coordinates": [p.lon, p.lat]}


def point_from_geojson(obj: dict) -> LonLat:
    if not isinstance(obj, dict) or obj.get("type") != "Point":
        raise InvalidGeoJSON("expected a GeoJSON Point")
    coords = obj.get("coordinates")
    if not isinstance(coords, (list, tuple)) or len(coords) < 2:
        raise InvalidGeoJSON("Point needs [lon, lat] coordinates")
    return LonLat(float(coords[0]), float(coords[1]))
