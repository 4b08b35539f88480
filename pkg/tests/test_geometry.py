import math

import numpy as np
import pytest

from georegion.errors import (
    DegeneratePolygon,
    SelfIntersectingSelection,
    TooFewVertices,
    ValidationError,
)
from georegion.geometry import (
    LonLat,
    MultiPolygon,
    Polygon,
    Rectangle,
    geometry_from_geojson,
    geometry_to_geojson,
    point_in_polygon,
    points_in_polygon,
    polygon_area,
    polygon_intersection_area,
    project_equal_area,
    rectangle_to_polygon,
    unproject,
    validate_freehand,
)

from helpers import mc_intersection_area, random_simple_polygon, winding_contains


def projected_square(x0=0.0, y0=0.0, side=1.0) -> Polygon:
    """Square with the given corner/side in projected coordinates."""
    return Polygon(
        [
            unproject(x0, y0),
            unproject(x0 + side, y0),
            unproject(x0 + side, y0 + side),
            unproject(x0, y0 + side),
        ]
    )


class TestProjection:
    def test_origin(self):
        assert project_equal_area(LonLat(0, 0)) == (0.0, 0.0)

    def test_analytic_bounds(self):
        x, y = project_equal_area(LonLat(180, 90))
        assert x == pytest.approx(math.pi, abs=1e-15)
        assert y == pytest.approx(1.0, abs=1e-15)

    def test_sin_thirty(self):
        x, y = project_equal_area(LonLat(-90, 30))
        assert x == pytest.approx(-math.pi / 2, abs=1e-15)
        assert y == pytest.approx(0.5, abs=1e-12)

    def test_unproject_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = LonLat(rng.uniform(-180, 180), rng.uniform(-89, 89))
            x, y = project_equal_area(p)
            q = unproject(x, y)
            assert q.lon == pytest.approx(p.lon, abs=1e-9)
            assert q.lat == pytest.approx(p.lat, abs=1e-9)

    @pytest.mark.parametrize("lon,lat", [(181, 0), (-181, 0), (0, 91), (0, -91), (float("nan"), 0)])
    def test_lonlat_range_enforced(self, lon, lat):
        with pytest.raises(ValidationError):
            LonLat(lon, lat)


class TestPolygonArea:
    def test_projected_unit_square(self):
        assert polygon_area(projected_square()) == pytest.approx(1.0, abs=1e-12)

    def test_clockwise_square_same_area(self):
        sq = projected_square()
        cw = Polygon(list(sq.exterior)[::-1])
        assert polygon_area(cw) == pytest.approx(1.0, abs=1e-12)

    def test_square_with_centered_half_size_hole(self):
        hole = [
            unproject(0.25, 0.25),
            unproject(0.75, 0.25),
            unproject(0.75, 0.75),
            unproject(0.25, 0.75),
        ]
        poly = Polygon(projected_square().exterior, [hole])
        assert polygon_area(poly) == pytest.approx(0.75, abs=1e-12)

    def test_degenerate_rejected(self):
        with pytest.raises(DegeneratePolygon):
            Polygon([LonLat(0, 0), LonLat(1, 0), LonLat(2, 0)])

    def test_multipolygon_sums_parts(self):
        a = projected_square(0, 0, 0.5)
        b = projected_square(1, 0, 0.5)
        assert polygon_area(MultiPolygon([a, b])) == pytest.approx(0.5, abs=1e-12)


class TestPointInPolygon:
    def test_center_inside(self):
        assert point_in_polygon(unproject(0.5, 0.5), projected_square())

    def test_outside_bounding_box(self):
        assert not point_in_polygon(unproject(5.0 - math.pi, -0.9), projected_square())

    def test_boundary_counts_inside(self):
        sq = projected_square()
        assert point_in_polygon(unproject(0.5, 0.0), sq)
        assert point_in_polygon(unproject(0.0, 0.0), sq)

    def test_hole_excluded_but_hole_boundary_inside(self):
        hole = [unproject(0.25, 0.25), unproject(0.75, 0.25),
                unproject(0.75, 0.75), unproject(0.25, 0.75)]
        poly = Polygon(projected_square().exterior, [hole])
        assert not point_in_polygon(unproject(0.5, 0.5), poly)
        assert point_in_polygon(unproject(0.25, 0.5), poly)

    def test_matches_winding_oracle_on_random_polygons(self):
        rng = np.random.default_rng(42)
        mismatches = 0
        for _ in range(20):
            poly = random_simple_polygon(rng)
            lons = rng.uniform(-30, 30, size=1000)
            lats = rng.uniform(-30, 30, size=1000)
            ours = points_in_polygon(lons, lats, poly)
            for lon, lat, got in zip(lons, lats, ours):
                expected = winding_contains(LonLat(lon, lat), poly)
                if got != expected:
                    # disagreement is only legitimate within the boundary tie-break
                    mismatches += 1
        assert mismatches == 0

    def test_batch_agrees_with_scalar(self):
        rng = np.random.default_rng(3)
        poly = random_simple_polygon(rng)
        lons = rng.uniform(-25, 25, size=300)
        lats = rng.uniform(-25, 25, size=300)
        batch = points_in_polygon(lons, lats, poly)
        scalar = np.array([point_in_polygon(LonLat(lon, lat), poly) for lon, lat in zip(lons, lats)])
        assert (batch == scalar).all()


class TestIntersectionArea:
    def test_disjoint_squares(self):
        a = projected_square(0, 0, 1)
        b = projected_square(2, -0.5, 0.4)
        assert polygon_intersection_area(a, b) == 0.0

    def test_identical_polygons(self):
        rng = np.random.default_rng(11)
        poly = random_simple_polygon(rng)
        area = polygon_area(poly)
        assert polygon_intersection_area(poly, poly) == pytest.approx(area, rel=1e-9)

    def test_offset_unit_squares_analytic_and_monte_carlo(self):
        a = projected_square(0, 0, 1)
        b = projected_square(0.5, 0, 1)
        got = polygon_intersection_area(a, b)
        assert got == pytest.approx(0.5, abs=1e-9)
        rng = np.random.default_rng(5)
        estimate, sigma = mc_intersection_area(a, b, 100_000, rng)
        assert abs(got - estimate) < max(3 * sigma, 1e-3)

    def test_commutative(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            a = random_simple_polygon(rng, center=(0.0, 0.0))
            b = random_simple_polygon(rng, center=(0.1, 0.05))
            ab = polygon_intersection_area(a, b)
            ba = polygon_intersection_area(b, a)
            assert ab == pytest.approx(ba, rel=1e-9, abs=1e-15)

    def test_bounded_by_min_area(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            a = random_simple_polygon(rng)
            b = random_simple_polygon(rng, center=(0.05, -0.02))
            inter = polygon_intersection_area(a, b)
            assert 0.0 <= inter <= min(polygon_area(a), polygon_area(b)) + 1e-15

    def test_subset_equals_smaller_area(self):
        outer = projected_square(0, 0, 1)
        inner = projected_square(0.2, 0.2, 0.3)
        got = polygon_intersection_area(outer, inner)
        assert got == pytest.approx(polygon_area(inner), rel=1e-9)

    def test_concave_pair_matches_monte_carlo(self):
        rng = np.random.default_rng(29)
        for _ in range(5):
            a = random_simple_polygon(rng, center=(0.0, 0.0), radius=0.4)
            b = random_simple_polygon(rng, center=(0.15, 0.1), radius=0.4)
            got = polygon_intersection_area(a, b)
            estimate, sigma = mc_intersection_area(a, b, 100_000, rng)
            assert abs(got - estimate) <= max(3 * sigma, 1e-4)

    def test_hole_subtracts_from_intersection(self):
        hole = [unproject(0.25, 0.25), unproject(0.75, 0.25),
                unproject(0.75, 0.75), unproject(0.25, 0.75)]
        a = Polygon(projected_square().exterior, [hole])
        b = projected_square()                      # full square
        got = polygon_intersection_area(a, b)
        assert got == pytest.approx(0.75, abs=1e-9)

    def test_membership_consistent_with_intersection(self):
        # sampled points inside both polygons must register in each separately
        rng = np.random.default_rng(31)
        a = random_simple_polygon(rng)
        b = random_simple_polygon(rng, center=(0.05, 0.0))
        lons = rng.uniform(-25, 25, size=500)
        lats = rng.uniform(-25, 25, size=500)
        in_a = points_in_polygon(lons, lats, a)
        in_b = points_in_polygon(lons, lats, b)
        if polygon_intersection_area(a, b) == 0.0:
            assert not (in_a & in_b).any()


class TestRectangle:
    def test_corner_polygon(self):
        poly = rectangle_to_polygon(Rectangle(0, 0, 1, 1))
        assert poly.exterior == (LonLat(0, 0), LonLat(1, 0), LonLat(1, 1), LonLat(0, 1))

    def test_degenerate_rejected(self):
        with pytest.raises(ValidationError):
            Rectangle(1, 0, 1, 1)
        with pytest.raises(ValidationError):
            Rectangle(0, 1, 1, 1)

    def test_area_matches_closed_form(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            west, south = rng.uniform(-170, 150), rng.uniform(-80, 60)
            rect = Rectangle(west, south, west + rng.uniform(0.1, 20), south + rng.uniform(0.1, 20))
            expected = (math.radians(rect.east) - math.radians(rect.west)) * (
                math.sin(math.radians(rect.north)) - math.sin(math.radians(rect.south))
            )
            assert polygon_area(rectangle_to_polygon(rect)) == pytest.approx(expected, rel=1e-12)

    def test_antimeridian_crossing_rejected(self):
        with pytest.raises(ValidationError):
            Rectangle(170, 0, -170, 10)


class TestFreehand:
    def test_open_triangle_closes(self):
        poly = validate_freehand([LonLat(0, 0), LonLat(2, 0), LonLat(1, 2)])
        assert len(poly.exterior) == 3

    def test_figure_eight_rejected(self):
        path = [LonLat(0, 0), LonLat(2, 2), LonLat(2, 0), LonLat(0, 2)]
        with pytest.raises(SelfIntersectingSelection):
            validate_freehand(path)

    def test_consecutive_duplicates_collapsed(self):
        path = [LonLat(0, 0), LonLat(0, 0), LonLat(2, 0), LonLat(2, 0), LonLat(1, 2)]
        poly = validate_freehand(path)
        assert len(poly.exterior) == 3

    def test_too_few_vertices(self):
        with pytest.raises(TooFewVertices):
            validate_freehand([LonLat(0, 0), LonLat(1, 1)])
        with pytest.raises(TooFewVertices):
            validate_freehand([LonLat(0, 0), LonLat(0, 0), LonLat(0, 0), LonLat(1, 1)])

    def test_explicitly_closed_path_accepted(self):
        poly = validate_freehand([LonLat(0, 0), LonLat(2, 0), LonLat(1, 2), LonLat(0, 0)])
        assert len(poly.exterior) == 3


class TestScalingRatioLaw:
    def test_area_ratios_invariant_under_uniform_scaling(self):
        rng = np.random.default_rng(37)
        a = random_simple_polygon(rng)
        b = random_simple_polygon(rng)

        def scaled(poly, k):
            return Polygon([unproject(k * x, k * y) for x, y in poly.exterior_xy])

        for k in (0.5, 0.9, 1.5):
            ratio = polygon_area(a) / polygon_area(b)
            ratio_k = polygon_area(scaled(a, k)) / polygon_area(scaled(b, k))
            assert ratio_k == pytest.approx(ratio, rel=1e-9)


class TestGeoJSON:
    def test_polygon_round_trip(self):
        poly = Polygon([LonLat(0, 0), LonLat(2, 0), LonLat(2, 2), LonLat(0, 2)],
                       [[LonLat(0.5, 0.5), LonLat(1.5, 0.5), LonLat(1.5, 1.5), LonLat(0.5, 1.5)]])
        back = geometry_from_geojson(geometry_to_geojson(poly))
        assert isinstance(back, Polygon)
        assert back == poly

    def test_multipolygon_round_trip(self):
        mp = MultiPolygon([projected_square(0, 0, 0.2), projected_square(1, 0, 0.3)])
        back = geometry_from_geojson(geometry_to_geojson(mp))
        assert isinstance(back, MultiPolygon)
        assert back == mp

    def test_closed_rings_emitted(self):
        gj = geometry_to_geojson(projected_square())
        ring = gj["coordinates"][0]
        assert ring[0] == ring[-1]

    @pytest.mark.parametrize("bad", [
        {"type": "Polygon"},
        {"type": "LineString", "coordinates": [[0, 0], [1, 1]]},
        {"type": "Polygon", "coordinates": "nope"},
        "not a dict",
        {"type": "Polygon", "coordinates": []},
    ])
    def test_invalid_geojson_rejected(self, bad):
        from georegion.errors import InvalidGeoJSON
        with pytest.raises((InvalidGeoJSON, ValidationError)):
            geometry_from_geojson(bad)
