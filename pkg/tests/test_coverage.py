import math
from datetime import datetime, timezone

import numpy as np
import pytest

from georegion.coverage import (
    AdminGeography,
    CoverageConfig,
    SelectionGeometry,
    compute_coverage,
    confidence_score,
)
from georegion.errors import EmptyRegistry, ValidationError
from georegion.geometry import LonLat, Rectangle, rectangle_to_polygon
from georegion.quadtree import GeoPoint, build_quadtree

from helpers import mc_intersection_area

EPOCH = datetime(2019, 1, 1, tzinfo=timezone.utc)


def rect_area(west, south, east, north):
    """Closed-form equal-area size of a lon/lat box."""
    return (math.radians(east) - math.radians(west)) * (
        math.sin(math.radians(north)) - math.sin(math.radians(south)))


def state(name, west, south, east, north, total_points=0):
    return AdminGeography(
        name=name,
        shape=rectangle_to_polygon(Rectangle(west, south, east, north)),
        total_points=total_points,
    )


def points_for(prefix, geo_name, coords):
    return [GeoPoint(f"{prefix}{i}", LonLat(lon, lat), 1.0, EPOCH, admin_geography=geo_name)
            for i, (lon, lat) in enumerate(coords)]


@pytest.fixture
def two_state_fixture():
    """States A=[0,1]x[0,1] (10 pts) and B=[1,2]x[0,1] (5 pts); selection [0.5,1.5]x[0,1]."""
    a_coords = [(0.1, 0.3), (0.2, 0.7), (0.3, 0.2), (0.35, 0.8), (0.4, 0.5), (0.45, 0.1),
                (0.6, 0.4), (0.7, 0.6), (0.8, 0.2), (0.9, 0.9)]   # 4 east of lon 0.5
    b_coords = [(1.05, 0.3), (1.15, 0.6), (1.25, 0.2), (1.35, 0.8), (1.45, 0.5)]
    points = points_for("a", "A", a_coords) + points_for("b", "B", b_coords)
    registry = [
        state("A", 0, 0, 1, 1, total_points=10),
        state("B", 1, 0, 2, 1, total_points=5),
    ]
    index = build_quadtree(points)
    selection = SelectionGeometry.from_rectangle(Rectangle(0.5, 0, 1.5, 1))
    return points, registry, index, selection


class TestConfidenceScore:
    def test_paper_constants(self):
        assert confidence_score(0.5, 0.4) == pytest.approx(0.465, abs=1e-12)

    def test_defaults(self):
        cfg = CoverageConfig()
        assert cfg.weight_area == 0.65
        assert cfg.weight_points == 0.35
        assert cfg.threshold == 0.2

    def test_full_proportions_score_one(self):
        assert confidence_score(1.0, 1.0) == pytest.approx(1.0, abs=1e-12)
        assert confidence_score(1.0, 1.0, CoverageConfig(0.5, 0.5)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_proportions_score_zero(self):
        assert confidence_score(0.0, 0.0) == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            confidence_score(1.2, 0.0)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            CoverageConfig(weight_area=0.8, weight_points=0.35)


class TestTwoStateFixture:
    def test_paper_worked_example(self, two_state_fixture):
        points, registry, index, selection = two_state_fixture
        result = compute_coverage(selection, index, registry)

        assert result.entry_names() == ["B", "A"]
        by_name = {e.geography: e for e in result.entries}

        # independent oracle: analytic box areas + a brute-force membership scan
        expected_pa_a = rect_area(0.5, 0, 1, 1) / rect_area(0, 0, 1, 1)
        expected_pa_b = rect_area(1, 0, 1.5, 1) / rect_area(1, 0, 2, 1)
        sel_rect = Rectangle(0.5, 0, 1.5, 1)
        scanned_a = sum(1 for p in points if p.admin_geography == "A" and sel_rect.contains(p.position))
        scanned_b = sum(1 for p in points if p.admin_geography == "B" and sel_rect.contains(p.position))
        assert scanned_a == 4 and scanned_b == 5

        assert by_name["A"].p_area == pytest.approx(expected_pa_a, abs=1e-9)
        assert by_name["A"].p_area == pytest.approx(0.5, abs=1e-9)
        assert by_name["A"].p_points == pytest.approx(0.4, abs=1e-12)
        assert by_name["A"].score == pytest.approx(0.465, abs=1e-9)
        assert by_name["B"].p_area == pytest.approx(0.5, abs=1e-9)
        assert by_name["B"].p_points == pytest.approx(1.0, abs=1e-12)
        assert by_name["B"].score == pytest.approx(0.675, abs=1e-9)

    def test_raising_threshold_drops_lower_entry(self, two_state_fixture):
        _, registry, index, selection = two_state_fixture
        result = compute_coverage(selection, index, registry,
                                  CoverageConfig(threshold=0.5))
        assert result.entry_names() == ["B"]

    def test_selected_point_ids_recorded(self, two_state_fixture):
        _, registry, index, selection = two_state_fixture
        result = compute_coverage(selection, index, registry)
        by_name = {e.geography: e for e in result.entries}
        assert len(by_name["A"].selected_point_ids) == 4
        assert len(by_name["B"].selected_point_ids) == 5
        assert all(i.startswith("a") for i in by_name["A"].selected_point_ids)


class TestEdgeCases:
    def test_disjoint_selection_empty(self, two_state_fixture):
        _, registry, index, _ = two_state_fixture
        selection = SelectionGeometry.from_rectangle(Rectangle(50, 50, 60, 60))
        assert compute_coverage(selection, index, registry).entries == ()

    def test_selection_covering_everything(self, two_state_fixture):
        _, registry, index, _ = two_state_fixture
        registry = registry + [state("Empty", 3, 0, 4, 1, total_points=0)]
        selection = SelectionGeometry.from_rectangle(Rectangle(-1, -1, 5, 2))
        result = compute_coverage(selection, index, registry)
        by_name = {e.geography: e for e in result.entries}
        assert by_name["A"].score == pytest.approx(1.0, abs=1e-9)
        assert by_name["B"].score == pytest.approx(1.0, abs=1e-9)
        # a geography with no data points can still earn the full area weight
        assert by_name["Empty"].score == pytest.approx(0.65, abs=1e-9)
        assert by_name["Empty"].p_points == 0.0

    def test_empty_registry_rejected(self, two_state_fixture):
        _, _, index, selection = two_state_fixture
        with pytest.raises(EmptyRegistry):
            compute_coverage(selection, index, [])

    def test_dataset_wide_denominator(self, two_state_fixture):
        _, registry, index, selection = two_state_fixture
        cfg = CoverageConfig(points_denominator="dataset", threshold=0.0)
        result = compute_coverage(selection, index, registry, cfg)
        by_name = {e.geography: e for e in result.entries}
        assert by_name["A"].p_points == pytest.approx(4 / 15, abs=1e-12)
        assert by_name["B"].p_points == pytest.approx(5 / 15, abs=1e-12)


class TestProperties:
    def _random_fixture(self, rng, n_geos=4, n_points=300):
        registry = []
        points = []
        x = -20.0
        for g in range(n_geos):
            width = rng.uniform(4, 10)
            name = f"G{g}"
            registry.append(state(name, x, -5, x + width, 5))
            n = int(rng.integers(10, n_points // n_geos))
            for i in range(n):
                points.append(GeoPoint(
                    f"{name}_p{i}",
                    LonLat(rng.uniform(x, x + width), rng.uniform(-5, 5)),
                    float(rng.uniform(0, 8)), EPOCH, admin_geography=name))
            x += width
        registry = [g.with_total_points(sum(1 for p in points if p.admin_geography == g.name))
                    for g in registry]
        return registry, points, build_quadtree(points)

    def test_scores_in_unit_interval(self):
        rng = np.random.default_rng(101)
        registry, _, index = self._random_fixture(rng)
        for _ in range(20):
            w = rng.uniform(-25, 20)
            s = rng.uniform(-8, 2)
            sel = SelectionGeometry.from_rectangle(
                Rectangle(w, s, w + rng.uniform(1, 25), s + rng.uniform(1, 8)))
            result = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.0))
            for e in result.entries:
                assert 0.0 <= e.p_area <= 1.0
                assert 0.0 <= e.p_points <= 1.0
                assert 0.0 <= e.score <= 1.0
                assert e.score == pytest.approx(
                    0.65 * e.p_area + 0.35 * e.p_points, abs=1e-12)

    def test_selection_monotonicity_nested_rectangles(self):
        rng = np.random.default_rng(202)
        registry, _, index = self._random_fixture(rng)
        for _ in range(20):
            w = rng.uniform(-22, 5)
            s = rng.uniform(-6, 0)
            inner = Rectangle(w, s, w + rng.uniform(2, 10), s + rng.uniform(2, 5))
            outer = Rectangle(inner.west - rng.uniform(0, 5), inner.south - rng.uniform(0, 3),
                              inner.east + rng.uniform(0, 5), inner.north + rng.uniform(0, 3))
            cfg = CoverageConfig(threshold=0.0)
            small = {e.geography: e for e in compute_coverage(
                SelectionGeometry.from_rectangle(inner), index, registry, cfg).entries}
            large = {e.geography: e for e in compute_coverage(
                SelectionGeometry.from_rectangle(outer), index, registry, cfg).entries}
            for name, entry in small.items():
                assert name in large
                assert large[name].p_area >= entry.p_area - 1e-12
                assert large[name].p_points >= entry.p_points - 1e-12
                assert large[name].score >= entry.score - 1e-12

    def test_threshold_soundness(self):
        rng = np.random.default_rng(303)
        registry, _, index = self._random_fixture(rng)
        sel = SelectionGeometry.from_rectangle(Rectangle(-15, -4, 5, 4))
        lower = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.1))
        higher = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.4))
        assert all(e.score >= 0.1 for e in lower.entries)
        assert all(e.score >= 0.4 for e in higher.entries)
        assert set(higher.entry_names()) <= set(lower.entry_names())

    def test_sort_contract(self):
        rng = np.random.default_rng(404)
        registry, _, index = self._random_fixture(rng, n_geos=6)
        sel = SelectionGeometry.from_rectangle(Rectangle(-20, -5, 20, 5))
        result = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.0))
        scores = [e.score for e in result.entries]
        assert scores == sorted(scores, reverse=True)
        for a, b in zip(result.entries, result.entries[1:]):
            if a.score == b.score:
                assert a.geography < b.geography

    def test_whole_domain_identity(self):
        rng = np.random.default_rng(505)
        registry, _, index = self._random_fixture(rng)
        west = min(g.shape.exterior[0].lon for g in registry) - 1
        sel = SelectionGeometry.from_rectangle(Rectangle(west - 1, -6, 40, 6))
        result = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.0))
        for e in result.entries:
            assert e.p_area == pytest.approx(1.0, rel=1e-6)

    def test_matches_brute_force_oracle(self):
        """Linear-scan point counts + Monte-Carlo areas reproduce every proportion."""
        rng = np.random.default_rng(606)
        registry, points, index = self._random_fixture(rng, n_geos=5, n_points=500)
        for _ in range(5):
            w = rng.uniform(-22, 5)
            s = rng.uniform(-6, 0)
            rect = Rectangle(w, s, w + rng.uniform(3, 20), s + rng.uniform(2, 8))
            sel = SelectionGeometry.from_rectangle(rect)
            result = compute_coverage(sel, index, registry, CoverageConfig(threshold=0.0))
            entries = {e.geography: e for e in result.entries}
            for g in registry:
                expected_count = sum(
                    1 for p in points
                    if p.admin_geography == g.name and rect.contains(p.position))
                if g.name not in entries:
                    continue
                e = entries[g.name]
                assert e.p_points == pytest.approx(
                    expected_count / g.total_points if g.total_points else 0.0, abs=1e-12)
                mc, sigma = mc_intersection_area(g.shape, sel.shape, 100_000, rng)
                assert e.p_area * g.total_area == pytest.approx(mc, abs=max(4 * sigma, 1e-3))
