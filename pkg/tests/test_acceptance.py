"""Acceptance suite: every release criterion at its pinned tolerance.

Each test prints one [PASS]/[FAIL] line (visible with ``pytest -s``) and
enforces its runtime budget.  Oracles here are independent of the library:
linear scans, analytic areas, Monte-Carlo sampling, and brute-force grouping.
"""
import math
import time
from contextlib import contextmanager
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
from georegion.geometry import (
    LonLat,
    Rectangle,
    points_in_polygon,
    polygon_area,
    polygon_intersection_area,
    rectangle_to_polygon,
)
from georegion.hexbin import aggregate_hexbins, hex_size_for_zoom
from georegion.quadtree import GeoPoint, build_quadtree
from georegion.query import (
    CompareQuery,
    Descriptor,
    NamedRegionRef,
    ShowQuery,
    Vocabulary,
    apply_completion,
    parse,
)

from helpers import mc_intersection_area, random_simple_polygon

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


@contextmanager
def criterion(name: str, limit_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= limit_seconds:
        print(f"[FAIL] {name} (runtime {elapsed:.2f}s >= {limit_seconds:g}s)")
        pytest.fail(f"{name}: runtime {elapsed:.2f}s exceeds {limit_seconds:g}s budget")
    print(f"[PASS] {name} ({elapsed:.2f}s < {limit_seconds:g}s)")


def test_eq1_constants():
    with criterion("Eq.1 constants and defaults", 1.0):
        assert abs(confidence_score(0.5, 0.4) - 0.465) <= 1e-12
        cfg = CoverageConfig()
        assert cfg.weight_area == 0.65
        assert cfg.weight_points == 0.35
        assert cfg.threshold == 0.2


def test_algorithm_end_to_end_fixture():
    with criterion("Coverage end-to-end two-state fixture", 1.0):
        a_pts = [GeoPoint(f"a{i}", LonLat(lon, 0.5), 1.0, EPOCH, admin_geography="A")
                 for i, lon in enumerate(
                     [0.1, 0.2, 0.3, 0.35, 0.4, 0.45, 0.6, 0.7, 0.8, 0.9])]
        b_pts = [GeoPoint(f"b{i}", LonLat(lon, 0.5), 1.0, EPOCH, admin_geography="B")
                 for i, lon in enumerate([1.05, 1.15, 1.25, 1.35, 1.45])]
        registry = [
            AdminGeography("A", rectangle_to_polygon(Rectangle(0, 0, 1, 1)),
                           total_points=10),
            AdminGeography("B", rectangle_to_polygon(Rectangle(1, 0, 2, 1)),
                           total_points=5),
        ]
        index = build_quadtree(a_pts + b_pts)
        selection = SelectionGeometry.from_rectangle(Rectangle(0.5, 0, 1.5, 1))

        result = compute_coverage(selection, index, registry)
        assert [e.geography for e in result.entries] == ["B", "A"]
        assert abs(result.entries[0].score - 0.675) <= 1e-9
        assert abs(result.entries[1].score - 0.465) <= 1e-9
        assert all(e.score >= 0.2 for e in result.entries)

        raised = compute_coverage(selection, index, registry,
                                  CoverageConfig(threshold=0.5))
        assert [e.geography for e in raised.entries] == ["B"]


def test_quadtree_oracle_suite():
    with criterion("Quadtree vs linear-scan oracle", 30.0):
        rng = np.random.default_rng(2024)
        points = [GeoPoint(f"p{i}", LonLat(rng.uniform(-40, 40), rng.uniform(-30, 30)),
                           float(rng.uniform(0, 8)), EPOCH)
                  for i in range(1000)]
        tree = build_quadtree(points)
        lons = np.array([p.position.lon for p in points])
        lats = np.array([p.position.lat for p in points])

        mismatches = 0
        for _ in range(100):
            w = rng.uniform(-45, 35)
            s = rng.uniform(-35, 25)
            rect = Rectangle(w, s, w + rng.uniform(0.5, 40), s + rng.uniform(0.5, 30))
            expected = {p.id for p in points if rect.contains(p.position)}
            if tree.query_rectangle(rect) != expected:
                mismatches += 1

        for _ in range(50):
            poly = random_simple_polygon(
                rng, center=(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4)),
                radius=rng.uniform(0.1, 0.35))
            inside = points_in_polygon(lons, lats, poly)
            expected = {p.id for p, ok in zip(points, inside) if ok}
            if tree.query_polygon(poly) != expected:
                mismatches += 1
        assert mismatches == 0


def test_geometry_oracle_suite():
    with criterion("Intersection area vs Monte-Carlo oracle", 60.0):
        rng = np.random.default_rng(777)
        for _ in range(50):
            a = random_simple_polygon(rng, center=(0.0, 0.0), radius=rng.uniform(0.15, 0.4))
            b = random_simple_polygon(
                rng, center=(rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1)),
                radius=rng.uniform(0.15, 0.4))
            got = polygon_intersection_area(a, b)
            estimate, sigma = mc_intersection_area(a, b, 100_000, rng)
            assert abs(got - estimate) <= max(3 * sigma, 1e-9), \
                f"MC {estimate} +- {sigma} vs clipped {got}"

        # analytic rectangle cases, exact to 1e-9 in projected units
        unit = Rectangle(0, 0, 10, 10)
        half = Rectangle(5, 0, 15, 10)
        area_unit = polygon_area(rectangle_to_polygon(unit))
        overlap = polygon_intersection_area(
            rectangle_to_polygon(unit), rectangle_to_polygon(half))
        analytic = (math.radians(10) - math.radians(5)) * (
            math.sin(math.radians(10)) - math.sin(math.radians(0)))
        assert abs(overlap - analytic) <= 1e-9
        disjoint = polygon_intersection_area(
            rectangle_to_polygon(unit), rectangle_to_polygon(Rectangle(20, 0, 30, 10)))
        assert disjoint == 0.0
        identical = polygon_intersection_area(
            rectangle_to_polygon(unit), rectangle_to_polygon(unit))
        assert abs(identical - area_unit) <= 1e-9


def test_coverage_monotonicity():
    with criterion("Coverage monotonic in selection growth", 10.0):
        rng = np.random.default_rng(31415)
        for trial in range(20):
            registry = []
            points = []
            x = -20.0
            for g in range(4):
                width = rng.uniform(4, 9)
                name = f"G{g}"
                shape = rectangle_to_polygon(Rectangle(x, -5, x + width, 5))
                n = int(rng.integers(5, 40))
                for i in range(n):
                    points.append(GeoPoint(
                        f"t{trial}_{name}_{i}",
                        LonLat(rng.uniform(x, x + width), rng.uniform(-5, 5)),
                        float(rng.uniform(0, 8)), EPOCH, admin_geography=name))
                registry.append(AdminGeography(name, shape, total_points=n))
                x += width
            index = build_quadtree(points)

            w = rng.uniform(-22, 0)
            s = rng.uniform(-6, -1)
            inner = Rectangle(w, s, w + rng.uniform(2, 12), s + rng.uniform(2, 6))
            outer = Rectangle(inner.west - rng.uniform(0, 4),
                              inner.south - rng.uniform(0, 2),
                              inner.east + rng.uniform(0, 4),
                              inner.north + rng.uniform(0, 2))
            cfg = CoverageConfig(threshold=0.0)
            small = {e.geography: e for e in compute_coverage(
                SelectionGeometry.from_rectangle(inner), index, registry, cfg).entries}
            large = {e.geography: e for e in compute_coverage(
                SelectionGeometry.from_rectangle(outer), index, registry, cfg).entries}
            for name, entry in small.items():
                grown = large[name]
                assert grown.p_area >= entry.p_area - 1e-12
                assert grown.p_points >= entry.p_points - 1e-12
                assert grown.score >= entry.score - 1e-12


def test_parser_suite():
    with criterion("Parser: quoted queries, liveness, completion soundness", 10.0):
        vocab = Vocabulary(
            regions=("west", "east", "midwest", "the deep south", "west coast"),
            geographies=("California", "Nevada", "New York"),
        )

        outcome = parse("large earthquakes in", vocab)
        assert outcome.is_partial
        assert outcome.wants_widget
        assert "west" in [s.text for s in outcome.suggestions if s.kind == "text"]

        outcome = parse("compare the west and the east", vocab)
        assert outcome.is_complete
        assert outcome.ast == CompareQuery("west", "east")

        outcome = parse("what are the recent ones in the midwest?", vocab)
        assert outcome.is_complete
        assert outcome.ast == ShowQuery((Descriptor.RECENT,), NamedRegionRef("midwest"))

        rng = np.random.default_rng(123)
        region_pool = list(vocab.regions) + list(vocab.geographies)

        def sample_query():
            if rng.random() < 0.4:
                left, right = rng.choice(region_pool, size=2, replace=False)
                conn = rng.choice(["and", "with", "to"])
                art = "the " if rng.random() < 0.5 else ""
                return f"compare {art}{left} {conn} {art}{right}"
            intro = rng.choice(["", "show me ", "what are the "])
            desc = " ".join(rng.choice(["large", "small", "recent", "big"],
                                       size=rng.integers(0, 3), replace=False))
            entity = rng.choice(["earthquakes", "ones", "them"])
            text = f"{intro}{desc + ' ' if desc else ''}{entity}"
            if rng.random() < 0.7:
                art = "the " if rng.random() < 0.5 else ""
                text += f" {rng.choice(['in', 'near', 'around'])} {art}{rng.choice(region_pool)}"
            return text

        for _ in range(50):
            query = sample_query()
            assert not parse(query, vocab).is_invalid, query
            for cut in range(len(query)):
                prefix = query[:cut]
                outcome = parse(prefix, vocab)
                assert not outcome.is_invalid, f"{query!r} invalid at {prefix!r}"
                for s in outcome.suggestions:
                    if s.kind != "text":
                        continue
                    extended = apply_completion(prefix, s.text)
                    assert not parse(extended, vocab).is_invalid, \
                        f"completion {s.text!r} broke {prefix!r}"


def test_hexbin_conservation():
    with criterion("Hexbin count conservation and zoom monotonicity", 10.0):
        rng = np.random.default_rng(999)
        for _ in range(100):
            n = int(rng.integers(50, 400))
            points = [GeoPoint(f"h{i}", LonLat(rng.uniform(-60, 60), rng.uniform(-50, 50)),
                               1.0, EPOCH)
                      for i in range(n)]
            w = rng.uniform(-65, 30)
            s = rng.uniform(-55, 25)
            viewport = Rectangle(w, s, w + rng.uniform(5, 60), s + rng.uniform(5, 50))
            zoom = int(rng.integers(0, 23))
            bins = aggregate_hexbins(points, viewport, zoom)
            in_viewport = sum(1 for p in points if viewport.contains(p.position))
            assert sum(b.count for b in bins) == in_viewport

        viewport = Rectangle(-60, -40, 60, 40)
        sizes = [hex_size_for_zoom(z, viewport) for z in range(23)]
        assert all(a > b for a, b in zip(sizes, sizes[1:]))


def test_persistence(tmp_path):
    with criterion("Region persistence and atomic writes", 5.0):
        import os
        from georegion.regions import RegionStore

        registry = [
            AdminGeography("A", rectangle_to_polygon(Rectangle(0, 0, 1, 1)), total_points=1),
            AdminGeography("B", rectangle_to_polygon(Rectangle(1, 0, 2, 1)), total_points=1),
        ]
        points = [
            GeoPoint("p1", LonLat(0.5, 0.5), 2.0, EPOCH, admin_geography="A"),
            GeoPoint("p2", LonLat(1.5, 0.5), 3.0, EPOCH, admin_geography="B"),
        ]
        index = build_quadtree(points)
        selection = SelectionGeometry.from_rectangle(Rectangle(0, 0, 2, 1))
        coverage = compute_coverage(selection, index, registry)

        path = tmp_path / "regions.json"
        store = RegionStore(path)
        saved = store.save_region("the west", selection, coverage, included={"A", "B"})

        reloaded = RegionStore(path)
        assert reloaded.get_region("the west") == saved

        before = path.read_text()
        real_replace = os.replace
        os.replace = lambda src, dst: (_ for _ in ()).throw(
            OSError("simulated crash between temp write and rename"))
        try:
            with pytest.raises(OSError):
                store.save_region("doomed", selection, coverage)
        finally:
            os.replace = real_replace
        assert path.read_text() == before
        assert not list(tmp_path.glob("*.tmp"))
        assert RegionStore(path).region_names() == ["the west"]


def test_desk_scale_load(tmp_path):
    from fastapi.testclient import TestClient

    from georegion import sampledata
    from georegion.dataset import build_dataset
    from georegion.geometry import geometry_to_geojson
    from georegion.regions import RegionStore
    from georegion.service import create_app

    # fixture generation is setup, not part of the timed request path
    points_path = sampledata.write_points_csv(tmp_path / "points.csv", n=10_000, seed=11)
    admin_path = sampledata.write_states_geojson(tmp_path / "states.geojson", seed=11)
    cell = sampledata.state_cell_bounds("California")
    pad = sampledata.JITTER_DEG + 0.05
    selection_geojson = geometry_to_geojson(rectangle_to_polygon(Rectangle(
        max(cell.west - pad, -180), max(cell.south - pad, -90),
        cell.east + pad, cell.north + pad)))

    with criterion("Desk-scale load + /coverage round trip", 2.0):
        dataset = build_dataset(points_path, admin_path)
        assert dataset.index.count == 10_000
        app = create_app(dataset, RegionStore(tmp_path / "regions.json"))
        client = TestClient(app)
        resp = client.post("/api/coverage", json={
            "selection": selection_geojson, "kind": "rectangle"})
        assert resp.status_code == 200
        entries = resp.json()["entries"]
        assert entries
        assert entries[0]["geography"] == "California"
        assert entries[0]["p_area"] == pytest.approx(1.0, abs=1e-6)
