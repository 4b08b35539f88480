"""HTTP API tying the library together for interactive clients.

Every endpoint is a thin wrapper over a library call against an immutable
dataset snapshot; responses are plain JSON with geometry as GeoJSON.  Reads
(autocomplete, query, coverage, hexbins, meta) have no side effects, so
per-keystroke polling is safe; region mutations serialize through the store.

Errors come back as ``{code, message, position?}`` with 400 for malformed
requests, 404 for missing resources, and 422 for semantically invalid ones.
"""
from __future__ import annotations

import hashlib
import json
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .coverage import (
    CoverageConfig,
    CoverageResult,
    SelectionGeometry,
    compute_coverage,
)
from .dataset import Dataset, build_dataset
from .errors import (
    BadRequest,
    GeoRegionError,
    IncompleteQuery,
    InvalidQuery,
    UnknownCoverageToken,
    UnknownRegion,
    ValidationError,
)
from .geometry import Rectangle
from .hexbin import aggregate_hexbins
from .quadtree import GeoPoint
from .query import (
    ComparisonStats,
    Vocabulary,
    execute,
    parse,
    region_stats,
)
from .regions import RegionStore

API_PREFIX = "/api"
COVERAGE_CACHE_SIZE = 128


@dataclass
class ServiceConfig:
    points_path: str
    admin_path: str
    regions_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    coverage: CoverageConfig = field(default_factory=CoverageConfig)
    ui_dir: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValidationError(f"port must be in [1, 65535], got {self.port}")


class _Resolver:
    """Saved regions first, then bare admin geography names."""

    def __init__(self, store: RegionStore, geography_names):
        self._store = store
        self._geos = {name.lower(): name for name in geography_names}

    def resolve_region(self, name: str) -> Optional[frozenset]:
        resolved = self._store.resolve_region(name)
        if resolved is not None:
            return resolved
        canonical = self._geos.get((name or "").strip().lower())
        if canonical is not None:
            return frozenset({canonical})
        return None


def coverage_token(selection: SelectionGeometry, cfg: CoverageConfig) -> str:
    """Deterministic fingerprint of a coverage request (selection + config)."""
    doc = {
        "kind": selection.kind,
        "selection": selection.to_geojson(),
        "weight_area": cfg.weight_area,
        "weight_points": cfg.weight_points,
        "threshold": cfg.threshold,
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _point_json(p: GeoPoint) -> dict:
    return {
        "id": p.id,
        "lon": p.position.lon,
        "lat": p.position.lat,
        "magnitude": p.magnitude,
        "time": p.timestamp.isoformat(),
        "geography": p.admin_geography,
    }


def _stats_json(stats: ComparisonStats) -> dict:
    return {
        "name": stats.name,
        "count": stats.count,
        "min": stats.min,
        "max": stats.max,
        "mean": stats.mean,
    }


def _suggestions_json(outcome) -> list[dict]:
    out = []
    for s in outcome.suggestions:
        item = {"kind": s.kind, "rank": s.rank}
        if s.text is not None:
            item["text"] = s.text
        out.append(item)
    return out


def _require(payload: dict, key: str, types, what: str):
    value = payload.get(key)
    if not isinstance(value, types):
        raise BadRequest(f"request body needs {key!r} as {what}")
    return value


def create_app(dataset: Dataset, store: RegionStore,
               defaults: CoverageConfig = CoverageConfig(),
               ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="georegion", docs_url=None, redoc_url=None)
    cache: OrderedDict[str, CoverageResult] = OrderedDict()

    def vocabulary() -> Vocabulary:
        return Vocabulary(
            regions=tuple(store.region_names()),
            geographies=tuple(dataset.geography_names),
        )

    def resolver() -> _Resolver:
        return _Resolver(store, dataset.geography_names)

    @app.exception_handler(GeoRegionError)
    async def domain_error(request: Request, exc: GeoRegionError):
        if isinstance(exc, UnknownRegion) and request.url.path.startswith(
                f"{API_PREFIX}/regions"):
            status = 404
        elif isinstance(exc, BadRequest):
            status = 400
        else:
            status = 422
        return JSONResponse(status_code=status, content=exc.payload())

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "BadRequest", "message": str(exc.errors()[:1])},
        )

    # -- reads ---------------------------------------------------------------

    @app.get(f"{API_PREFIX}/autocomplete")
    def autocomplete(q: str = Query(default="")):
        outcome = parse(q, vocabulary())
        return {
            "status": outcome.status,
            "suggestions": _suggestions_json(outcome),
            "widget": "map" if outcome.wants_widget else None,
        }

    @app.get(f"{API_PREFIX}/meta")
    def meta():
        b = dataset.bounds
        t = dataset.thresholds
        return {
            "bounds": {"west": b.west, "south": b.south, "east": b.east, "north": b.north},
            "point_count": dataset.index.count,
            "geography_names": dataset.geography_names,
            "descriptor_thresholds": {
                "large": t.large_min,
                "small": t.small_max,
                "recent": t.recent_min.isoformat(),
            },
        }

    @app.get(f"{API_PREFIX}/hexbins")
    def hexbins(west: float, south: float, east: float, north: float,
                zoom: int, hex_size: Optional[float] = None):
        viewport = Rectangle(west, south, east, north)
        bins = aggregate_hexbins(dataset.points, viewport, zoom, hex_size)
        return {"bins": [{"lon": b.center.lon, "lat": b.center.lat, "count": b.count}
                         for b in bins]}

    @app.post(f"{API_PREFIX}/query")
    def run_query(payload: dict = Body(...)):
        text = _require(payload, "text", str, "a string")
        outcome = parse(text, vocabulary())
        if outcome.is_partial:
            raise IncompleteQuery(
                "query is incomplete; accept a suggestion or finish typing")
        if outcome.is_invalid:
            if outcome.reason == "unknown-region":
                raise UnknownRegion(outcome.message or "unknown region",
                                    position=outcome.position)
            raise InvalidQuery(outcome.message or "query does not parse",
                               position=outcome.position)
        result = execute(outcome.ast, dataset.points, dataset.index, resolver(),
                         thresholds=dataset.thresholds)
        if result.kind == "compare":
            return {
                "kind": "compare",
                "left": _stats_json(result.left),
                "right": _stats_json(result.right),
            }
        return {
            "kind": "show",
            "points": [_point_json(p) for p in result.points],
            "filters": list(result.filters),
        }

    @app.post(f"{API_PREFIX}/coverage")
    def coverage(payload: dict = Body(...)):
        geometry = _require(payload, "selection", dict, "a GeoJSON Polygon")
        kind = payload.get("kind", "freehand")
        selection = SelectionGeometry.from_geojson(geometry, kind)
        cfg_kwargs = {}
        if "threshold" in payload:
            cfg_kwargs["threshold"] = float(payload["threshold"])
        if "weight_area" in payload or "weight_points" in payload:
            wa = float(payload.get("weight_area", defaults.weight_area))
            wp = float(payload.get("weight_points", round(1.0 - wa, 12)))
            cfg_kwargs.update(weight_area=wa, weight_points=wp)
        cfg = CoverageConfig(
            weight_area=cfg_kwargs.get("weight_area", defaults.weight_area),
            weight_points=cfg_kwargs.get("weight_points", defaults.weight_points),
            threshold=cfg_kwargs.get("threshold", defaults.threshold),
            points_denominator=defaults.points_denominator,
        )
        result = compute_coverage(selection, dataset.index, list(dataset.registry), cfg)
        token = coverage_token(selection, cfg)
        cache[token] = result
        while len(cache) > COVERAGE_CACHE_SIZE:
            cache.popitem(last=False)
        return {
            "entries": [
                {"geography": e.geography, "p_area": e.p_area,
                 "p_points": e.p_points, "score": e.score}
                for e in result.entries
            ],
            "token": token,
        }

    @app.post(f"{API_PREFIX}/compare")
    def compare(payload: dict = Body(...)):
        left_name = _require(payload, "left", str, "a region name")
        right_name = _require(payload, "right", str, "a region name")
        res = resolver()
        left_geos = res.resolve_region(left_name)
        right_geos = res.resolve_region(right_name)
        if left_geos is None:
            raise UnknownRegion(f"unknown region {left_name!r}")
        if right_geos is None:
            raise UnknownRegion(f"unknown region {right_name!r}")
        return {
            "left": _stats_json(region_stats(left_name, left_geos, dataset.points)),
            "right": _stats_json(region_stats(right_name, right_geos, dataset.points)),
        }

    # -- region persistence ----------------------------------------------------

    @app.get(f"{API_PREFIX}/regions")
    def list_regions():
        return {"regions": [RegionStore.region_record(r) for r in store.list_regions()]}

    @app.post(f"{API_PREFIX}/regions")
    def save_region(payload: dict = Body(...)):
        name = _require(payload, "name", str, "a string")
        geometry = _require(payload, "selection", dict, "a GeoJSON Polygon")
        kind = payload.get("kind", "freehand")
        included = payload.get("included")
        if included is not None and not isinstance(included, list):
            raise BadRequest("request body needs 'included' as a list of names")
        token = payload.get("coverage_token")

        selection = SelectionGeometry.from_geojson(geometry, kind)
        result = cache.get(token) if token else None
        if result is None:
            recomputed_token = coverage_token(selection, defaults)
            if token is not None and token != recomputed_token:
                raise UnknownCoverageToken(
                    "coverage token does not match this selection; re-run coverage")
            result = compute_coverage(selection, dataset.index,
                                      list(dataset.registry), defaults)
        region = store.save_region(name, selection, result, included)
        return RegionStore.region_record(region)

    @app.delete(f"{API_PREFIX}/regions/{{name}}", status_code=204)
    def delete_region(name: str):
        store.delete_region(name)

    @app.post(f"{API_PREFIX}/regions/{{name}}/remove")
    def remove_geography(name: str, payload: dict = Body(...)):
        geography = _require(payload, "geography", str, "a string")
        region = store.remove_geography(name, geography)
        return RegionStore.region_record(region)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def build_app(config: ServiceConfig) -> FastAPI:
    """Load data files per the config and assemble the application."""
    dataset = build_dataset(config.points_path, config.admin_path)
    store = RegionStore(config.regions_path)
    return create_app(dataset, store, config.coverage, config.ui_dir)


def serve(config: ServiceConfig) -> None:
    """Run until interrupted; region writes are durable per-operation."""
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
