"""Geospatial NL query engine: map-drawn cognitive regions, coverage scoring,
hexbin previews, and a grammar-driven autocompleting query language."""

from .coverage import (
    AdminGeography,
    CoverageConfig,
    CoverageEntry,
    CoverageResult,
    SelectionGeometry,
    compute_coverage,
    confidence_score,
)
from .dataset import Dataset, build_dataset, load_admin, load_points
from .errors import GeoRegionError
from .geometry import (
    LonLat,
    MultiPolygon,
    Polygon,
    Rectangle,
    point_in_polygon,
    points_in_polygon,
    polygon_area,
    polygon_intersection_area,
    project_equal_area,
    rectangle_to_polygon,
    validate_freehand,
)
from .hexbin import HexBin, HexGridSpec, aggregate_hexbins, assign_hex, hex_size_for_zoom
from .quadtree import GeoPoint, QuadTree, build_quadtree
from .query import (
    CompareQuery,
    Descriptor,
    ParseOutcome,
    ShowQuery,
    Suggestion,
    Vocabulary,
    apply_completion,
    compare_regions,
    execute,
    parse,
    resolve_descriptor,
    suggest_completions,
)
from .regions import NamedRegion, RegionStore

__version__ = "0.1.0"
