"""Command-line interface: serve the API, or run desk-scale batch checks.

    georegion serve       --points pts.csv --admin states.geojson --regions store.json
    georegion coverage    --points ... --admin ... --selection sel.geojson
    georegion validate    --points ... --admin ... [--regions ...]
    georegion report      --points ... --admin ... --selection sel.geojson --out-dir out/
    georegion sample-data --out-dir data/ [--points 10000 --seed 0]

``coverage`` prints the ranked table as JSON on stdout; ``report`` writes the
same table as CSV/JSON next to rendered PNG figures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import sampledata
from .coverage import CoverageConfig, SelectionGeometry, compute_coverage
from .dataset import build_dataset
from .errors import GeoRegionError, InvalidGeoJSON
from .regions import RegionStore


def _data_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--points", required=True, help="points CSV path")
    sub.add_argument("--admin", required=True, help="admin geographies GeoJSON path")


def _coverage_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--selection", required=True,
                     help="GeoJSON file with the selection Polygon")
    sub.add_argument("--kind", choices=["rectangle", "freehand"], default="freehand")
    sub.add_argument("--threshold", type=float, default=None)
    sub.add_argument("--weight-area", type=float, default=None)
    sub.add_argument("--weight-points", type=float, default=None)


def _config_from_args(args) -> CoverageConfig:
    base = CoverageConfig()
    weight_area = base.weight_area if args.weight_area is None else args.weight_area
    if args.weight_points is not None:
        weight_points = args.weight_points
    elif args.weight_area is not None:
        weight_points = round(1.0 - weight_area, 12)
    else:
        weight_points = base.weight_points
    threshold = base.threshold if args.threshold is None else args.threshold
    return CoverageConfig(weight_area=weight_area, weight_points=weight_points,
                          threshold=threshold)


def _load_selection(path: str, kind: str) -> SelectionGeometry:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidGeoJSON(f"cannot read selection file {path}: {exc}") from exc
    if isinstance(doc, dict) and doc.get("type") == "FeatureCollection":
        features = doc.get("features") or []
        if len(features) != 1:
            raise InvalidGeoJSON("selection FeatureCollection must hold exactly one feature")
        doc = features[0]
    if isinstance(doc, dict) and doc.get("type") == "Feature":
        doc = doc.get("geometry") or {}
    return SelectionGeometry.from_geojson(doc, kind)


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig(
        points_path=args.points,
        admin_path=args.admin,
        regions_path=args.regions,
        host=args.host,
        port=args.port,
        coverage=_config_from_args(args),
        ui_dir=args.ui_dir,
    )
    try:
        serve(config)
    except OSError as exc:
        print(json.dumps({"code": "PortInUse", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


def _cmd_coverage(args) -> int:
    dataset = build_dataset(args.points, args.admin)
    selection = _load_selection(args.selection, args.kind)
    result = compute_coverage(selection, dataset.index, list(dataset.registry),
                              _config_from_args(args))
    print(json.dumps({
        "entries": [
            {"geography": e.geography, "p_area": e.p_area,
             "p_points": e.p_points, "score": e.score}
            for e in result.entries
        ],
    }, indent=2))
    return 0


def _cmd_validate(args) -> int:
    dataset = build_dataset(args.points, args.admin)
    summary = {
        "points": dataset.index.count,
        "skipped_rows": dataset.skipped_rows,
        "geographies": len(dataset.registry),
        "unassigned_points": sum(1 for p in dataset.points
                                 if p.admin_geography == "none"),
    }
    if args.regions:
        store = RegionStore(args.regions)
        summary["regions"] = len(store.list_regions())
    print(json.dumps({"ok": True, **summary}, indent=2))
    return 0


def _cmd_report(args) -> int:
    from .report import render_report

    dataset = build_dataset(args.points, args.admin)
    selection = _load_selection(args.selection, args.kind)
    result = compute_coverage(selection, dataset.index, list(dataset.registry),
                              _config_from_args(args))
    written = render_report(dataset, result, args.out_dir, zoom=args.zoom)
    for path in written:
        print(path)
    return 0


def _cmd_sample_data(args) -> int:
    out = Path(args.out_dir)
    points = sampledata.write_points_csv(out / "points.csv", n=args.points, seed=args.seed)
    states = sampledata.write_states_geojson(out / "states.geojson", seed=args.seed)
    # a ready-made selection roughly covering one western state
    cell = sampledata.state_cell_bounds("California")
    pad = sampledata.JITTER_DEG + 0.05
    selection = {
        "type": "Polygon",
        "coordinates": [[
            [cell.west - pad, cell.south - pad],
            [cell.east + pad, cell.south - pad],
            [cell.east + pad, cell.north + pad],
            [cell.west - pad, cell.north + pad],
            [cell.west - pad, cell.south - pad],
        ]],
    }
    sel_path = out / "selection.geojson"
    sel_path.write_text(json.dumps(selection))
    for path in (points, states, sel_path):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="georegion",
        description="Geospatial NL query engine with map-drawn cognitive regions")
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="run the HTTP API")
    _data_flags(serve_p)
    serve_p.add_argument("--regions", required=True, help="region store JSON path")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--weight-area", type=float, default=None)
    serve_p.add_argument("--weight-points", type=float, default=None)
    serve_p.add_argument("--threshold", type=float, default=None)
    serve_p.add_argument("--ui-dir", default=None, help="static frontend directory")
    serve_p.set_defaults(func=_cmd_serve)

    cov_p = sub.add_parser("coverage", help="score a selection and print JSON")
    _data_flags(cov_p)
    _coverage_flags(cov_p)
    cov_p.set_defaults(func=_cmd_coverage)

    val_p = sub.add_parser("validate", help="check data files and exit")
    _data_flags(val_p)
    val_p.add_argument("--regions", default=None)
    val_p.set_defaults(func=_cmd_validate)

    rep_p = sub.add_parser("report", help="write coverage CSV/JSON plus figures")
    _data_flags(rep_p)
    _coverage_flags(rep_p)
    rep_p.add_argument("--out-dir", required=True)
    rep_p.add_argument("--zoom", type=int, default=5)
    rep_p.set_defaults(func=_cmd_report)

    sample_p = sub.add_parser("sample-data", help="generate synthetic fixtures")
    sample_p.add_argument("--out-dir", required=True)
    sample_p.add_argument("--points", type=int, default=10_000)
    sample_p.add_argument("--seed", type=int, default=0)
    sample_p.set_defaults(func=_cmd_sample_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GeoRegionError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"code": "FileNotFound", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
