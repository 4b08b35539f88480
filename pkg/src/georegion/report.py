"""Batch report rendering: delimited coverage tables plus map figures.

Given a dataset and a selection this writes, side by side in one directory:

* ``coverage.csv`` / ``coverage.json`` -- the ranked coverage table
* ``coverage_map.png``   -- geographies shaded by confidence score with the
  selection outline and the captured points
* ``coverage_scores.png`` -- score bars against the retention threshold
* ``hexbin_preview.png`` -- the widget's data preview, count dual-encoded
  as hexagon color and size

Figures render headless (Agg); paths of everything written are returned.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import PatchCollection
from matplotlib.patches import Polygon as MplPolygon

from .coverage import CoverageResult
from .dataset import Dataset
from .geometry import MultiPolygon, project_equal_area
from .hexbin import aggregate_hexbins, grid_for_viewport

SCORE_CMAP = "YlOrRd"
COUNT_CMAP = "viridis"


def _polygon_parts(shape):
    return shape.parts if isinstance(shape, MultiPolygon) else (shape,)


def _ring_lonlat(ring) -> np.ndarray:
    return np.array([[v.lon, v.lat] for v in ring])


def write_coverage_table(result: CoverageResult, out_dir: Path) -> list[Path]:
    csv_path = out_dir / "coverage.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["geography", "p_area", "p_points", "score", "selected_points"])
        for e in result.entries:
            writer.writerow([e.geography, f"{e.p_area:.6f}", f"{e.p_points:.6f}",
                             f"{e.score:.6f}", len(e.selected_point_ids)])
    json_path = out_dir / "coverage.json"
    json_path.write_text(json.dumps({
        "config": {
            "weight_area": result.config.weight_area,
            "weight_points": result.config.weight_points,
            "threshold": result.config.threshold,
        },
        "entries": [
            {"geography": e.geography, "p_area": e.p_area,
             "p_points": e.p_points, "score": e.score,
             "selected_points": len(e.selected_point_ids)}
            for e in result.entries
        ],
    }, indent=2))
    return [csv_path, json_path]


def render_coverage_map(dataset: Dataset, result: CoverageResult,
                        out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(10, 7))
    scores = {e.geography: e.score for e in result.entries}
    cmap = plt.get_cmap(SCORE_CMAP)

    for geo in dataset.registry:
        score = scores.get(geo.name)
        face = cmap(score) if score is not None else (0.93, 0.93, 0.93, 1.0)
        for part in _polygon_parts(geo.shape):
            ax.fill(*_ring_lonlat(part.exterior).T, facecolor=face,
                    edgecolor="0.4", linewidth=0.5, zorder=1)
        if score is not None:
            x0, y0, x1, y1 = geo.shape.bounds_xy
            cx = math.degrees((x0 + x1) / 2)
            cy = math.degrees(math.asin(max(-1.0, min(1.0, (y0 + y1) / 2))))
            ax.annotate(f"{geo.name}\n{score:.2f}", (cx, cy), ha="center",
                        va="center", fontsize=7, zorder=4)

    lons = [p.position.lon for p in dataset.points]
    lats = [p.position.lat for p in dataset.points]
    ax.plot(lons, lats, ".", color="0.55", markersize=1.5, alpha=0.4, zorder=2)

    selected_ids = set().union(*[e.selected_point_ids for e in result.entries]) \
        if result.entries else set()
    if selected_ids:
        sel_pts = [p for p in dataset.points if p.id in selected_ids]
        ax.plot([p.position.lon for p in sel_pts], [p.position.lat for p in sel_pts],
                ".", color="tab:blue", markersize=2.5, alpha=0.8, zorder=3)

    sel_ring = _ring_lonlat(result.selection.shape.exterior)
    closed = np.vstack([sel_ring, sel_ring[:1]])
    ax.plot(closed[:, 0], closed[:, 1], color="tab:red", linewidth=2.0, zorder=5,
            label=f"selection ({result.selection.kind})")

    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(0, 1))
    fig.colorbar(sm, ax=ax, shrink=0.75, label="confidence score")
    ax.set_xlabel("longitude")
    ax.set_ylabel("latitude")
    ax.set_title("Selection coverage by admin geography")
    ax.legend(loc="lower left", fontsize=8)
    ax.set_aspect("auto")
    path = out_dir / "coverage_map.png"
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_score_bars(result: CoverageResult, out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.45 * len(result.entries) + 1.2)))
    names = [e.geography for e in result.entries][::-1]
    scores = [e.score for e in result.entries][::-1]
    cmap = plt.get_cmap(SCORE_CMAP)
    ax.barh(names, scores, color=[cmap(s) for s in scores], edgecolor="0.3")
    ax.axvline(result.config.threshold, color="0.2", linestyle="--", linewidth=1,
               label=f"threshold {result.config.threshold:g}")
    ax.set_xlim(0, 1)
    ax.set_xlabel("confidence score")
    ax.set_title("Coverage ranking")
    ax.legend(loc="lower right", fontsize=8)
    path = out_dir / "coverage_scores.png"
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_hexbin_preview(dataset: Dataset, out_dir: Path, zoom: int = 5) -> Path:
    viewport = dataset.bounds
    bins = aggregate_hexbins(dataset.points, viewport, zoom)
    grid = grid_for_viewport(viewport, zoom)
    fig, ax = plt.subplots(figsize=(10, 7))
    if bins:
        max_count = max(b.count for b in bins)
        cmap = plt.get_cmap(COUNT_CMAP)
        patches, colors = [], []
        angles = np.radians(90 + 60 * np.arange(6))     # pointy-top
        for b in bins:
            cx, cy = project_equal_area(b.center)
            scale = 0.35 + 0.65 * (b.count / max_count)
            radius = grid.hex_size * scale
            verts = np.column_stack([cx + radius * np.cos(angles),
                                     cy + radius * np.sin(angles)])
            patches.append(MplPolygon(verts, closed=True))
            colors.append(b.count)
        coll = PatchCollection(patches, cmap=cmap, edgecolor="none", alpha=0.9)
        coll.set_array(np.array(colors))
        ax.add_collection(coll)
        fig.colorbar(coll, ax=ax, shrink=0.75, label="points per cell")
    x0, y0, x1, y1 = viewport.projected_bounds()
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_xlabel("projected x (lon, radians)")
    ax.set_ylabel("projected y (sin lat)")
    ax.set_title(f"Hexbin data preview (zoom {zoom}, {len(bins)} cells)")
    path = out_dir / "hexbin_preview.png"
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def render_report(dataset: Dataset, result: CoverageResult, out_dir: str | Path,
                  zoom: int = 5) -> list[Path]:
    """Write the full report bundle and return every path produced."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = write_coverage_table(result, out)
    written.append(render_coverage_map(dataset, result, out))
    written.append(render_score_bars(result, out))
    written.append(render_hexbin_preview(dataset, out, zoom))
    return written
