"""Persistent store for named cognitive regions.

A region is the user's drawn selection, the coverage snapshot it produced,
and the curated subset of geographies the user kept.  The snapshot is stored
as computed, never recomputed on load, so analytics stay consistent even if
the dataset or weights change later.

Storage is a single JSON document, written atomically (temp file in the same
directory, then rename) so a crash can never leave a truncated store behind.
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from .coverage import (
    CoverageConfig,
    CoverageEntry,
    CoverageResult,
    SelectionGeometry,
)
from .errors import (
    DuplicateName,
    GeographyNotIncluded,
    InvalidName,
    UnknownGeographyInIncludedSet,
    UnknownRegion,
    ValidationError,
)
from .geometry import geometry_from_geojson, geometry_to_geojson

STORE_VERSION = 1
MAX_NAME_LENGTH = 64


@dataclass(frozen=True)
class NamedRegion:
    """A saved cognitive region, keyed case-insensitively by name."""

    name: str
    created_at: datetime
    last_used_at: datetime
    selection: SelectionGeometry
    coverage: CoverageResult
    included_geographies: frozenset[str]

    @property
    def key(self) -> str:
        return self.name.lower()


def _now() -> datetime:
    return datetime.now(timezone.utc)


def _parse_instant(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _validated_name(name: str) -> str:
    trimmed = (name or "").strip()
    if not trimmed:
        raise InvalidName("region name must be non-empty")
    if len(trimmed) > MAX_NAME_LENGTH:
        raise InvalidName(f"region name exceeds {MAX_NAME_LENGTH} characters")
    return trimmed


def _snapshot_coverage(coverage: CoverageResult) -> CoverageResult:
    """The persisted form: per-entry proportions and scores, no point ids."""
    return CoverageResult(
        entries=tuple(
            CoverageEntry(e.geography, e.p_area, e.p_points, e.score)
            for e in coverage.entries
        ),
        config=coverage.config,
        selection=coverage.selection,
    )


class RegionStore:
    """Single-writer store over one JSON file; reads hit the in-memory map."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._regions: dict[str, NamedRegion] = {}
        if self.path.exists():
            self._load()

    # -- persistence --------------------------------------------------------

    def _load(self) -> None:
        try:
            raw = json.loads(self.path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"region store {self.path} is unreadable: {exc}") from exc
        if not isinstance(raw, dict) or raw.get("version") != STORE_VERSION:
            raise ValidationError(
                f"region store {self.path} has unsupported version {raw.get('version')!r}")
        for record in raw.get("regions", []):
            region = self._region_from_record(record)
            if region.key in self._regions:
                raise ValidationError(f"region store contains duplicate name {region.name!r}")
            self._regions[region.key] = region

    @staticmethod
    def _region_from_record(record: dict) -> NamedRegion:
        try:
            entries = tuple(
                CoverageEntry(
                    geography=e["geography"],
                    p_area=float(e["p_area"]),
                    p_points=float(e["p_points"]),
                    score=float(e["score"]),
                )
                for e in record["entries"]
            )
            included = frozenset(
                e["geography"] for e in record["entries"] if e.get("included", True))
            cfg = record["config"]
            config = CoverageConfig(
                weight_area=float(cfg["weight_area"]),
                weight_points=float(cfg["weight_points"]),
                threshold=float(cfg["threshold"]),
            )
            shape = geometry_from_geojson(record["selection"])
            selection = SelectionGeometry(record["kind"], shape)
            coverage = CoverageResult(entries=entries, config=config, selection=selection)
            region = NamedRegion(
                name=record["name"],
                created_at=_parse_instant(record["created_at"]),
                last_used_at=_parse_instant(record["last_used_at"]),
                selection=selection,
                coverage=coverage,
                included_geographies=included,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed region record: {exc}") from exc
        names = {e.geography for e in entries}
        if not region.included_geographies <= names:
            raise ValidationError(
                f"region {region.name!r} includes geographies missing from its snapshot")
        return region

    @staticmethod
    def region_record(region: NamedRegion) -> dict:
        return {
            "name": region.name,
            "created_at": region.created_at.isoformat(),
            "last_used_at": region.last_used_at.isoformat(),
            "kind": region.selection.kind,
            "selection": geometry_to_geojson(region.selection.shape),
            "config": {
                "weight_area": region.coverage.config.weight_area,
                "weight_points": region.coverage.config.weight_points,
                "threshold": region.coverage.config.threshold,
            },
            "entries": [
                {
                    "geography": e.geography,
                    "p_area": e.p_area,
                    "p_points": e.p_points,
                    "score": e.score,
                    "included": e.geography in region.included_geographies,
                }
                for e in region.coverage.entries
            ],
        }

    def _write(self) -> None:
        """Durable write: temp file alongside the target, fsync, atomic rename."""
        payload = {
            "version": STORE_VERSION,
            "regions": [self.region_record(r) for r in self._regions.values()],
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(
            prefix=self.path.name + ".", suffix=".tmp", dir=self.path.parent)
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, indent=2)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_path, self.path)
        except BaseException:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
            raise

    # -- operations ----------------------------------------------------------

    def save_region(self, name: str, selection: SelectionGeometry,
                    coverage: CoverageResult,
                    included: Optional[Iterable[str]] = None) -> NamedRegion:
        """Persist a new region durably; ``included`` defaults to every entry."""
        trimmed = _validated_name(name)
        snapshot = _snapshot_coverage(coverage)
        entry_names = {e.geography for e in snapshot.entries}
        included_set = frozenset(included) if included is not None else frozenset(entry_names)
        unknown = included_set - entry_names
        if unknown:
            raise UnknownGeographyInIncludedSet(
                f"included geographies not in coverage: {sorted(unknown)}")
        with self._lock:
            if trimmed.lower() in self._regions:
                raise DuplicateName(f"a region named {trimmed!r} already exists")
            now = _now()
            region = NamedRegion(
                name=trimmed,
                created_at=now,
                last_used_at=now,
                selection=selection,
                coverage=snapshot,
                included_geographies=included_set,
            )
            self._regions[region.key] = region
            self._write()
        return region

    def get_region(self, name: str) -> NamedRegion:
        region = self._regions.get((name or "").strip().lower())
        if region is None:
            raise UnknownRegion(f"no region named {name!r}")
        return region

    def list_regions(self) -> list[NamedRegion]:
        """Most recently used first; name as a deterministic tie-break."""
        return sorted(self._regions.values(),
                      key=lambda r: (r.last_used_at, r.name), reverse=True)

    def region_names(self) -> list[str]:
        return [r.name for r in self.list_regions()]

    def delete_region(self, name: str) -> None:
        with self._lock:
            key = (name or "").strip().lower()
            if key not in self._regions:
                raise UnknownRegion(f"no region named {name!r}")
            del self._regions[key]
            self._write()

    def remove_geography(self, name: str, geography: str) -> NamedRegion:
        """Drop one geography from a region's included set (snapshot untouched)."""
        with self._lock:
            key = (name or "").strip().lower()
            region = self._regions.get(key)
            if region is None:
                raise UnknownRegion(f"no region named {name!r}")
            if geography not in region.included_geographies:
                raise GeographyNotIncluded(
                    f"{geography!r} is not included in region {region.name!r}")
            updated = NamedRegion(
                name=region.name,
                created_at=region.created_at,
                last_used_at=_now(),
                selection=region.selection,
                coverage=region.coverage,
                included_geographies=region.included_geographies - {geography},
            )
            self._regions[key] = updated
            self._write()
        return updated

    def touch(self, name: str) -> None:
        """Record a use of the region (updates recency ordering)."""
        with self._lock:
            key = (name or "").strip().lower()
            region = self._regions.get(key)
            if region is None:
                raise UnknownRegion(f"no region named {name!r}")
            self._regions[key] = NamedRegion(
                name=region.name,
                created_at=region.created_at,
                last_used_at=_now(),
                selection=region.selection,
                coverage=region.coverage,
                included_geographies=region.included_geographies,
            )
            self._write()

    # -- query-language integration ------------------------------------------

    def resolve_region(self, name: str) -> Optional[frozenset]:
        """Included geographies for a saved region, or None if unknown."""
        region = self._regions.get((name or "").strip().lower())
        if region is None:
            return None
        return region.included_geographies
