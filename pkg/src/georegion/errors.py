"""Exception hierarchy shared by every module.

Each error carries a stable ``code`` string so the HTTP layer can emit
machine-readable ``{code, message, position?}`` payloads without string
matching on messages.
"""
from __future__ import annotations


class GeoRegionError(Exception):
    """Base class for all domain errors."""

    code = "Error"

    def __init__(self, message: str, *, position: int | None = None):
        super().__init__(message)
        self.message = message
        self.position = position

    def payload(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.position is not None:
            body["position"] = self.position
        return body


class ValidationError(GeoRegionError):
    code = "ValidationError"


class DegeneratePolygon(ValidationError):
    code = "DegeneratePolygon"


class SelfIntersectingSelection(ValidationError):
    code = "SelfIntersectingSelection"


class TooFewVertices(ValidationError):
    code = "TooFewVertices"


class EmptyRegistry(GeoRegionError):
    code = "EmptyRegistry"


class EmptyDataset(GeoRegionError):
    code = "EmptyDataset"


class UnknownRegion(GeoRegionError):
    code = "UnknownRegion"


class DuplicateName(GeoRegionError):
    code = "DuplicateName"


class InvalidName(GeoRegionError):
    code = "InvalidName"


class UnknownGeographyInIncludedSet(GeoRegionError):
    code = "UnknownGeographyInIncludedSet"


class GeographyNotIncluded(GeoRegionError):
    code = "GeographyNotIncluded"


class PendingSelectionError(GeoRegionError):
    """A query references an unresolved map selection."""

    code = "PendingSelection"


class IncompleteQuery(GeoRegionError):
    code = "IncompleteQuery"


class InvalidQuery(GeoRegionError):
    code = "InvalidQuery"


class HeaderMismatch(GeoRegionError):
    code = "HeaderMismatch"


class AllRowsInvalid(GeoRegionError):
    code = "AllRowsInvalid"


class InvalidGeoJSON(GeoRegionError):
    code = "InvalidGeoJSON"


class DuplicateGeographyName(GeoRegionError):
    code = "DuplicateGeographyName"


class MissingNameProperty(GeoRegionError):
    code = "MissingNameProperty"


class UnknownCoverageToken(GeoRegionError):
    code = "UnknownCoverageToken"


class BadRequest(GeoRegionError):
    """Structurally malformed request body or parameters."""

    code = "BadRequest"
