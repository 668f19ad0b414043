"""Department boundary loading for the map endpoints.

Reads a GeoJSON FeatureCollection whose features carry the department name
in the NOMBDEP property, normalizes those names the same way the ingest
layer does, and validates the Peru invariant: exactly 25 entries (24
departments plus CALLAO), unique after normalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import GeoError
from .ingest import normalize_label

EXPECTED_FEATURES = 25
_GEOMETRY_TYPES = {"Polygon", "MultiPolygon"}


@dataclass(frozen=True)
class GeoDepartment:
    """One department boundary: normalized name plus raw GeoJSON geometry."""

    name: str
    geometry: dict


@dataclass(frozen=True)
class GeoCollection:
    """Validated boundary set; keeps the raw FeatureCollection for clients."""

    departments: tuple
    feature_collection: dict

    @property
    def names(self) -> tuple:
        return tuple(sorted(d.name for d in self.departments))

    def to_dict(self) -> dict:
        return self.feature_collection


def _check_rings(coords, geom_type: str) -> None:
    if not isinstance(coords, list) or not coords:
        raise GeoError("geometry coordinates must be a nonempty list")
    polygons = coords if geom_type == "MultiPolygon" else [coords]
    for polygon in polygons:
        if not isinstance(polygon, list) or not polygon:
            raise GeoError("polygon must be a nonempty list of rings")
        for ring in polygon:
            if not isinstance(ring, list) or len(ring) < 4:
                raise GeoError("each ring needs at least 4 positions")
            for pos in ring:
                if (not isinstance(pos, list) or len(pos) < 2
                        or not all(isinstance(c, (int, float)) for c in pos[:2])):
                    raise GeoError(f"bad coordinate position: {pos!r}")
                lon, lat = float(pos[0]), float(pos[1])
                if not (-180.0 <= lon <= 180.0 and -90.0 <= lat <= 90.0):
                    raise GeoError(f"position out of lon/lat range: {pos!r}")


def load_departments(source: Union[str, Path, bytes]) -> GeoCollection:
    """Parse and validate the boundary file (path or raw bytes)."""
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GeoError(f"boundary file is not valid UTF-8 JSON: {exc}") from exc

    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoError("boundary file must be a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise GeoError("FeatureCollection needs a features list")
    if len(features) != EXPECTED_FEATURES:
        raise GeoError(
            f"expected {EXPECTED_FEATURES} department features, got {len(features)}")

    departments = []
    seen = set()
    for i, feature in enumerate(features):
        if not isinstance(feature, dict) or feature.get("type") != "Feature":
            raise GeoError(f"feature {i} is not a GeoJSON Feature")
        props = feature.get("properties") or {}
        raw_name = props.get("NOMBDEP")
        if not isinstance(raw_name, str) or not raw_name.strip():
            raise GeoError(f"feature {i} is missing the NOMBDEP property")
        name = normalize_label(raw_name)
        if name in seen:
            raise GeoError(f"duplicate department after normalization: {name}")
        seen.add(name)
        geometry = feature.get("geometry") or {}
        gtype = geometry.get("type")
        if gtype not in _GEOMETRY_TYPES:
            raise GeoError(f"feature {i} ({name}): geometry must be one of "
                           f"{sorted(_GEOMETRY_TYPES)}, got {gtype!r}")
        _check_rings(geometry.get("coordinates"), gtype)
        props["NOMBDEP"] = name
        departments.append(GeoDepartment(name=name, geometry=geometry))
    return GeoCollection(departments=tuple(departments), feature_collection=doc)
