"""Streaming series detection: flag stored crimes matching a new one.

A stored crime matches when its modus-operandi similarity reaches the
configured floor AND the time gap between the two crime intervals is within
the window AND, when both records carry coordinates, the great-circle
distance is within the radius. Records without coordinates are matched on
similarity and time alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import asin, cos, radians, sin, sqrt
from typing import Sequence

from ..records import CrimeRecord, TimeInterval, encode_binary
from ..schema import FormSchema
from .similarity import SimilarityScore, similarity

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class DetectorConfig:
    s_min: float = 0.6
    d_max_km: float = 50.0
    w_days: float = 30.0
    metric: str = "jaccard"

    def to_json(self) -> dict:
        return {
            "s_min": self.s_min,
            "d_max_km": self.d_max_km,
            "w_days": self.w_days,
            "metric": self.metric,
        }


@dataclass(frozen=True)
class SeriesMatch:
    record_id: str
    score: SimilarityScore
    spatial_km: float | None
    temporal_gap_hours: float


@dataclass(frozen=True)
class SeriesAlert:
    new_record_id: str
    matches: tuple[SeriesMatch, ...]
    rule: DetectorConfig

    def to_json(self) -> dict:
        return {
            "new_record_id": self.new_record_id,
            "matches": [
                {
                    "record_id": m.record_id,
                    "score": m.score.value,
                    "shared": sorted(m.score.shared),
                    "spatial_km": m.spatial_km,
                    "temporal_gap_hours": m.temporal_gap_hours,
                }
                for m in self.matches
            ],
            "rule": self.rule.to_json(),
        }


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on a sphere of radius 6371 km."""
    phi1, phi2 = radians(lat1), radians(lat2)
    dphi = radians(lat2 - lat1)
    dlon = radians(lon2 - lon1)
    h = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * asin(min(1.0, sqrt(h)))


def interval_gap_hours(a: TimeInterval, b: TimeInterval) -> float:
    """Hours between the nearest endpoints of two intervals; 0 when they overlap."""
    if a.earliest <= b.latest and b.earliest <= a.latest:
        return 0.0
    if a.latest < b.earliest:
        return (b.earliest - a.latest).total_seconds() / 3600.0
    return (a.earliest - b.latest).total_seconds() / 3600.0


def detect_series(
    new_record: CrimeRecord,
    candidates: Sequence[CrimeRecord],
    config: DetectorConfig,
    schema: FormSchema,
) -> SeriesAlert | None:
    """Return an alert listing every stored record satisfying all thresholds."""
    new_vec = encode_binary(new_record, schema)
    matches: list[SeriesMatch] = []
    for record in candidates:
        if record.record_id == new_record.record_id:
            continue
        score = similarity(new_vec, encode_binary(record, schema), schema, config.metric)
        if score.value < config.s_min:
            continue
        gap = interval_gap_hours(new_record.time_interval, record.time_interval)
        if gap > config.w_days * 24.0:
            continue
        spatial = None
        if new_record.geo is not None and record.geo is not None:
            spatial = haversine_km(
                new_record.geo.latitude,
                new_record.geo.longitude,
                record.geo.latitude,
                record.geo.longitude,
            )
            if spatial > config.d_max_km:
                continue
        matches.append(SeriesMatch(record.record_id, score, spatial, gap))

    if not matches:
        return None
    matches.sort(key=lambda m: m.record_id)
    matches.sort(key=lambda m: m.score.value, reverse=True)
    return SeriesAlert(new_record.record_id, tuple(matches), config)
