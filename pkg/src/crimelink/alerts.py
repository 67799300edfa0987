"""Persistent series-alert log, fed by the store's append events.

Alerts land in ``alerts.jsonl`` next to the record data so the feed
survives restarts. The detector runs as the single ordered consumer of
append events: the store serializes writers, so detection sees stored
records in exactly registration order.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .analysis.series import DetectorConfig, SeriesAlert, detect_series
from .records import CrimeRecord, format_rfc3339, parse_rfc3339
from .schema import FormSchema
from .store import RecordStore

ALERTS_FILE = "alerts.jsonl"


@dataclass(frozen=True)
class StoredAlert:
    detected_at: datetime
    alert: SeriesAlert

    def to_json(self) -> dict:
        doc = self.alert.to_json()
        doc["detected_at"] = format_rfc3339(self.detected_at)
        return doc


class AlertLog:
    def __init__(self, directory: str | Path):
        self.path = Path(directory) / ALERTS_FILE
        self._lock = threading.Lock()
        self._alerts: list[StoredAlert] = []
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._alerts.append(_alert_from_json(json.loads(line)))

    def append(self, alert: SeriesAlert, detected_at: datetime | None = None) -> StoredAlert:
        stored = StoredAlert(detected_at or datetime.now(timezone.utc), alert)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(stored.to_json(), ensure_ascii=False) + "\n")
            self._alerts.append(stored)
        return stored

    def since(self, instant: datetime | None = None) -> list[StoredAlert]:
        """Alerts detected strictly after the given instant, oldest first."""
        with self._lock:
            alerts = list(self._alerts)
        if instant is None:
            return alerts
        return [a for a in alerts if a.detected_at > instant]

    def __len__(self) -> int:
        with self._lock:
            return len(self._alerts)


def _alert_from_json(doc: dict) -> StoredAlert:
    from .analysis.series import SeriesMatch
    from .analysis.similarity import SimilarityScore

    rule = doc.get("rule", {})
    matches = tuple(
        SeriesMatch(
            record_id=m["record_id"],
            score=SimilarityScore(m["score"], frozenset(m.get("shared", []))),
            spatial_km=m.get("spatial_km"),
            temporal_gap_hours=m["temporal_gap_hours"],
        )
        for m in doc.get("matches", [])
    )
    alert = SeriesAlert(
        new_record_id=doc["new_record_id"],
        matches=matches,
        rule=DetectorConfig(
            s_min=rule.get("s_min", 0.6),
            d_max_km=rule.get("d_max_km", 50.0),
            w_days=rule.get("w_days", 30.0),
            metric=rule.get("metric", "jaccard"),
        ),
    )
    return StoredAlert(parse_rfc3339(doc["detected_at"]), alert)


class SeriesDetector:
    """Wires a store's append feed into the persistent alert log."""

    def __init__(
        self,
        store: RecordStore,
        schema: FormSchema,
        config: DetectorConfig,
        log: AlertLog,
    ):
        self.store = store
        self.schema = schema
        self.config = config
        self.log = log

    def attach(self) -> None:
        self.store.subscribe(self._on_append)

    def _on_append(self, record: CrimeRecord) -> None:
        candidates = [r for r in self.store.snapshot() if r.record_id != record.record_id]
        alert = detect_series(record, candidates, self.config, self.schema)
        if alert is not None:
            self.log.append(alert)
