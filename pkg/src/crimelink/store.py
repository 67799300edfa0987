"""Central registry: append-only persistence and checkbox-faceted search.

Layout on disk is a ``records.jsonl`` data file plus a small ``store.meta``
(schema digest + record count). The full record set and a per-record bitmask
index live in memory; corpora at desk scale (tens of thousands of records)
fit comfortably. A corrupt or missing meta file is recovered by rescanning
the data file.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable

from .records import (
    BitVector,
    CrimeRecord,
    ValidationReport,
    encode_binary,
    read_jsonl,
    record_to_line,
    validate_record,
)
from .schema import FormSchema

META_FILE = "store.meta"
DATA_FILE = "records.jsonl"


class NotFoundError(KeyError):
    pass


class DuplicateRecordError(ValueError):
    pass


class StoreValidationError(ValueError):
    """Append rejected by the validation gate; carries the full report."""

    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.violations[0]
        super().__init__(
            f"record rejected: {first.message} (+{len(report.violations) - 1} more)"
            if len(report.violations) > 1
            else f"record rejected: {first.message}"
        )


@dataclass(frozen=True)
class SearchQuery:
    """Conjunctive facet query: all ``required`` checked, no ``excluded`` checked.

    ``time_window`` matches records whose crime interval overlaps it;
    ``bbox`` is (min_lat, min_lon, max_lat, max_lon) and only constrains
    records that carry coordinates.
    """

    required: frozenset[str] = frozenset()
    excluded: frozenset[str] = frozenset()
    time_window: tuple[datetime, datetime] | None = None
    bbox: tuple[float, float, float, float] | None = None
    limit: int | None = None
    offset: int = 0

    def __post_init__(self):
        clash = self.required & self.excluded
        if clash:
            raise ValueError(f"contradictory query: {sorted(clash)} both required and excluded")
        if self.time_window is not None and self.time_window[0] > self.time_window[1]:
            raise ValueError("time_window start is after its end")
        if self.offset < 0 or (self.limit is not None and self.limit < 0):
            raise ValueError("limit/offset must be non-negative")


@dataclass
class _Entry:
    record: CrimeRecord
    bits: int


class RecordStore:
    """Single serialized writer, unlimited concurrent readers over snapshots."""

    def __init__(self, directory: str | Path, schema: FormSchema):
        self.directory = Path(directory)
        self.schema = schema
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._entries: list[_Entry] = []
        self._by_id: dict[str, _Entry] = {}
        self._subscribers: list[Callable[[CrimeRecord], None]] = []
        self._data_path = self.directory / DATA_FILE
        self._meta_path = self.directory / META_FILE
        self._load()
        self._fh = open(self._data_path, "a", encoding="utf-8")

    # -- lifecycle -------------------------------------------------------

    def _load(self) -> None:
        meta_digest = None
        if self._meta_path.exists():
            try:
                meta = json.loads(self._meta_path.read_text(encoding="utf-8"))
                meta_digest = meta.get("schema_digest")
            except (json.JSONDecodeError, OSError):
                meta_digest = None  # corrupt meta: recover by rescan below
        if meta_digest is not None and meta_digest != self.schema.digest:
            raise ValueError(
                f"store at {self.directory} was created with schema digest "
                f"{meta_digest[:12]}…, refusing to open with {self.schema.digest[:12]}…"
            )
        if self._data_path.exists():
            for record in read_jsonl(self._data_path):
                entry = _Entry(record, encode_binary(record, self.schema).bits)
                self._entries.append(entry)
                self._by_id[record.record_id] = entry
        self._write_meta()

    def _write_meta(self) -> None:
        tmp = self._meta_path.with_suffix(".meta.tmp")
        tmp.write_text(
            json.dumps({"schema_digest": self.schema.digest, "record_count": len(self._entries)}),
            encoding="utf-8",
        )
        tmp.replace(self._meta_path)

    def close(self) -> None:
        with self._lock:
            self._fh.flush()
            self._fh.close()

    # -- writes ----------------------------------------------------------

    def subscribe(self, callback: Callable[[CrimeRecord], None]) -> None:
        """Register an append-event consumer; called in append order."""
        self._subscribers.append(callback)

    def append(self, record: CrimeRecord) -> str:
        """Validate and persist; the store is the enforcement point.

        Rejects (without persisting anything) on validation failure,
        duplicate id, or schema-digest mismatch.
        """
        with self._lock:
            if record.record_id in self._by_id:
                raise DuplicateRecordError(f"record id {record.record_id!r} already registered")
            report = validate_record(record, self.schema)  # raises on digest mismatch
            if not report.ok:
                raise StoreValidationError(report)
            bits = encode_binary(record, self.schema).bits
            self._fh.write(record_to_line(record) + "\n")
            self._fh.flush()
            entry = _Entry(record, bits)
            self._entries.append(entry)
            self._by_id[record.record_id] = entry
            self._write_meta()
            for callback in self._subscribers:
                callback(record)
            return record.record_id

    # -- reads -----------------------------------------------------------

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def get(self, record_id: str) -> CrimeRecord:
        with self._lock:
            entry = self._by_id.get(record_id)
        if entry is None:
            raise NotFoundError(f"no record with id {record_id!r}")
        return entry.record

    def __contains__(self, record_id: str) -> bool:
        with self._lock:
            return record_id in self._by_id

    def snapshot(self) -> list[CrimeRecord]:
        """Consistent point-in-time view; never observes a half-appended record."""
        with self._lock:
            return [e.record for e in self._entries]

    def bitvector(self, record_id: str) -> BitVector:
        with self._lock:
            entry = self._by_id.get(record_id)
        if entry is None:
            raise NotFoundError(f"no record with id {record_id!r}")
        return BitVector(entry.bits, self.schema.parameter_count)

    def search(self, query: SearchQuery) -> list[CrimeRecord]:
        """Exact conjunctive filtering, newest registration first."""
        required_mask = self._mask(query.required)
        excluded_mask = self._mask(query.excluded)
        with self._lock:
            entries = list(self._entries)

        hits = []
        for entry in entries:
            if entry.bits & required_mask != required_mask:
                continue
            if entry.bits & excluded_mask:
                continue
            if query.time_window is not None:
                lo, hi = query.time_window
                ti = entry.record.time_interval
                if ti.latest < lo or ti.earliest > hi:
                    continue
            if query.bbox is not None and entry.record.geo is not None:
                min_lat, min_lon, max_lat, max_lon = query.bbox
                geo = entry.record.geo
                if not (min_lat <= geo.latitude <= max_lat and min_lon <= geo.longitude <= max_lon):
                    continue
            hits.append(entry.record)

        # registered_at descending; ties broken by ascending record_id
        hits.sort(key=lambda r: r.record_id)
        hits.sort(key=lambda r: r.registered_at, reverse=True)
        if query.offset:
            hits = hits[query.offset:]
        if query.limit is not None:
            hits = hits[: query.limit]
        return hits

    def _mask(self, param_ids: Iterable[str]) -> int:
        mask = 0
        for pid in param_ids:
            param = self.schema.by_id.get(pid)
            if param is None:
                raise ValueError(f"query references unknown parameter id {pid!r}")
            mask |= 1 << param.bit_index
        return mask
