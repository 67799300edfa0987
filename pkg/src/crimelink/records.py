"""Crime records: validation against a schema and binary encoding.

A registered crime is a set of checked parameter ids plus case metadata.
Checked parameters encode to a fixed-length bit vector (one bit per schema
parameter, set iff checked) which all similarity machinery operates on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .schema import FormSchema


class DigestMismatchError(ValueError):
    """Record was captured against a different schema version."""


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp, normalizing to UTC."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {value!r} lacks a UTC offset")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        raise ValueError("naive datetime cannot be formatted as RFC 3339")
    dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt.isoformat() + "Z"


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float


@dataclass(frozen=True)
class TimeInterval:
    """Earliest and latest possible crime instants; equal for point-in-time crimes."""

    earliest: datetime
    latest: datetime


@dataclass(frozen=True)
class CrimeRecord:
    record_id: str
    case_number: str
    schema_digest: str
    checked: frozenset[str]
    address: str
    time_interval: TimeInterval
    registered_at: datetime
    geo: GeoPoint | None = None
    note: str = ""


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    where: str  # offending section/parameter/field


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, message: str, where: str) -> None:
        self.violations.append(Violation(rule, message, where))

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"rule": v.rule, "message": v.message, "where": v.where}
                for v in self.violations
            ],
        }


def validate_record(record: CrimeRecord, schema: FormSchema) -> ValidationReport:
    """Run the automatic verification gate; reports every violated rule.

    Raises :class:`DigestMismatchError` when the record points at a different
    schema version -- that is a compatibility failure, not a content violation.
    """
    if record.schema_digest != schema.digest:
        raise DigestMismatchError(
            f"record {record.record_id!r} carries schema digest "
            f"{record.schema_digest[:12]}…, store schema is {schema.digest[:12]}…"
        )

    report = ValidationReport()

    for pid in sorted(record.checked):
        if pid not in schema.by_id:
            report.add("unknown_parameter", f"unknown parameter id {pid!r}", pid)

    for section in schema.sections:
        for group in section.exclusive_groups:
            hit = sorted(group & record.checked)
            if len(hit) > 1:
                report.add(
                    "exclusive_group",
                    f"mutually exclusive parameters checked together: {hit}",
                    section.id,
                )
        if section.required and not any(p.id in record.checked for p in section.parameters):
            report.add(
                "required_section",
                f"section {section.name!r} requires at least one check",
                section.id,
            )

    for tf in schema.text_fields:
        if not tf.required:
            continue
        if tf.id == "timestamps":
            continue  # structural: time_interval always present
        if not getattr(record, tf.id, "").strip():
            report.add("required_text_field", f"text field {tf.label!r} is empty", tf.id)

    ti = record.time_interval
    if ti.earliest > ti.latest:
        report.add(
            "time_interval",
            "earliest possible crime instant is after the latest",
            "time_interval",
        )

    if record.geo is not None:
        if not -90.0 <= record.geo.latitude <= 90.0:
            report.add("geo_range", f"latitude {record.geo.latitude} out of [-90, 90]", "geo")
        if not -180.0 <= record.geo.longitude <= 180.0:
            report.add("geo_range", f"longitude {record.geo.longitude} out of [-180, 180]", "geo")

    return report


@dataclass(frozen=True)
class BitVector:
    """Fixed-length bit sequence; bit i corresponds to the parameter with bit_index i."""

    bits: int
    length: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside declared length")

    @classmethod
    def from_indices(cls, indices: Iterable[int], length: int) -> BitVector:
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise ValueError(f"bit index {i} outside 0..{length - 1}")
            bits |= 1 << i
        return cls(bits, length)

    def popcount(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        return [i for i in range(self.length) if self.bits >> i & 1]

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __len__(self) -> int:
        return self.length


def encode_binary(record: CrimeRecord, schema: FormSchema) -> BitVector:
    """1 at a parameter's bit index iff it is checked; record must be valid."""
    if record.schema_digest != schema.digest:
        raise DigestMismatchError(
            f"record {record.record_id!r} encoded against a different schema version"
        )
    bits = 0
    for pid in record.checked:
        param = schema.by_id.get(pid)
        if param is None:
            raise ValueError(f"cannot encode unknown parameter id {pid!r}")
        bits |= 1 << param.bit_index
    return BitVector(bits, schema.parameter_count)


def decode_binary(vector: BitVector, schema: FormSchema) -> frozenset[str]:
    """Exact inverse of :func:`encode_binary`."""
    if vector.length != schema.parameter_count:
        raise ValueError(
            f"vector length {vector.length} != schema parameter count {schema.parameter_count}"
        )
    return frozenset(schema.by_bit[i].id for i in vector.indices())


# --- JSON-lines interchange -------------------------------------------------

def record_to_json(record: CrimeRecord) -> dict:
    return {
        "record_id": record.record_id,
        "case_number": record.case_number,
        "schema_digest": record.schema_digest,
        "checked": sorted(record.checked),
        "address": record.address,
        "geo": (
            {"latitude": record.geo.latitude, "longitude": record.geo.longitude}
            if record.geo is not None
            else None
        ),
        "time_interval": {
            "earliest": format_rfc3339(record.time_interval.earliest),
            "latest": format_rfc3339(record.time_interval.latest),
        },
        "note": record.note,
        "registered_at": format_rfc3339(record.registered_at),
    }


def record_from_json(doc: dict) -> CrimeRecord:
    if not isinstance(doc, dict):
        raise ValueError("record payload must be a JSON object")
    for key in ("record_id", "schema_digest", "checked", "time_interval"):
        if key not in doc:
            raise ValueError(f"record payload missing field {key!r}")
    checked = doc["checked"]
    if not isinstance(checked, (list, tuple)) or not all(isinstance(c, str) for c in checked):
        raise ValueError("checked must be a list of parameter ids")
    ti = doc["time_interval"]
    if not isinstance(ti, dict) or "earliest" not in ti or "latest" not in ti:
        raise ValueError("time_interval must carry earliest and latest")
    geo = doc.get("geo")
    geo_point = None
    if geo is not None:
        if not isinstance(geo, dict) or "latitude" not in geo or "longitude" not in geo:
            raise ValueError("geo must carry latitude and longitude")
        geo_point = GeoPoint(float(geo["latitude"]), float(geo["longitude"]))
    registered_raw = doc.get("registered_at")
    registered_at = (
        parse_rfc3339(registered_raw)
        if registered_raw
        else datetime.now(timezone.utc).replace(microsecond=0)
    )
    return CrimeRecord(
        record_id=str(doc["record_id"]),
        case_number=str(doc.get("case_number", "")),
        schema_digest=str(doc["schema_digest"]),
        checked=frozenset(checked),
        address=str(doc.get("address", "")),
        geo=geo_point,
        time_interval=TimeInterval(parse_rfc3339(ti["earliest"]), parse_rfc3339(ti["latest"])),
        note=str(doc.get("note", "")),
        registered_at=registered_at,
    )


def record_to_line(record: CrimeRecord) -> str:
    return json.dumps(record_to_json(record), ensure_ascii=False, separators=(",", ":"))


def write_jsonl(records: Iterable[CrimeRecord], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_line(record) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> Iterator[CrimeRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield record_from_json(json.loads(line))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
