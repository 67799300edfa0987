"""Checkbox taxonomy for structured crime-scene reports.

A form schema is a fixed, ordered set of sections, each holding checkbox
parameters. Bit indices are assigned by document order so that binary
encodings are bit-exact across processes and machines.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

# Free-text slots a record can carry; schema files may only declare these.
TEXT_FIELD_SLOTS = ("case_number", "address", "timestamps", "note")


class SchemaError(ValueError):
    """A schema document violates its structural rules.

    ``path`` points at the offending element, e.g. ``sections[2].parameters[5]``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


@dataclass(frozen=True)
class Parameter:
    id: str
    label: str
    bit_index: int
    help: str | None = None


@dataclass(frozen=True)
class TextField:
    id: str
    label: str
    required: bool = False


@dataclass(frozen=True)
class Section:
    id: str
    name: str
    parameters: tuple[Parameter, ...]
    exclusive_groups: tuple[frozenset[str], ...] = ()
    required: bool = False


@dataclass(frozen=True)
class FormSchema:
    category: str
    version: str
    sections: tuple[Section, ...]
    text_fields: tuple[TextField, ...] = ()

    @cached_property
    def parameters(self) -> tuple[Parameter, ...]:
        return tuple(p for s in self.sections for p in s.parameters)

    @cached_property
    def parameter_count(self) -> int:
        return len(self.parameters)

    @cached_property
    def by_id(self) -> dict[str, Parameter]:
        return {p.id: p for p in self.parameters}

    @cached_property
    def by_bit(self) -> dict[int, Parameter]:
        return {p.bit_index: p for p in self.parameters}

    @cached_property
    def section_of(self) -> dict[str, Section]:
        """Parameter id -> owning section."""
        return {p.id: s for s in self.sections for p in s.parameters}

    @cached_property
    def digest(self) -> str:
        return schema_digest(self)


def load_schema(source: str | Path | dict) -> FormSchema:
    """Load and validate a schema document (path or already-parsed dict)."""
    if isinstance(source, (str, Path)):
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed schema document: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("schema document must be a JSON object")

    raw_sections = doc.get("sections")
    if not isinstance(raw_sections, list) or not raw_sections:
        raise SchemaError("empty schema: no sections declared", "sections")

    sections: list[Section] = []
    seen_params: dict[str, str] = {}  # param id -> section id, for duplicate reporting
    seen_sections: set[str] = set()
    bit = 0
    for si, raw in enumerate(raw_sections):
        spath = f"sections[{si}]"
        sid = _require_str(raw, "id", spath)
        name = _require_str(raw, "name", spath)
        if sid in seen_sections:
            raise SchemaError(f"duplicate section id {sid!r}", spath)
        seen_sections.add(sid)

        raw_params = raw.get("parameters")
        if not isinstance(raw_params, list) or not raw_params:
            raise SchemaError("section declares no parameters", spath)
        params: list[Parameter] = []
        for pi, rp in enumerate(raw_params):
            ppath = f"{spath}.parameters[{pi}]"
            pid = _require_str(rp, "id", ppath)
            label = _require_str(rp, "label", ppath)
            if pid in seen_params:
                raise SchemaError(
                    f"duplicate parameter id {pid!r} in sections "
                    f"{seen_params[pid]!r} and {sid!r}",
                    ppath,
                )
            seen_params[pid] = sid
            params.append(Parameter(pid, label, bit, rp.get("help")))
            bit += 1

        local_ids = {p.id for p in params}
        groups: list[frozenset[str]] = []
        for gi, raw_group in enumerate(raw.get("exclusive_groups", [])):
            gpath = f"{spath}.exclusive_groups[{gi}]"
            members = frozenset(raw_group)
            if len(members) < 2:
                raise SchemaError("exclusive group needs at least 2 members", gpath)
            unknown = members - local_ids
            if unknown:
                raise SchemaError(
                    f"exclusive group references unknown ids {sorted(unknown)}", gpath
                )
            groups.append(members)

        sections.append(
            Section(sid, name, tuple(params), tuple(groups), bool(raw.get("required", False)))
        )

    text_fields: list[TextField] = []
    for ti, raw in enumerate(doc.get("text_fields", [])):
        tpath = f"text_fields[{ti}]"
        tid = _require_str(raw, "id", tpath)
        if tid not in TEXT_FIELD_SLOTS:
            raise SchemaError(f"unknown text field slot {tid!r}", tpath)
        if any(t.id == tid for t in text_fields):
            raise SchemaError(f"duplicate text field {tid!r}", tpath)
        text_fields.append(TextField(tid, _require_str(raw, "label", tpath), bool(raw.get("required", False))))

    return FormSchema(
        category=str(doc.get("category", "")),
        version=str(doc.get("version", "")),
        sections=tuple(sections),
        text_fields=tuple(text_fields),
    )


def _require_str(raw: dict, key: str, path: str) -> str:
    value = raw.get(key) if isinstance(raw, dict) else None
    if not isinstance(value, str) or not value:
        raise SchemaError(f"missing or invalid {key!r}", path)
    return value


def serialize_schema(schema: FormSchema) -> dict:
    """Inverse of :func:`load_schema`; parsing the result reproduces the digest."""
    return {
        "category": schema.category,
        "version": schema.version,
        "sections": [
            {
                "id": s.id,
                "name": s.name,
                "required": s.required,
                "exclusive_groups": [sorted(g) for g in s.exclusive_groups],
                "parameters": [
                    {"id": p.id, "label": p.label}
                    | ({"help": p.help} if p.help is not None else {})
                    for p in s.parameters
                ],
            }
            for s in schema.sections
        ],
        "text_fields": [
            {"id": t.id, "label": t.label, "required": t.required}
            for t in schema.text_fields
        ],
    }


def schema_digest(schema: FormSchema) -> str:
    """Stable content hash over the full schema structure.

    Any change to labels, ordering, groups, or text fields changes the digest;
    records carry it so stores can refuse mixed schema versions.
    """
    canonical = json.dumps(
        serialize_schema(schema), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def bundled_schema_path() -> Path:
    return Path(str(resources.files("crimelink.data") / "burglary_schema.json"))


def load_bundled_schema() -> FormSchema:
    """The shipped residential-burglary schema (11 sections, 133 checkboxes)."""
    return load_schema(bundled_schema_path())
