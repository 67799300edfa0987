"""Free-text crime report generation from a structured record.

Every checked parameter becomes one pre-written sentence, grouped under the
five traditional report headings in fixed order. The layout is fully
deterministic: the same record always renders byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .records import CrimeRecord, format_rfc3339
from .schema import FormSchema

HEADINGS = (
    "Brottet",
    "Omständigheter",
    "Skador",
    "Brottsplatsundersökning/spår",
    "Övrigt",
)

EMPTY_MARK = "—"


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class PhraseTemplates:
    fragments: dict[str, str]  # parameter id -> sentence
    headings: dict[str, str]  # section id -> heading

    def validate_against(self, schema: FormSchema) -> None:
        missing = [p.id for p in schema.parameters if p.id not in self.fragments]
        if missing:
            raise TemplateError(f"templates missing fragments for parameters: {missing[:5]}")
        for section in schema.sections:
            heading = self.headings.get(section.id)
            if heading is None:
                raise TemplateError(f"no heading mapped for section {section.id!r}")
            if heading not in HEADINGS:
                raise TemplateError(f"section {section.id!r} maps to unknown heading {heading!r}")


def load_templates(source: str | Path | dict) -> PhraseTemplates:
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = source
    fragments = doc.get("fragments")
    headings = doc.get("headings")
    if not isinstance(fragments, dict) or not isinstance(headings, dict):
        raise TemplateError("templates document must carry 'fragments' and 'headings' objects")
    return PhraseTemplates(dict(fragments), dict(headings))


def load_bundled_templates() -> PhraseTemplates:
    return load_templates(Path(str(resources.files("crimelink.data") / "burglary_templates.json")))


def generate_report(
    record: CrimeRecord, schema: FormSchema, templates: PhraseTemplates
) -> str:
    """Render the record as uniformly formatted text under the five headings.

    Checked parameters appear exactly once, in schema bit order, under the
    heading their section maps to; the free-text note lands verbatim under
    the last heading. Headings without content show an em-dash placeholder.
    """
    sentences: dict[str, list[str]] = {h: [] for h in HEADINGS}
    for param in schema.parameters:  # bit order fixes sentence order
        if param.id not in record.checked:
            continue
        fragment = templates.fragments.get(param.id)
        if fragment is None:
            raise TemplateError(f"no fragment for checked parameter {param.id!r}")
        heading = templates.headings.get(schema.section_of[param.id].id)
        if heading is None:
            raise TemplateError(f"no heading for section of parameter {param.id!r}")
        sentences[heading].append(fragment)

    meta = [f"Diarienummer: {record.case_number or EMPTY_MARK}"]
    meta.append(f"Adress: {record.address or EMPTY_MARK}")
    meta.append(
        "Brottstid: "
        f"{format_rfc3339(record.time_interval.earliest)}"
        f" – {format_rfc3339(record.time_interval.latest)}"
    )

    blocks = ["\n".join(meta)]
    for heading in HEADINGS:
        body = " ".join(sentences[heading])
        if heading == HEADINGS[-1] and record.note.strip():
            body = f"{body} {record.note}".strip() if body else record.note
        blocks.append(f"{heading}\n{body if body else EMPTY_MARK}")
    return "\n\n".join(blocks) + "\n"
