"""Descriptive statistics over a record set: per-parameter counts and proportions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..records import CrimeRecord
from ..schema import FormSchema


@dataclass(frozen=True)
class FrequencyTable:
    n: int
    counts: dict[str, int]  # parameter id -> number of records with it checked

    def proportion(self, parameter_id: str) -> float:
        if self.n == 0:
            return 0.0
        return self.counts[parameter_id] / self.n

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "parameters": {
                pid: {"count": c, "proportion": (c / self.n if self.n else 0.0)}
                for pid, c in self.counts.items()
            },
        }


def descriptive_stats(records: Sequence[CrimeRecord], schema: FormSchema) -> FrequencyTable:
    counts = {p.id: 0 for p in schema.parameters}
    for record in records:
        for pid in record.checked:
            if pid in counts:
                counts[pid] += 1
    return FrequencyTable(n=len(records), counts=counts)
