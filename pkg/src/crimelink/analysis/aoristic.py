"""Aoristic temporal analysis: weekday x hour-of-day probability mass grid.

Each crime contributes total mass 1, spread over the weekly grid cells its
possible-occurrence interval covers, proportional to the time spent in each
cell. Point-in-time crimes drop their full mass in one cell; intervals of a
week or longer are flat (1/168 everywhere) since every cell is covered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta, timezone
from typing import Iterable

from ..records import CrimeRecord, TimeInterval

HOURS_PER_WEEK = 7 * 24


@dataclass
class AoristicGrid:
    """7x24 non-negative weights, indexed (weekday 0=Monday, hour 0-23)."""

    weights: list[list[float]] = field(
        default_factory=lambda: [[0.0] * 24 for _ in range(7)]
    )

    def total(self) -> float:
        return sum(sum(row) for row in self.weights)

    def cell(self, weekday: int, hour: int) -> float:
        return self.weights[weekday][hour]

    def to_json(self) -> dict:
        return {"weights": [list(row) for row in self.weights]}


def _add_interval(grid: AoristicGrid, interval: TimeInterval) -> None:
    start = interval.earliest.astimezone(timezone.utc)
    end = interval.latest.astimezone(timezone.utc)
    total_seconds = (end - start).total_seconds()

    if total_seconds <= 0:
        grid.weights[start.weekday()][start.hour] += 1.0
        return

    if total_seconds >= HOURS_PER_WEEK * 3600:
        flat = 1.0 / HOURS_PER_WEEK
        for row in grid.weights:
            for h in range(24):
                row[h] += flat
        return

    # Walk hour boundaries; each sub-span lies in exactly one weekly cell.
    cursor = start
    while cursor < end:
        boundary = (cursor + timedelta(hours=1)).replace(
            minute=0, second=0, microsecond=0
        )
        span_end = min(boundary, end)
        seconds = (span_end - cursor).total_seconds()
        grid.weights[cursor.weekday()][cursor.hour] += seconds / total_seconds
        cursor = span_end


def aoristic(records: Iterable[CrimeRecord]) -> AoristicGrid:
    """Aggregate grid over a record set; grid sum equals the record count."""
    grid = AoristicGrid()
    for record in records:
        _add_interval(grid, record.time_interval)
    return grid
