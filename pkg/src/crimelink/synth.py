"""Deterministic synthetic crime corpora with planted offender series.

The generator is driven by SplitMix64, a tiny 64-bit PRNG with published
constants, implemented here so the exact same corpus can be reproduced from
the same seed by any implementation in any language (the stdlib Mersenne
Twister would tie corpora to this runtime). Draws are made in a fixed,
documented order; the emitted JSON lines are byte-identical across runs.

Series members share a randomly drawn modus-operandi signature; each member
drops individual signature bits with the configured flip probability and
gains independent background bits. Exclusive checkbox groups are honored:
signature first, background second, later conflicting draws skipped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import timedelta
from pathlib import Path

from .records import CrimeRecord, GeoPoint, TimeInterval, parse_rfc3339, write_jsonl
from .schema import FormSchema, Parameter

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea & Flood's constants); portable and seedable."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def sample(self, seq, k: int) -> list:
        """k distinct elements, partial Fisher-Yates over a copied pool."""
        if k > len(seq):
            raise ValueError("sample larger than population")
        pool = list(seq)
        out = []
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 1
    n_records: int = 1000
    n_series: int = 10
    series_size_min: int = 8
    series_size_max: int = 8
    signature_bits: int = 10
    noise_flip_prob: float = 0.05
    background_rate: float = 0.025  # per-parameter probability of a background check
    geo_center: tuple[float, float] = (55.605, 13.0)
    geo_spread_km: float = 40.0
    time_start: str = "2016-01-04T00:00:00Z"
    time_span_days: float = 365.0
    max_interval_hours: float = 72.0
    point_time_prob: float = 0.25  # share of crimes with an exact known instant

    def __post_init__(self):
        if not 0.0 <= self.noise_flip_prob <= 1.0:
            raise ValueError("noise_flip_prob must lie in [0, 1]")
        if not 0.0 <= self.background_rate <= 1.0:
            raise ValueError("background_rate must lie in [0, 1]")
        if self.series_size_min < 2 or self.series_size_max < self.series_size_min:
            raise ValueError("series sizes must satisfy 2 <= min <= max")
        if self.n_series * self.series_size_max > self.n_records:
            raise ValueError("series records exceed n_records")


_STREETS = (
    "Storgatan", "Kyrkvägen", "Björkallén", "Industrigatan", "Strandvägen",
    "Skolgatan", "Parkvägen", "Hantverkaregatan", "Mossvägen", "Lindvägen",
)
_TOWNS = ("Malmö", "Lund", "Ystad", "Trelleborg", "Eslöv", "Kävlinge", "Sjöbo", "Hörby")

KM_PER_DEG_LAT = 111.195  # mean meridian arc on a 6371 km sphere


def _pick_signature(
    rng: SplitMix64, schema: FormSchema, signature_bits: int, required_param_pool: list[Parameter]
) -> list[str]:
    """Random MO signature honoring exclusivity; includes one required-section check."""
    signature = [rng.choice(required_param_pool).id]
    blocked = _blocked_ids(schema, signature)
    candidates = [p.id for p in schema.parameters if p.id not in signature]
    for pid in rng.sample(candidates, len(candidates)):
        if len(signature) >= signature_bits:
            break
        if pid in blocked:
            continue
        signature.append(pid)
        blocked = _blocked_ids(schema, signature)
    return signature


def _blocked_ids(schema: FormSchema, chosen: list[str]) -> set[str]:
    chosen_set = set(chosen)
    blocked: set[str] = set()
    for section in schema.sections:
        for group in section.exclusive_groups:
            if group & chosen_set:
                blocked |= group - chosen_set
    return blocked


def _checked_for_record(
    rng: SplitMix64,
    schema: FormSchema,
    signature: list[str],
    config: GeneratorConfig,
    required_param_pool: list[Parameter],
) -> frozenset[str]:
    checked: list[str] = []
    for pid in signature:
        if rng.random() >= config.noise_flip_prob:
            checked.append(pid)
    blocked = _blocked_ids(schema, checked)
    signature_set = set(signature)
    for param in schema.parameters:  # fixed bit order keeps draws reproducible
        if param.id in signature_set:
            continue
        if rng.random() < config.background_rate and param.id not in blocked:
            checked.append(param.id)
            blocked = _blocked_ids(schema, checked)
    if not any(p.id in checked for p in required_param_pool):
        checked.append(rng.choice(required_param_pool).id)
    return frozenset(checked)


def _geo_near(rng: SplitMix64, center: tuple[float, float], spread_km: float) -> GeoPoint:
    lat0, lon0 = center
    dlat = rng.uniform(-spread_km, spread_km) / KM_PER_DEG_LAT
    dlon = rng.uniform(-spread_km, spread_km) / (
        KM_PER_DEG_LAT * max(0.1, math.cos(math.radians(lat0)))
    )
    return GeoPoint(round(lat0 + dlat, 6), round(lon0 + dlon, 6))


def generate(
    config: GeneratorConfig, schema: FormSchema
) -> tuple[list[CrimeRecord], dict[str, str | None]]:
    """Build (records, truth) where truth maps record_id -> series id or None.

    Deterministic for a fixed (config, schema); every record passes the
    validation gate, including exclusivity and required-section rules.
    """
    rng = SplitMix64(config.seed)
    required_sections = [s for s in schema.sections if s.required]
    required_param_pool = list(
        required_sections[0].parameters if required_sections else schema.sections[0].parameters
    )
    if config.signature_bits > schema.parameter_count:
        raise ValueError("signature_bits exceeds schema parameter count")

    time_start = parse_rfc3339(config.time_start)

    # Plan series up front: sizes, signatures, local geo/time anchors.
    plans = []
    for s in range(config.n_series):
        size = config.series_size_min + rng.randrange(
            config.series_size_max - config.series_size_min + 1
        )
        signature = _pick_signature(rng, schema, config.signature_bits, required_param_pool)
        anchor_geo = _geo_near(rng, config.geo_center, config.geo_spread_km)
        anchor_day = rng.uniform(3.0, max(3.0, config.time_span_days - 3.0))
        plans.append((f"S{s:03d}", size, signature, anchor_geo, anchor_day))

    # Interleave series membership over the corpus deterministically.
    slots: list[tuple[str, list[str], GeoPoint, float] | None] = [None] * config.n_records
    free = list(range(config.n_records))
    for series_id, size, signature, anchor_geo, anchor_day in plans:
        for idx in sorted(rng.sample(free, size)):
            slots[idx] = (series_id, signature, anchor_geo, anchor_day)
            free.remove(idx)

    records: list[CrimeRecord] = []
    truth: dict[str, str | None] = {}
    for idx in range(config.n_records):
        record_id = f"R{idx:06d}"
        slot = slots[idx]
        if slot is not None:
            series_id, signature, anchor_geo, anchor_day = slot
            checked = _checked_for_record(rng, schema, signature, config, required_param_pool)
            geo = _geo_near(rng, (anchor_geo.latitude, anchor_geo.longitude),
                            max(1.0, config.geo_spread_km / 20.0))
            day = anchor_day + rng.uniform(-3.0, 3.0)
        else:
            series_id = None
            checked = _checked_for_record(rng, schema, [], config, required_param_pool)
            geo = _geo_near(rng, config.geo_center, config.geo_spread_km)
            day = rng.uniform(0.0, config.time_span_days)

        earliest = time_start + timedelta(minutes=round(day * 24 * 60))
        if rng.random() < config.point_time_prob:
            latest = earliest
        else:
            latest = earliest + timedelta(
                minutes=round(rng.uniform(0.5, config.max_interval_hours) * 60)
            )
        registered_at = latest + timedelta(minutes=round(rng.uniform(30.0, 48 * 60.0)))

        street = rng.choice(_STREETS)
        town = rng.choice(_TOWNS)
        records.append(
            CrimeRecord(
                record_id=record_id,
                case_number=f"5000-K{100000 + idx}-16",
                schema_digest=schema.digest,
                checked=checked,
                address=f"{street} {1 + rng.randrange(120)}, {town}",
                geo=geo,
                time_interval=TimeInterval(earliest, latest),
                note="",
                registered_at=registered_at,
            )
        )
        truth[record_id] = series_id

    return records, truth


def write_corpus(
    records: list[CrimeRecord],
    truth: dict[str, str | None],
    directory: str | Path,
) -> tuple[Path, Path]:
    """Emit records.jsonl + truth.csv into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records_path = directory / "records.jsonl"
    truth_path = directory / "truth.csv"
    write_jsonl(records, records_path)
    with open(truth_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record_id", "series_id"])
        for record in records:
            writer.writerow([record.record_id, truth[record.record_id] or ""])
    return records_path, truth_path


def read_truth(path: str | Path) -> dict[str, str | None]:
    truth: dict[str, str | None] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            truth[row["record_id"]] = row["series_id"] or None
    return truth
