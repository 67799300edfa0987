"""Pairwise similarity between binary-encoded crime records.

Jaccard over the checked-parameter bit vectors is the default metric:
|a AND b| / |a OR b|, defined as 0 when both vectors are empty. Binary
cosine is available behind the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Iterable, Sequence

from ..records import BitVector, CrimeRecord, encode_binary
from ..schema import FormSchema

METRICS = ("jaccard", "cosine")


@dataclass(frozen=True)
class SimilarityScore:
    value: float
    shared: frozenset[str]  # parameter ids checked in both records


def jaccard(a: BitVector, b: BitVector) -> float:
    """Raw Jaccard coefficient; the hot-path kernel behind the score type."""
    if a.length != b.length:
        raise ValueError(f"vector length mismatch: {a.length} != {b.length}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 0.0
    return (a.bits & b.bits).bit_count() / union


def binary_cosine(a: BitVector, b: BitVector) -> float:
    if a.length != b.length:
        raise ValueError(f"vector length mismatch: {a.length} != {b.length}")
    pa, pb = a.bits.bit_count(), b.bits.bit_count()
    if pa == 0 or pb == 0:
        return 0.0
    return (a.bits & b.bits).bit_count() / sqrt(pa * pb)


def _kernel(metric: str):
    if metric == "jaccard":
        return jaccard
    if metric == "cosine":
        return binary_cosine
    raise ValueError(f"unknown similarity metric {metric!r}")


def similarity(
    a: BitVector, b: BitVector, schema: FormSchema, metric: str = "jaccard"
) -> SimilarityScore:
    value = _kernel(metric)(a, b)
    shared_bits = a.bits & b.bits
    shared = frozenset(
        schema.by_bit[i].id for i in range(a.length) if shared_bits >> i & 1
    )
    return SimilarityScore(value, shared)


def rank_by_reference(
    reference_id: str,
    candidates: Sequence[CrimeRecord],
    schema: FormSchema,
    reference: CrimeRecord | None = None,
    metric: str = "jaccard",
) -> list[tuple[str, SimilarityScore]]:
    """Order candidates by similarity to a reference crime, best first.

    The reference may be passed explicitly or be present among the
    candidates (it is then used as reference and dropped from the output).
    Ties are broken by ascending record id so rankings are reproducible.
    """
    if reference is None:
        for record in candidates:
            if record.record_id == reference_id:
                reference = record
                break
        else:
            raise KeyError(f"reference record {reference_id!r} not found among candidates")
    ref_vec = encode_binary(reference, schema)

    scored = []
    for record in candidates:
        if record.record_id == reference_id:
            continue
        score = similarity(ref_vec, encode_binary(record, schema), schema, metric)
        scored.append((record.record_id, score))
    scored.sort(key=lambda item: item[0])
    scored.sort(key=lambda item: item[1].value, reverse=True)
    return scored


def encode_all(records: Iterable[CrimeRecord], schema: FormSchema) -> list[BitVector]:
    return [encode_binary(r, schema) for r in records]
