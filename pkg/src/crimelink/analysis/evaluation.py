"""Pairwise linkage evaluation against planted ground truth.

A positive pair is two records sharing a truth series id (noise records map
to None and form no positive pairs). Precision is over pairs placed in the
same predicted cluster; with no predicted pairs precision is defined as 1,
and with no true pairs recall is defined as 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from .clustering import ClusterSet


@dataclass(frozen=True)
class LinkageEval:
    precision: float
    recall: float
    f1: float
    predicted_pairs: int
    true_pairs: int
    shared_pairs: int

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "predicted_pairs": self.predicted_pairs,
            "true_pairs": self.true_pairs,
            "shared_pairs": self.shared_pairs,
        }


def evaluate_linkage(
    predicted: ClusterSet, truth: Mapping[str, str | None]
) -> LinkageEval:
    ids = [rid for members in predicted.clusters for rid in members]
    missing = [rid for rid in ids if rid not in truth]
    if missing:
        raise ValueError(f"records missing from ground truth: {missing[:5]}")

    predicted_pairs = set()
    for members in predicted.clusters:
        for a, b in combinations(sorted(members), 2):
            predicted_pairs.add((a, b))

    by_series: dict[str, list[str]] = {}
    for rid in ids:
        series = truth[rid]
        if series is not None:
            by_series.setdefault(series, []).append(rid)
    true_pairs = set()
    for rids in by_series.values():
        for a, b in combinations(sorted(rids), 2):
            true_pairs.add((a, b))

    shared = len(predicted_pairs & true_pairs)
    precision = shared / len(predicted_pairs) if predicted_pairs else 1.0
    recall = shared / len(true_pairs) if true_pairs else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if (precision + recall) > 0
        else 0.0
    )
    return LinkageEval(precision, recall, f1, len(predicted_pairs), len(true_pairs), shared)
