"""Average-linkage agglomerative clustering over modus-operandi distance.

Distance is 1 - Jaccard on the encoded bit vectors. Clusters merge greedily
while the smallest average inter-cluster distance stays within the cutoff.
Ties on distance are broken by the lexicographically smallest pair of
cluster representative ids (representative = smallest record id in the
cluster), which makes the merge sequence fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..records import CrimeRecord
from ..schema import FormSchema


@dataclass(frozen=True)
class ClusterSet:
    """A partition of the input record ids at a given distance cutoff."""

    clusters: tuple[tuple[str, ...], ...]
    threshold: float

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "clusters": [list(c) for c in self.clusters],
        }

    def membership(self) -> dict[str, int]:
        return {rid: i for i, members in enumerate(self.clusters) for rid in members}


def distance_matrix(records: Sequence[CrimeRecord], schema: FormSchema) -> np.ndarray:
    """Dense pairwise Jaccard-distance matrix (float64, zeros on the diagonal)."""
    n = len(records)
    rows = np.zeros((n, schema.parameter_count), dtype=np.uint8)
    for i, record in enumerate(records):
        for pid in record.checked:
            rows[i, schema.by_id[pid].bit_index] = 1
    inter = (rows @ rows.T).astype(np.float64)
    pop = rows.sum(axis=1, dtype=np.int64)
    union = (pop[:, None] + pop[None, :] - inter).astype(np.float64)
    sim = np.where(union > 0, inter / np.maximum(union, 1.0), 0.0)
    dist = 1.0 - sim
    np.fill_diagonal(dist, 0.0)
    return dist


def _merge_sequence(
    base: np.ndarray, ids: Sequence[str], stop: float
) -> list[tuple[float, int, int]]:
    """Greedy average-linkage merges as (distance, root_i, root_j) triples.

    Stops once the smallest average inter-cluster distance exceeds ``stop``.
    Average distances are maintained with the size-weighted update rule,
    which is exact for unweighted average linkage.
    """
    n = base.shape[0]
    avg = base.copy()
    np.fill_diagonal(avg, np.inf)
    sizes = np.ones(n, dtype=np.int64)
    reps = list(ids)
    alive = np.ones(n, dtype=bool)
    merges: list[tuple[float, int, int]] = []

    for _ in range(n - 1):
        masked = np.where(alive[:, None] & alive[None, :], avg, np.inf)
        d_min = float(masked.min())
        if d_min > stop:
            break
        ti, tj = np.nonzero(masked == d_min)
        pairs = [(i, j) for i, j in zip(ti.tolist(), tj.tolist()) if i < j]
        i, j = min(pairs, key=lambda p: tuple(sorted((reps[p[0]], reps[p[1]]))))

        others = alive.copy()
        others[i] = others[j] = False
        idx = np.nonzero(others)[0]
        if idx.size:
            avg[i, idx] = (sizes[i] * avg[i, idx] + sizes[j] * avg[j, idx]) / (
                sizes[i] + sizes[j]
            )
            avg[idx, i] = avg[i, idx]
        sizes[i] += sizes[j]
        reps[i] = min(reps[i], reps[j])
        alive[j] = False
        merges.append((d_min, i, j))

    return merges


def _partition(
    ids: Sequence[str], merges: list[tuple[float, int, int]], threshold: float
) -> tuple[tuple[str, ...], ...]:
    """Apply the recorded merges up to the cutoff (prefix-stop replay)."""
    members: list[list[int] | None] = [[k] for k in range(len(ids))]
    for d, i, j in merges:
        if d > threshold:
            break
        members[i].extend(members[j])  # type: ignore[union-attr]
        members[j] = None
    clusters = [tuple(sorted(ids[k] for k in m)) for m in members if m is not None]
    clusters.sort(key=lambda c: c[0])
    return tuple(clusters)


def cluster(
    records: Sequence[CrimeRecord], threshold: float, schema: FormSchema
) -> ClusterSet:
    """Partition records, merging while average inter-cluster distance <= threshold."""
    if not records:
        raise ValueError("cannot cluster an empty record set")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    ids = [r.record_id for r in records]
    merges = _merge_sequence(distance_matrix(records, schema), ids, threshold)
    return ClusterSet(_partition(ids, merges, threshold), threshold)


def cluster_sweep(
    records: Sequence[CrimeRecord], thresholds: Sequence[float], schema: FormSchema
) -> dict[float, ClusterSet]:
    """Cluster once, cut at several thresholds.

    The greedy merge order does not depend on the cutoff, so one full run
    plus prefix replays is exactly equivalent to clustering per threshold.
    """
    if not records:
        raise ValueError("cannot cluster an empty record set")
    if not thresholds:
        return {}
    for t in thresholds:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"threshold {t} outside [0, 1]")
    ids = [r.record_id for r in records]
    merges = _merge_sequence(distance_matrix(records, schema), ids, max(thresholds))
    return {t: ClusterSet(_partition(ids, merges, t), t) for t in thresholds}
