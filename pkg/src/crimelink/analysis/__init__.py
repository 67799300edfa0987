"""Analysis toolkit: similarity ranking, clustering, descriptive statistics,
aoristic temporal analysis, streaming series detection, and linkage evaluation."""

from .aoristic import AoristicGrid, aoristic
from .clustering import ClusterSet, cluster, cluster_sweep, distance_matrix
from .evaluation import LinkageEval, evaluate_linkage
from .series import (
    DetectorConfig,
    SeriesAlert,
    SeriesMatch,
    detect_series,
    haversine_km,
    interval_gap_hours,
)
from .similarity import SimilarityScore, binary_cosine, jaccard, rank_by_reference, similarity
from .stats import FrequencyTable, descriptive_stats

__all__ = [
    "AoristicGrid",
    "aoristic",
    "ClusterSet",
    "cluster",
    "cluster_sweep",
    "distance_matrix",
    "LinkageEval",
    "evaluate_linkage",
    "DetectorConfig",
    "SeriesAlert",
    "SeriesMatch",
    "detect_series",
    "haversine_km",
    "interval_gap_hours",
    "SimilarityScore",
    "binary_cosine",
    "jaccard",
    "rank_by_reference",
    "similarity",
    "FrequencyTable",
    "descriptive_stats",
]
