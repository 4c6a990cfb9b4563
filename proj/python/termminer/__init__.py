"""Python bindings for the termminer core library."""

from ._core import (
    BagEntry,
    ClusteringResult,
    Codebook,
    KeywordCluster,
    Segment,
    SubsequenceBag,
    TokenSpan,
    UnitSequence,
    generate_corpus,
    hac_ward,
    kmeans,
    leader_cluster,
    levenshtein,
    local_align,
    merge_boundaries,
    mine_pairs,
    ngram_counts,
    normalized_levenshtein,
    suggest_k,
)

__all__ = [
    "BagEntry",
    "ClusteringResult",
    "Codebook",
    "KeywordCluster",
    "Segment",
    "SubsequenceBag",
    "TokenSpan",
    "UnitSequence",
    "generate_corpus",
    "hac_ward",
    "kmeans",
    "leader_cluster",
    "levenshtein",
    "local_align",
    "merge_boundaries",
    "mine_pairs",
    "ngram_counts",
    "normalized_levenshtein",
    "suggest_k",
]
