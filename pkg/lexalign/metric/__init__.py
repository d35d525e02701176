"""Similarity kernels, CSLS retrieval and hubness."""

from lexalign.metric.similarity import (
    DEFAULT_BATCH_SIZE,
    best_match,
    cosine,
    csls,
    csls_scores,
    knn_mean_sim,
    knn_mean_similarities,
    unit,
)
from lexalign.metric.retrieval import (
    NeighborIndex,
    RetrievalMethod,
    hubness_counts,
    map_vectors,
    nn_retrieve,
    top_n,
)

__all__ = [
    "DEFAULT_BATCH_SIZE",
    "best_match",
    "cosine",
    "csls",
    "csls_scores",
    "knn_mean_sim",
    "knn_mean_similarities",
    "unit",
    "NeighborIndex",
    "RetrievalMethod",
    "hubness_counts",
    "map_vectors",
    "nn_retrieve",
    "top_n",
]
