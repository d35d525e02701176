"""Nearest-neighbor retrieval, neighbor indices and hubness counts."""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from lexalign.errors import DataError
from lexalign.embeddings import EmbeddingTable
from lexalign.metric.similarity import (
    DEFAULT_BATCH_SIZE,
    as_matrix,
    csls_scores,
    knn_mean_similarities,
    unit,
)

logger = logging.getLogger(__name__)


class RetrievalMethod(str, Enum):
    """Scoring used to rank target words."""
    NN_COSINE = "nn_cosine"
    CSLS = "csls"


@dataclass
class NeighborIndex:
    """Top-n target ids and scores per query, best first."""
    query_ids: np.ndarray
    ids: np.ndarray
    scores: np.ndarray
    k: int = 10
    method: RetrievalMethod = RetrievalMethod.CSLS
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.query_ids = np.asarray(self.query_ids, dtype=np.int64)
        self.ids = np.atleast_2d(np.asarray(self.ids, dtype=np.int64))
        self.scores = np.atleast_2d(np.asarray(self.scores, dtype=np.float64))
        if self.ids.shape != self.scores.shape or self.ids.shape[0] != len(self.query_ids):
            raise DataError("neighbor ids, scores and query ids disagree in shape")

    def __len__(self) -> int:
        return len(self.query_ids)

    @property
    def topn(self) -> int:
        return self.ids.shape[1]

    @property
    def rank1(self) -> np.ndarray:
        """Rank-1 target id per query."""
        return self.ids[:, 0]

    def neighbors_of(self, query_id: int) -> np.ndarray:
        """Ranked target ids for one source row id."""
        row = np.flatnonzero(self.query_ids == query_id)
        if row.size == 0:
            raise KeyError(query_id)
        return self.ids[row[0]]

    def as_dict(self) -> Dict[int, np.ndarray]:
        """Query id to ranked target ids."""
        return {int(q): self.ids[i] for i, q in enumerate(self.query_ids)}

    def to_tsv(self, path: Union[str, Path], src: EmbeddingTable, tgt: EmbeddingTable) -> None:
        """Write ``query_word, rank, target_word, score`` rows (rank starts at 1)."""
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            f.write("query_word\trank\ttarget_word\tscore\n")
            for i, q in enumerate(self.query_ids):
                for rank, (t, score) in enumerate(zip(self.ids[i], self.scores[i]), start=1):
                    f.write(f"{src.words[q]}\t{rank}\t{tgt.words[t]}\t{score:.6f}\n")


def top_n(scores: np.ndarray, topn: int):
    """
    Best ``topn`` columns per row, scores descending, ties to the lower index.

    Returns:
        (ids, values) arrays of shape (rows, min(topn, cols))
    """
    n_cols = scores.shape[1]
    topn = min(topn, n_cols)
    if topn == n_cols:
        order = np.argsort(-scores, axis=1, kind="stable")
        return order, np.take_along_axis(scores, order, axis=1)

    part = np.argpartition(-scores, topn - 1, axis=1)[:, :topn]
    part_scores = np.take_along_axis(scores, part, axis=1)
    kth = part_scores.min(axis=1)
    # rows with ties straddling the cut need a full stable sort
    ambiguous = (scores >= kth[:, None]).sum(axis=1) > topn

    ids = np.empty((scores.shape[0], topn), dtype=np.int64)
    values = np.empty((scores.shape[0], topn))
    for r in np.flatnonzero(~ambiguous):
        order = np.lexsort((part[r], -part_scores[r]))
        ids[r] = part[r][order]
        values[r] = part_scores[r][order]
    for r in np.flatnonzero(ambiguous):
        order = np.argsort(-scores[r], kind="stable")[:topn]
        ids[r] = order
        values[r] = scores[r][order]
    return ids, values


def map_vectors(vectors: np.ndarray, W) -> np.ndarray:
    weight = getattr(W, "weight", W)
    if weight is None:
        return vectors
    return vectors @ np.asarray(weight, dtype=np.float64).T


def nn_retrieve(
    queries: Union[EmbeddingTable, np.ndarray],
    W,
    targets: Union[EmbeddingTable, np.ndarray],
    method: Union[RetrievalMethod, str] = RetrievalMethod.CSLS,
    k: int = 10,
    topn: int = 10,
    query_ids: Optional[Sequence[int]] = None,
    max_targets: Optional[int] = None,
    exclude_self: bool = False,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> NeighborIndex:
    """
    Rank target words for mapped source queries.

    Γ terms for CSLS are computed over the full mapped query table and the
    full target table, whatever subset is actually retrieved.

    Args:
        queries: Source table (all rows are used for Γ_WX)
        W: MappingMatrix, d x d array, or None for the identity
        targets: Target table
        method: ``nn_cosine`` or ``csls``
        k: Neighborhood size for both Γ terms
        topn: Number of ranked targets kept per query
        query_ids: Source rows to retrieve for (default: all)
        max_targets: Only the first ``max_targets`` target rows are candidates
        exclude_self: Queries and targets are the same space; never return a
            query's own row and drop it from the Γ neighborhoods
        batch_size: Query rows per score chunk
        workers: Threads over query chunks; results are merged in query order

    Returns:
        NeighborIndex
    """
    method = RetrievalMethod(method)
    src = as_matrix(queries)
    tgt = as_matrix(targets)
    if tgt.shape[0] == 0:
        raise DataError("target set is empty")
    if query_ids is None:
        query_ids = np.arange(src.shape[0])
    query_ids = np.asarray(query_ids, dtype=np.int64)

    mapped = unit(map_vectors(src, W))
    tgt_unit = unit(tgt)
    n_cand = tgt.shape[0] if max_targets is None else min(max_targets, tgt.shape[0])

    if method == RetrievalMethod.CSLS:
        gamma_q = knn_mean_similarities(mapped, tgt_unit, k, exclude_self=exclude_self,
                                        batch_size=batch_size)
        if exclude_self:
            gamma_t = knn_mean_similarities(tgt_unit, mapped, k, exclude_self=True,
                                            batch_size=batch_size)[:n_cand]
        else:
            gamma_t = knn_mean_similarities(tgt_unit[:n_cand], mapped, k, batch_size=batch_size)
    else:
        gamma_q = np.zeros(src.shape[0])
        gamma_t = np.zeros(n_cand)

    candidates = tgt_unit[:n_cand]
    starts = list(range(0, len(query_ids), batch_size))

    def score_chunk(start: int):
        rows = query_ids[start:start + batch_size]
        if method == RetrievalMethod.CSLS:
            scores = csls_scores(mapped[rows], candidates, gamma_q[rows], gamma_t)
        else:
            scores = mapped[rows] @ candidates.T
        if exclude_self:
            in_range = rows < n_cand
            scores[np.flatnonzero(in_range), rows[in_range]] = -np.inf
        return top_n(scores, topn)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            chunks = list(executor.map(score_chunk, starts))
    else:
        chunks = [score_chunk(s) for s in starts]

    if chunks:
        ids = np.vstack([c[0] for c in chunks])
        scores = np.vstack([c[1] for c in chunks])
    else:
        width = min(topn, n_cand)
        ids = np.zeros((0, width), dtype=np.int64)
        scores = np.zeros((0, width))

    return NeighborIndex(
        query_ids=query_ids,
        ids=ids,
        scores=scores,
        k=k,
        method=method,
        metadata={"n_candidates": n_cand},
    )


def hubness_counts(index: NeighborIndex) -> Counter:
    """
    N_y(1): how many queries have each target as rank-1 neighbor.

    Returns a Counter, so targets that are nobody's rank-1 read as 0.
    """
    return Counter(int(t) for t in index.rank1)
