"""Cosine, k-NN mean similarity and CSLS kernels."""

from typing import Optional, Union

import numpy as np

from lexalign.errors import DataError
from lexalign.embeddings import EmbeddingTable

# Rows per matrix-product chunk; 1024 x 200000 float64 scores is ~1.6 GB,
# so callers working at full vocabulary scale should pass a smaller value.
DEFAULT_BATCH_SIZE = 1024

ArrayOrTable = Union[np.ndarray, EmbeddingTable]


def as_matrix(data: ArrayOrTable) -> np.ndarray:
    """Vectors of a table, or the array itself, as float64."""
    if isinstance(data, EmbeddingTable):
        return data.vectors
    return np.asarray(data, dtype=np.float64)


def unit(vectors: np.ndarray) -> np.ndarray:
    """Unit-normalize rows (or a single vector); zero rows raise DataError."""
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DataError("cosine similarity is undefined for a zero vector")
    return vectors / norms


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u, v) / (|u| |v|); raises DataError on a zero vector."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DataError("cosine similarity is undefined for a zero vector")
    value = float(np.dot(u, v) / (nu * nv))
    return min(1.0, max(-1.0, value))


def knn_mean_similarities(
    queries: ArrayOrTable,
    candidates: ArrayOrTable,
    k: int,
    exclude_self: bool = False,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> np.ndarray:
    """
    Mean cosine similarity of every query to its k most similar candidates.

    Exact k-NN over chunked matrix products. With ``exclude_self`` the
    queries must be the candidates themselves (same row order) and each
    query's own row is ignored.

    Args:
        queries: q x d matrix or table
        candidates: m x d matrix or table
        k: Neighborhood size
        exclude_self: Ignore the diagonal (queries == candidates)
        batch_size: Query rows per chunk

    Returns:
        Array of length q
    """
    q = unit(as_matrix(queries))
    c = unit(as_matrix(candidates))
    available = c.shape[0] - (1 if exclude_self else 0)
    if c.shape[0] == 0:
        raise DataError("candidate set is empty")
    if k < 1 or k > available:
        raise DataError(f"k={k} exceeds the {available} available candidate(s)")
    if exclude_self and q.shape[0] != c.shape[0]:
        raise DataError("exclude_self requires queries and candidates to be the same set")

    out = np.empty(q.shape[0])
    for start in range(0, q.shape[0], batch_size):
        sims = q[start:start + batch_size] @ c.T
        if exclude_self:
            rows = np.arange(sims.shape[0])
            sims[rows, rows + start] = -np.inf
        top = np.partition(sims, sims.shape[1] - k, axis=1)[:, -k:]
        out[start:start + sims.shape[0]] = top.mean(axis=1)
    return out


def knn_mean_sim(b: np.ndarray, candidates: ArrayOrTable, k: int) -> float:
    """Γ_A(b): mean cosine between ``b`` and its k nearest candidates."""
    return float(knn_mean_similarities(np.atleast_2d(b), candidates, k)[0])


def csls(
    x: np.ndarray,
    y: np.ndarray,
    W: np.ndarray,
    gamma_src: float,
    gamma_tgt: float,
) -> float:
    """
    CSLS(x, y) = 2 cos(Wx, y) - Γ_Y(Wx) - Γ_WX(y).

    Args:
        x: Source vector
        y: Target vector
        W: d x d mapping (a MappingMatrix's ``weight`` or any array)
        gamma_src: Γ_Y(Wx), precomputed
        gamma_tgt: Γ_WX(y), precomputed with the same k
    """
    W = getattr(W, "weight", W)
    return 2.0 * cosine(np.asarray(W) @ x, y) - gamma_src - gamma_tgt


def csls_scores(
    mapped_queries: np.ndarray,
    targets: np.ndarray,
    gamma_queries: np.ndarray,
    gamma_targets: np.ndarray,
) -> np.ndarray:
    """
    CSLS score matrix between already-mapped queries and targets.

    Both inputs must be unit-normalized rows; the result is
    ``2 Q T^T - Γ_q[:, None] - Γ_t[None, :]``.
    """
    return 2.0 * (mapped_queries @ targets.T) - gamma_queries[:, None] - gamma_targets[None, :]


def best_match(
    rows: np.ndarray,
    cols: np.ndarray,
    row_offsets: Optional[np.ndarray] = None,
    col_offsets: Optional[np.ndarray] = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
):
    """
    Rank-1 column for every row under ``2 cos - offsets``.

    With zero offsets this is plain cosine NN (up to the factor 2); with Γ
    offsets it is CSLS. Ties go to the lower column index.

    Returns:
        (ids, scores) arrays of length len(rows)
    """
    rows = unit(rows)
    cols = unit(cols)
    if row_offsets is None:
        row_offsets = np.zeros(rows.shape[0])
    if col_offsets is None:
        col_offsets = np.zeros(cols.shape[0])

    ids = np.empty(rows.shape[0], dtype=np.int64)
    scores = np.empty(rows.shape[0])
    for start in range(0, rows.shape[0], batch_size):
        stop = start + batch_size
        block = csls_scores(rows[start:stop], cols, row_offsets[start:stop], col_offsets)
        best = np.argmax(block, axis=1)
        ids[start:stop] = best
        scores[start:stop] = block[np.arange(block.shape[0]), best]
    return ids, scores
