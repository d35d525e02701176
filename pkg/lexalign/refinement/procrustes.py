"""Orthogonal Procrustes."""

import logging

import numpy as np
from scipy import linalg

from lexalign.alignment import MappingMatrix
from lexalign.errors import DataError

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10


def _fix_signs(U: np.ndarray, Vt: np.ndarray):
    """Flip singular vector pairs so the largest-magnitude entry of each column of U is positive."""
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[idx, np.arange(U.shape[1])] < 0, -1.0, 1.0)
    return U * signs, Vt * signs[:, None]


def procrustes_solve(src_vectors: np.ndarray, tgt_vectors: np.ndarray) -> MappingMatrix:
    """
    Orthogonal W minimizing ||W x_i - y_i|| summed over paired rows.

    W = U Vᵀ for U Σ Vᵀ the SVD of ``tgtᵀ src``. A rank-deficient
    cross-covariance still gives an orthogonal W; it is reported in the
    provenance as ``rank_deficient``.

    Args:
        src_vectors: n x d source rows
        tgt_vectors: n x d target rows, paired with the source rows
    """
    src_vectors = np.asarray(src_vectors, dtype=np.float64)
    tgt_vectors = np.asarray(tgt_vectors, dtype=np.float64)
    if src_vectors.ndim != 2 or src_vectors.shape != tgt_vectors.shape:
        raise DataError(
            f"paired matrices must have equal 2-d shapes, got {src_vectors.shape} and {tgt_vectors.shape}"
        )
    if src_vectors.shape[0] == 0:
        raise DataError("Procrustes needs at least one pair")

    U, S, Vt = linalg.svd(tgt_vectors.T @ src_vectors)
    U, Vt = _fix_signs(U, Vt)
    rank = int(np.sum(S > RANK_TOL * max(S[0], RANK_TOL)))
    rank_deficient = rank < S.shape[0]
    if rank_deficient:
        logger.warning(f"Cross-covariance has rank {rank} < {S.shape[0]}; the solution is not unique")

    return MappingMatrix(
        U @ Vt,
        {"method": "procrustes", "n_pairs": src_vectors.shape[0], "rank": rank, "rank_deficient": rank_deficient},
    )
