"""Orthogonality residual and correlation statistics."""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from lexalign.errors import DataError


def orthogonality_residual(W) -> float:
    """||I - WᵀW||_F² for a MappingMatrix or square array."""
    W = np.asarray(getattr(W, "weight", W), dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DataError(f"mapping must be square, got shape {W.shape}")
    return float(np.sum((np.eye(W.shape[0]) - W.T @ W) ** 2))


def _is_missing(value) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def paired_values(a: Sequence[Optional[float]], b: Sequence[Optional[float]]) -> Tuple[np.ndarray, np.ndarray]:
    """Drop positions where either list is missing; at least three pairs must remain."""
    if len(a) != len(b):
        raise DataError(f"cannot correlate lists of length {len(a)} and {len(b)}")
    kept = [(x, y) for x, y in zip(a, b) if not _is_missing(x) and not _is_missing(y)]
    if len(kept) < 3:
        raise DataError(f"correlation needs at least 3 complete pairs, got {len(kept)}")
    xs, ys = zip(*kept)
    xs_arr, ys_arr = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    if np.ptp(xs_arr) == 0 or np.ptp(ys_arr) == 0:
        raise DataError("correlation is undefined for a constant list")
    return xs_arr, ys_arr


def pearson_correlation(a: Sequence[Optional[float]], b: Sequence[Optional[float]]) -> float:
    """Sample Pearson coefficient over the complete pairs."""
    r, _ = stats.pearsonr(*paired_values(a, b))
    return float(np.clip(r, -1.0, 1.0))


def spearman_correlation(a: Sequence[Optional[float]], b: Sequence[Optional[float]]) -> float:
    """Spearman rank coefficient over the complete pairs."""
    rho, _ = stats.spearmanr(*paired_values(a, b))
    return float(rho)
