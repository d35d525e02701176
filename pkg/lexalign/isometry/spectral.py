"""Eigenvector similarity of nearest-neighbor graphs."""

import numpy as np
from scipy import linalg

from lexalign.embeddings import EmbeddingTable
from lexalign.errors import DataError
from lexalign.metric import top_n, unit


def mutual_knn_graph(points: np.ndarray, k: int = 10) -> np.ndarray:
    """
    Symmetric 0/1 adjacency: i and j are joined when each is among the other's
    k nearest neighbors by cosine similarity.
    """
    n = points.shape[0]
    if n < k + 1:
        raise DataError(f"need at least {k + 1} points for a {k}-NN graph, got {n}")
    sims = unit(points) @ unit(points).T
    np.fill_diagonal(sims, -np.inf)
    neighbors, _ = top_n(sims, k)

    knn = np.zeros((n, n), dtype=bool)
    knn[np.repeat(np.arange(n), k), neighbors.ravel()] = True
    return (knn & knn.T).astype(np.float64)


def laplacian_spectrum(adjacency: np.ndarray) -> np.ndarray:
    """Eigenvalues of the unnormalized Laplacian D - A, largest first."""
    laplacian = np.diag(adjacency.sum(axis=1)) - adjacency
    return np.sort(linalg.eigh(laplacian, eigvals_only=True))[::-1]


def energy_rank(eigenvalues: np.ndarray, energy: float = 0.9) -> int:
    """Smallest j whose first j eigenvalues sum to more than ``energy`` of the total."""
    total = eigenvalues.sum()
    if total <= 0:
        return len(eigenvalues)
    return int(np.argmax(np.cumsum(eigenvalues) > energy * total)) + 1


def eigenvector_similarity(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    n_points: int = 5000,
    knn_k: int = 10,
    energy: float = 0.9,
) -> float:
    """
    Squared difference of the leading Laplacian spectra of the two k-NN graphs.

    Both graphs are built on the ``n_points`` most frequent words; the
    spectra are compared over the shorter of the two 90%-energy prefixes.
    0 for identical or permuted copies of the same table.
    """
    if n_points < knn_k + 1:
        raise DataError(f"n_points must be at least knn_k + 1 = {knn_k + 1}")
    if n_points > min(len(src), len(tgt)):
        raise DataError(f"n_points={n_points} exceeds a vocabulary")
    if not 0 < energy <= 1:
        raise DataError("energy must be in (0, 1]")

    spec_src = laplacian_spectrum(mutual_knn_graph(src.vectors[:n_points], knn_k))
    spec_tgt = laplacian_spectrum(mutual_knn_graph(tgt.vectors[:n_points], knn_k))
    r = min(energy_rank(spec_src, energy), energy_rank(spec_tgt, energy))
    return float(np.sum((spec_src[:r] - spec_tgt[:r]) ** 2))
