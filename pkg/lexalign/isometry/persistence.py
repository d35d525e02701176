"""
Degree-0 persistence and bottleneck distance.

At degree 0 the Rips filtration only records when connected components
merge, so the finite deaths are the edge lengths of a Euclidean minimum
spanning tree (equivalently, single-linkage merge heights).
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist, pdist, squareform

from lexalign.embeddings import EmbeddingTable, center_unit_rows
from lexalign.errors import DataError


@dataclass
class PersistenceDiagram:
    """Finite (birth, death) intervals plus the number of infinite bars left out."""
    intervals: np.ndarray
    dropped_infinite: int = 0

    def __post_init__(self):
        self.intervals = np.asarray(self.intervals, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(self.intervals)):
            raise DataError("persistence intervals must be finite")
        if np.any(self.intervals[:, 0] > self.intervals[:, 1]):
            raise DataError("every interval needs birth <= death")

    def __len__(self) -> int:
        return self.intervals.shape[0]

    @property
    def births(self) -> np.ndarray:
        return self.intervals[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.intervals[:, 1]

    def to_dict(self) -> Dict[str, Any]:
        return {"intervals": self.intervals.tolist(), "dropped_infinite": self.dropped_infinite}


DENSE_LIMIT = 2000


def mst_edge_lengths(points: np.ndarray) -> np.ndarray:
    """
    Edge lengths of a Euclidean minimum spanning tree (Prim), ascending.

    Up to ``DENSE_LIMIT`` points the full distance matrix is built once;
    above it, distance rows are computed as vertices join the tree.
    """
    n = points.shape[0]
    distances = squareform(pdist(points)) if n <= DENSE_LIMIT else None

    def row(j: int) -> np.ndarray:
        if distances is not None:
            return distances[j]
        return cdist(points[j:j + 1], points)[0]

    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    nearest = row(0).copy()
    lengths = np.empty(n - 1)
    for i in range(n - 1):
        candidates = np.where(in_tree, np.inf, nearest)
        j = int(np.argmin(candidates))
        lengths[i] = candidates[j]
        in_tree[j] = True
        np.minimum(nearest, row(j), out=nearest)
    return np.sort(lengths)


def rips_persistence_deg0(points: np.ndarray) -> PersistenceDiagram:
    """
    Degree-0 Vietoris-Rips persistence of a point cloud under the Euclidean metric.

    Every point is born at 0; each merge kills one component at the MST edge
    length. The component that never dies is dropped and counted.

    Args:
        points: n x d matrix, n >= 2 (duplicates give zero-length bars)
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise DataError("persistence needs at least two points")
    deaths = mst_edge_lengths(points)
    return PersistenceDiagram(np.column_stack([np.zeros_like(deaths), deaths]), dropped_infinite=1)


def _matching_costs(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """
    Cost matrix of the diagonal-augmented assignment problem.

    Rows are f's points then one diagonal slot per g point; columns are g's
    points then one diagonal slot per f point. A point may only go to its
    own diagonal slot; diagonal slots match each other for free.
    """
    m, n = len(f), len(g)
    costs = np.full((m + n, n + m), np.inf)
    if m and n:
        costs[:m, :n] = np.maximum(
            np.abs(f[:, None, 0] - g[None, :, 0]),
            np.abs(f[:, None, 1] - g[None, :, 1]),
        )
    costs[np.arange(m), n + np.arange(m)] = (f[:, 1] - f[:, 0]) / 2
    costs[m + np.arange(n), np.arange(n)] = (g[:, 1] - g[:, 0]) / 2
    costs[m:, n:] = 0.0
    return costs


def _has_perfect_matching(allowed: np.ndarray) -> bool:
    matched = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return bool(np.all(matched >= 0))


def _bottleneck_common_birth(f: np.ndarray, g: np.ndarray) -> float:
    """
    Bottleneck distance when every point of both diagrams has the same birth.

    Points then live on a line. Some optimal matching pairs the k longest
    bars of each side in sorted order and sends the rest to the diagonal,
    so it is enough to take the best k.
    """
    a = np.sort(f[:, 1] - f[:, 0])[::-1]
    b = np.sort(g[:, 1] - g[:, 0])[::-1]
    m, n = len(a), len(b)
    size = max(m, n) + 1
    half_a = np.zeros(size)
    half_b = np.zeros(size)
    half_a[:m] = a / 2
    half_b[:n] = b / 2
    # tail[k]: cost of sending everything from rank k on to the diagonal
    tail = np.maximum(
        np.maximum.accumulate(half_a[::-1])[::-1],
        np.maximum.accumulate(half_b[::-1])[::-1],
    )

    k_max = min(m, n)
    paired = np.zeros(k_max + 1)
    if k_max:
        paired[1:] = np.maximum.accumulate(np.abs(a[:k_max] - b[:k_max]))
    return float(np.min(np.maximum(paired, tail[:k_max + 1])))


def bottleneck_distance(f: PersistenceDiagram, g: PersistenceDiagram) -> float:
    """
    Exact bottleneck distance under the L∞ ground metric.

    Binary search over the finite set of candidate costs (point to point
    and point to diagonal) with bipartite-matching feasibility. Diagrams
    whose points all share one birth value (degree-0 Rips diagrams) take an
    exact sorted-matching shortcut instead.
    """
    if len(f) == 0 and len(g) == 0:
        return 0.0
    births = np.concatenate([f.births, g.births])
    if np.all(births == births[0]):
        return _bottleneck_common_birth(f.intervals, g.intervals)

    costs = _matching_costs(f.intervals, g.intervals)
    candidates = np.unique(costs[np.isfinite(costs)])

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(costs <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def top_cloud(table: EmbeddingTable, n_points: int) -> np.ndarray:
    """Mean-centered, unit-normed vectors of the ``n_points`` most frequent words."""
    if n_points < 2:
        raise DataError(f"n_points must be at least 2, got {n_points}")
    if n_points > len(table):
        raise DataError(f"n_points={n_points} exceeds the vocabulary of {len(table)}")
    return center_unit_rows(table.vectors[:n_points], table.words[:n_points])


def gh_lower_bound(src: EmbeddingTable, tgt: EmbeddingTable, n_points: int = 5000) -> float:
    """
    Bottleneck distance between the degree-0 diagrams of the two top-``n_points`` clouds.

    A lower bound on the Gromov-Hausdorff distance between the spaces;
    0 when the clouds are isometric.
    """
    return bottleneck_distance(
        rips_persistence_deg0(top_cloud(src, n_points)),
        rips_persistence_deg0(top_cloud(tgt, n_points)),
    )
