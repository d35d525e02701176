"""Measuring how far two embedding spaces are from isometric."""

from lexalign.isometry.persistence import (
    PersistenceDiagram,
    bottleneck_distance,
    gh_lower_bound,
    mst_edge_lengths,
    rips_persistence_deg0,
    top_cloud,
)
from lexalign.isometry.spectral import (
    eigenvector_similarity,
    laplacian_spectrum,
    mutual_knn_graph,
)
from lexalign.isometry.measures import (
    orthogonality_residual,
    pearson_correlation,
    spearman_correlation,
)
from lexalign.isometry.report import (
    DEFAULT_GRID,
    Correlation,
    IsometryPoint,
    IsometryReport,
    correlate_measures,
    isometry_sweep,
    read_measure_table,
)

__all__ = [
    "PersistenceDiagram",
    "bottleneck_distance",
    "gh_lower_bound",
    "mst_edge_lengths",
    "rips_persistence_deg0",
    "top_cloud",
    "eigenvector_similarity",
    "laplacian_spectrum",
    "mutual_knn_graph",
    "orthogonality_residual",
    "pearson_correlation",
    "spearman_correlation",
    "DEFAULT_GRID",
    "Correlation",
    "IsometryPoint",
    "IsometryReport",
    "correlate_measures",
    "isometry_sweep",
    "read_measure_table",
]
