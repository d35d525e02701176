"""Isometry sweeps over vocabulary sizes and measure/accuracy correlations."""

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from lexalign.embeddings import EmbeddingTable
from lexalign.errors import DataError
from lexalign.isometry.measures import orthogonality_residual, pearson_correlation, spearman_correlation
from lexalign.isometry.persistence import gh_lower_bound
from lexalign.isometry.spectral import eigenvector_similarity
from lexalign.logging import Logger, NullLogger

logger = logging.getLogger(__name__)

DEFAULT_GRID = (100, 500, 1000, 5000, 10000)
MISSING = {"", "*", "-", "nan", "NA"}
MEASURE_COLUMNS = ("gh", "eigenvector_similarity", "orthogonality_residual")

PathLike = Union[str, Path]


@dataclass
class IsometryPoint:
    """Measures at one vocabulary size."""
    n_points: int
    gh_lower_bound: float
    eigenvector_similarity: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_points": self.n_points,
            "gh_lower_bound": self.gh_lower_bound,
            "eigenvector_similarity": self.eigenvector_similarity,
        }


@dataclass
class IsometryReport:
    """How far two spaces are from isometric, over a grid of vocabulary sizes."""
    points: List[IsometryPoint] = field(default_factory=list)
    orthogonality_residual: Optional[float] = None
    pair: str = ""

    def at(self, n_points: int) -> IsometryPoint:
        for point in self.points:
            if point.n_points == n_points:
                return point
        raise KeyError(n_points)

    @property
    def gh_lower_bound(self) -> Optional[float]:
        """GH bound at the largest vocabulary size computed."""
        return self.points[-1].gh_lower_bound if self.points else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "pair": self.pair,
            "gh_lower_bound": self.gh_lower_bound,
            "orthogonality_residual": self.orthogonality_residual,
            "points": [p.to_dict() for p in self.points],
        }

    def write_json(self, path: PathLike) -> None:
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)

    def write_csv(self, path: PathLike) -> None:
        """One row per vocabulary size, in the column layout :func:`correlate_measures` reads."""
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["pair", "n_points", *MEASURE_COLUMNS])
            for point in self.points:
                writer.writerow([
                    self.pair,
                    point.n_points,
                    point.gh_lower_bound,
                    "" if point.eigenvector_similarity is None else point.eigenvector_similarity,
                    "" if self.orthogonality_residual is None else self.orthogonality_residual,
                ])


def sweep_grid(grid: Iterable[int], vocab: int) -> List[int]:
    """Grid sizes clipped to the vocabulary, de-duplicated, ascending."""
    return sorted({min(int(n), vocab) for n in grid if n >= 2})


def isometry_sweep(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    grid: Sequence[int] = DEFAULT_GRID,
    W=None,
    knn_k: int = 10,
    energy: float = 0.9,
    eigen: bool = True,
    pair: str = "",
    run_logger: Optional[Logger] = None,
    workers: int = 1,
) -> IsometryReport:
    """
    GH lower bound and eigenvector similarity at every grid size.

    Eigenvector similarity is left empty where a size is too small for the
    k-NN graph. With ``W`` the orthogonality residual is added.
    """
    run_log = run_logger or NullLogger()
    sizes = sweep_grid(grid, min(len(src), len(tgt)))
    if not sizes:
        raise DataError("isometry sweep needs at least two points per side")

    def measure(n: int) -> IsometryPoint:
        gh = gh_lower_bound(src, tgt, n)
        lam = eigenvector_similarity(src, tgt, n, knn_k, energy) if eigen and n > knn_k else None
        return IsometryPoint(n, gh, lam)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            points = list(executor.map(measure, sizes))
    else:
        points = [measure(n) for n in sizes]

    for point in points:
        run_log.info("isometry.point", f"n={point.n_points}", point.to_dict())

    residual = orthogonality_residual(W) if W is not None else None
    return IsometryReport(points=points, orthogonality_residual=residual, pair=pair)


@dataclass
class Correlation:
    """Correlation of one isometry measure with one accuracy column."""
    measure: str
    accuracy: str
    pearson: float
    spearman: float
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "measure": self.measure,
            "accuracy": self.accuracy,
            "pearson": self.pearson,
            "spearman": self.spearman,
            "abs_pearson": abs(self.pearson),
            "n": self.n,
        }


def read_measure_table(path: PathLike) -> Dict[str, List[Optional[float]]]:
    """Columns of a CSV of per-pair values; ``*``, ``-`` and blanks read as missing."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise DataError(f"{path}: no rows")
    columns: Dict[str, List[Optional[float]]] = {}
    for name in rows[0]:
        if name in ("pair", "n_points"):
            continue
        values = []
        for row in rows:
            raw = (row.get(name) or "").strip()
            values.append(None if raw in MISSING else float(raw))
        columns[name] = values
    return columns


def correlate_measures(
    table: Union[PathLike, Dict[str, List[Optional[float]]]],
    measures: Optional[Sequence[str]] = None,
    accuracies: Optional[Sequence[str]] = None,
) -> List[Correlation]:
    """
    Pearson and Spearman correlation of every measure column with every accuracy column.

    Args:
        table: CSV path or already-read columns
        measures: Measure columns (default: the isometry measures present)
        accuracies: Accuracy columns (default: every other column)
    """
    columns = table if isinstance(table, dict) else read_measure_table(table)
    if measures is None:
        measures = [c for c in MEASURE_COLUMNS if c in columns]
    if accuracies is None:
        accuracies = [c for c in columns if c not in measures]
    for name in [*measures, *accuracies]:
        if name not in columns:
            raise DataError(f"column {name!r} not found")

    results = []
    for measure in measures:
        for accuracy in accuracies:
            a, b = columns[measure], columns[accuracy]
            n = sum(1 for x, y in zip(a, b) if x is not None and y is not None)
            results.append(Correlation(
                measure=measure,
                accuracy=accuracy,
                pearson=pearson_correlation(a, b),
                spearman=spearman_correlation(a, b),
                n=n,
            ))
    return results
