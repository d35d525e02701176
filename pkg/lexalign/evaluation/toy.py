"""
Two-dimensional toy data where distribution matching is ambiguous.

Three shapes (disc, rectangle, triangle) each host a sparse large class
and a dense small class. The large classes are mirror-symmetric about the
x-axis, so a wrong orthogonal map aligns them as well as the planted one;
only the small off-axis classes tell the two apart.
"""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from lexalign.embeddings import AlignedLexicon, EmbeddingTable, save_embeddings, save_lexicon
from lexalign.errors import ConfigError

# clockwise 90° rotation followed by reflection along the x-axis
PLANTED_TRANSFORM = ((0.0, 1.0), (1.0, 0.0))
# counter-clockwise 90° rotation, the usual wrong answer
COUNTER_CLOCKWISE = ((0.0, -1.0), (1.0, 0.0))

N_CLASSES = 6


@dataclass
class ToySpec:
    """Geometry, sizes and planted transform of the toy dataset."""
    seed: int = 0
    large_points: int = 300
    small_points: int = 60
    anchors_per_class: int = 0
    disc_radius: float = 1.0
    rect_center: Tuple[float, float] = (3.0, 0.0)
    rect_size: Tuple[float, float] = (2.0, 1.0)
    tri_center: Tuple[float, float] = (-3.0, 0.0)
    tri_size: float = 1.5
    small_scale: float = 0.3
    disc_small_center: Tuple[float, float] = (0.0, 0.5)
    rect_small_center: Tuple[float, float] = (3.4, 0.25)
    tri_small_center: Tuple[float, float] = (-2.6, 0.3)
    transform: Tuple[Tuple[float, float], Tuple[float, float]] = PLANTED_TRANSFORM

    def __post_init__(self):
        self.rect_center = tuple(self.rect_center)
        self.rect_size = tuple(self.rect_size)
        self.tri_center = tuple(self.tri_center)
        self.disc_small_center = tuple(self.disc_small_center)
        self.rect_small_center = tuple(self.rect_small_center)
        self.tri_small_center = tuple(self.tri_small_center)
        self.transform = tuple(tuple(float(x) for x in row) for row in self.transform)
        T = self.transform_matrix
        if T.shape != (2, 2) or not np.allclose(T.T @ T, np.eye(2), atol=1e-12):
            raise ConfigError("planted transform must be a 2x2 orthogonal matrix")
        if self.large_points < 1 or self.small_points < 1:
            raise ConfigError("every class needs at least one point")
        if self.anchors_per_class < 0:
            raise ConfigError("anchors_per_class must be non-negative")
        if not 0 < self.small_scale < 1:
            raise ConfigError("small_scale must be in (0, 1)")

    @property
    def transform_matrix(self) -> np.ndarray:
        return np.asarray(self.transform, dtype=np.float64)

    @property
    def class_sizes(self) -> List[int]:
        """Points per class; classes 1, 3, 5 are the large ones."""
        return [self.large_points, self.small_points] * 3

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ToySpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown toy option(s): {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class ToyData:
    """Generated source and target tables, anchors and class labels."""
    src: EmbeddingTable
    tgt: EmbeddingTable
    anchors: AlignedLexicon
    src_labels: np.ndarray
    tgt_labels: np.ndarray
    spec: ToySpec = field(repr=False, default_factory=ToySpec)

    def save(self, directory: Union[str, Path]) -> Dict[str, str]:
        """Write ``src.vec``, ``tgt.vec``, ``anchors.txt`` and ``toy_spec.json``."""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "src": out / "src.vec",
            "tgt": out / "tgt.vec",
            "anchors": out / "anchors.txt",
            "spec": out / "toy_spec.json",
        }
        save_embeddings(self.src, paths["src"])
        save_embeddings(self.tgt, paths["tgt"])
        save_lexicon(self.anchors.pairs, self.src, self.tgt, paths["anchors"])
        with open(paths["spec"], "w", encoding="utf-8") as f:
            json.dump(self.spec.to_dict(), f, indent=2)
        return {k: str(v) for k, v in paths.items()}


def _disc(rng: np.random.Generator, n: int, center, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([center[0] + r * np.cos(theta), center[1] + r * np.sin(theta)])


def _rectangle(rng: np.random.Generator, n: int, center, size) -> np.ndarray:
    x = rng.uniform(center[0] - size[0] / 2, center[0] + size[0] / 2, n)
    y = rng.uniform(center[1] - size[1] / 2, center[1] + size[1] / 2, n)
    return np.column_stack([x, y])


def _triangle(rng: np.random.Generator, n: int, center, size: float) -> np.ndarray:
    """Left-pointing isosceles triangle, symmetric about the horizontal line through ``center``."""
    h = size / 2
    a = np.array([center[0] - h, center[1]])
    b = np.array([center[0] + h, center[1] + h])
    c = np.array([center[0] + h, center[1] - h])
    s = np.sqrt(rng.random(n))[:, None]
    t = rng.random(n)[:, None]
    return (1 - s) * a + s * (1 - t) * b + s * t * c


def _draw(spec: ToySpec, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    k = spec.small_scale
    rect_small = (spec.rect_size[0] * k, spec.rect_size[1] * k)
    parts = [
        _disc(rng, spec.large_points, (0.0, 0.0), spec.disc_radius),
        _disc(rng, spec.small_points, spec.disc_small_center, spec.disc_radius * k),
        _rectangle(rng, spec.large_points, spec.rect_center, spec.rect_size),
        _rectangle(rng, spec.small_points, spec.rect_small_center, rect_small),
        _triangle(rng, spec.large_points, spec.tri_center, spec.tri_size),
        _triangle(rng, spec.small_points, spec.tri_small_center, spec.tri_size * k),
    ]
    labels = np.concatenate([np.full(len(p), c + 1) for c, p in enumerate(parts)])
    points = np.vstack(parts)
    order = rng.permutation(len(points))
    return points[order], labels[order]


def _tokens(labels: np.ndarray) -> Tuple[str, ...]:
    seen: Dict[int, int] = {}
    tokens = []
    for label in labels:
        i = seen.get(int(label), 0)
        seen[int(label)] = i + 1
        tokens.append(f"c{int(label)}_{i}")
    return tuple(tokens)


def generate_toy(spec: ToySpec) -> ToyData:
    """
    Draw source points, and target points as the planted transform of an
    independent draw. Anchors pair random source points of each class with
    the target point of the same class nearest to their transformed position.
    """
    rng = np.random.default_rng(spec.seed)
    src_points, src_labels = _draw(spec, rng)
    tgt_raw, tgt_labels = _draw(spec, rng)
    T = spec.transform_matrix
    tgt_points = tgt_raw @ T.T

    src = EmbeddingTable(_tokens(src_labels), src_points)
    tgt = EmbeddingTable(_tokens(tgt_labels), tgt_points)

    pairs = []
    for label in range(1, N_CLASSES + 1):
        src_rows = np.flatnonzero(src_labels == label)
        tgt_rows = np.flatnonzero(tgt_labels == label)
        n = min(spec.anchors_per_class, len(src_rows))
        for s in rng.choice(src_rows, size=n, replace=False):
            moved = T @ src_points[s]
            nearest = tgt_rows[np.argmin(np.linalg.norm(tgt_points[tgt_rows] - moved, axis=1))]
            pairs.append((int(s), int(nearest)))

    return ToyData(src, tgt, AlignedLexicon(pairs), src_labels, tgt_labels, spec)


def check_toy_transform(W, spec: ToySpec, tol: float = 0.15) -> bool:
    """True iff ||W - T||_F < tol for the planted transform T."""
    W = np.asarray(getattr(W, "weight", W), dtype=np.float64)
    return bool(np.linalg.norm(W - spec.transform_matrix) < tol)


def transform_distance(W, spec: ToySpec) -> float:
    """||W - T||_F."""
    W = np.asarray(getattr(W, "weight", W), dtype=np.float64)
    return float(np.linalg.norm(W - spec.transform_matrix))
