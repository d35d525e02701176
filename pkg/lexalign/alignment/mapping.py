"""The linear map W and its file formats."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from lexalign.errors import DataError
from lexalign.embeddings import EmbeddingTable

MAPPING_MAGIC = "lexalign-mapping"
MAPPING_VERSION = 1

PathLike = Union[str, Path]


@dataclass
class MappingMatrix:
    """d x d matrix W mapping source vectors into the target space (y ≈ W x)."""
    weight: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.weight = np.array(self.weight, dtype=np.float64)
        if self.weight.ndim != 2 or self.weight.shape[0] != self.weight.shape[1]:
            raise DataError(f"mapping must be square, got shape {self.weight.shape}")
        if not np.all(np.isfinite(self.weight)):
            raise DataError("mapping has non-finite entries")

    @property
    def dim(self) -> int:
        return self.weight.shape[0]

    @classmethod
    def identity(cls, d: int, **provenance) -> "MappingMatrix":
        return cls(np.eye(d), dict(provenance))

    def apply(self, data: Union[np.ndarray, EmbeddingTable]) -> Union[np.ndarray, EmbeddingTable]:
        """
        Map row vectors (``X W^T``).

        A table is returned as a new raw table with the same vocabulary.
        """
        if isinstance(data, EmbeddingTable):
            self.check_dim(data.dim)
            return EmbeddingTable(data.words, data.vectors @ self.weight.T)
        vectors = np.asarray(data, dtype=np.float64)
        self.check_dim(vectors.shape[-1])
        return vectors @ self.weight.T

    def check_dim(self, d: int) -> None:
        if d != self.dim:
            raise DataError(f"mapping is {self.dim}-dimensional but vectors have d={d}")

    def save_text(self, path: PathLike) -> None:
        """Write ``d`` on the first line, then d rows of d decimals."""
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            f.write(f"{self.dim}\n")
            for row in self.weight:
                f.write(" ".join(f"{x:.17g}" for x in row) + "\n")

    @classmethod
    def load_text(cls, path: PathLike) -> "MappingMatrix":
        """Read a matrix written by :meth:`save_text`."""
        with open(path, "r", encoding="utf-8") as f:
            lines = [line.split() for line in f if line.strip()]
        if not lines or len(lines[0]) != 1:
            raise DataError(f"{path}: missing dimension line")
        try:
            d = int(lines[0][0])
            rows = [[float(x) for x in line] for line in lines[1:]]
        except ValueError as e:
            raise DataError(f"{path}: {e}")
        if len(rows) != d or any(len(r) != d for r in rows):
            raise DataError(f"{path}: expected {d} rows of {d} values")
        return cls(np.asarray(rows), {"source": str(path)})

    def save_binary(self, path: PathLike) -> None:
        """Write a versioned ``.npz`` with the matrix and its provenance."""
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        keys = sorted(self.provenance)
        with open(output, "wb") as f:
            np.savez(
                f,
                magic=np.array(MAPPING_MAGIC),
                version=np.array(MAPPING_VERSION),
                weight=self.weight,
                provenance_keys=np.array(keys, dtype=str),
                provenance_values=np.array([str(self.provenance[k]) for k in keys], dtype=str),
            )

    @classmethod
    def load_binary(cls, path: PathLike) -> "MappingMatrix":
        """Read a matrix written by :meth:`save_binary` (provenance values come back as strings)."""
        with np.load(path, allow_pickle=False) as data:
            if "magic" not in data or str(data["magic"]) != MAPPING_MAGIC:
                raise DataError(f"{path}: not a lexalign mapping file")
            version = int(data["version"])
            if version != MAPPING_VERSION:
                raise DataError(f"{path}: unsupported mapping version {version}")
            provenance = {
                str(k): str(v) for k, v in zip(data["provenance_keys"], data["provenance_values"])
            }
            return cls(data["weight"], provenance)

    @classmethod
    def load(cls, path: PathLike) -> "MappingMatrix":
        """Pick the reader from the file suffix."""
        if str(path).endswith(".npz"):
            return cls.load_binary(path)
        return cls.load_text(path)

    def save(self, path: PathLike) -> None:
        if str(path).endswith(".npz"):
            self.save_binary(path)
        else:
            self.save_text(path)
