"""Embedding table and lexicon definitions."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from lexalign.errors import DataError


class NormState(str, Enum):
    """Normalization applied to the rows of an embedding table."""
    RAW = "raw"
    UNIT = "unit"
    CENTERED_UNIT = "centered_unit"


@dataclass(frozen=True)
class EmbeddingTable:
    """
    Vocabulary plus an n x d matrix of word vectors.

    Rows are in file order, which for fastText-style files is frequency
    order; slicing with :meth:`top` keeps the most frequent words.
    """
    words: Tuple[str, ...]
    vectors: np.ndarray = field(repr=False)
    norm_state: NormState = NormState.RAW

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "norm_state", NormState(self.norm_state))
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.flags.writeable:
            # never freeze an array the caller still owns
            vectors = vectors.copy()
        object.__setattr__(self, "vectors", vectors)
        if self.vectors.ndim != 2:
            raise DataError(f"vectors must be a 2-d matrix, got shape {self.vectors.shape}")
        if len(self.words) != self.vectors.shape[0]:
            raise DataError(
                f"{len(self.words)} words but {self.vectors.shape[0]} vector rows"
            )
        if len(set(self.words)) != len(self.words):
            raise DataError("words must be unique")
        self.vectors.setflags(write=False)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        """Vector dimension d."""
        return self.vectors.shape[1]

    @cached_property
    def word2id(self) -> Dict[str, int]:
        """Token to row index."""
        return {word: i for i, word in enumerate(self.words)}

    def index(self, word: str) -> Optional[int]:
        """Row index of ``word`` or None when out of vocabulary."""
        return self.word2id.get(word)

    def __contains__(self, word: str) -> bool:
        return word in self.word2id

    def vector(self, word: str) -> np.ndarray:
        """Vector for ``word``; raises KeyError when out of vocabulary."""
        return self.vectors[self.word2id[word]]

    def top(self, n: int) -> "EmbeddingTable":
        """Table restricted to the first ``n`` (most frequent) rows."""
        if n >= len(self):
            return self
        return EmbeddingTable(self.words[:n], self.vectors[:n], self.norm_state)

    def with_vectors(self, vectors: np.ndarray, norm_state: NormState) -> "EmbeddingTable":
        """Same vocabulary, new vectors and normalization state."""
        return EmbeddingTable(self.words, vectors, norm_state)

    def summary(self) -> Dict[str, object]:
        """Short description for manifests and logs."""
        return {"n": len(self), "dim": self.dim, "norm_state": self.norm_state.value}


@dataclass
class AlignedLexicon:
    """
    Pairs of (source row, target row) indices.

    One source may map to several targets; exact duplicate pairs are
    removed on construction while the first-seen order is kept.
    """
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    oov: int = 0

    def __post_init__(self):
        self.pairs = list(dict.fromkeys((int(s), int(t)) for s, t in self.pairs))

    @property
    def size(self) -> int:
        """Number of distinct pairs (k)."""
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_array(self) -> np.ndarray:
        """Pairs as an int64 array of shape (k, 2)."""
        if not self.pairs:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.pairs, dtype=np.int64)

    def sources(self) -> List[int]:
        """Distinct source indices in first-seen order."""
        return list(dict.fromkeys(s for s, _ in self.pairs))

    def targets_by_source(self) -> Dict[int, Set[int]]:
        """All gold targets for each source index."""
        gold: Dict[int, Set[int]] = {}
        for s, t in self.pairs:
            gold.setdefault(s, set()).add(t)
        return gold

    def validate(self, src: EmbeddingTable, tgt: EmbeddingTable) -> None:
        """Check every index is within range of the given tables."""
        for s, t in self.pairs:
            if not 0 <= s < len(src) or not 0 <= t < len(tgt):
                raise DataError(f"pair ({s}, {t}) out of range for tables of size {len(src)}/{len(tgt)}")

    @classmethod
    def from_words(
        cls,
        word_pairs: Sequence[Tuple[str, str]],
        src: EmbeddingTable,
        tgt: EmbeddingTable,
    ) -> "AlignedLexicon":
        """Build a lexicon from token pairs, counting pairs with an OOV side."""
        pairs = []
        oov = 0
        for s_word, t_word in word_pairs:
            s, t = src.index(s_word), tgt.index(t_word)
            if s is None or t is None:
                oov += 1
                continue
            pairs.append((s, t))
        return cls(pairs=pairs, oov=oov)
