"""Loading and saving of embedding tables and bilingual dictionaries."""

import logging
import unicodedata
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from lexalign.errors import DataError
from lexalign.embeddings.schema import AlignedLexicon, EmbeddingTable, NormState

logger = logging.getLogger(__name__)

CACHE_MAGIC = "lexalign-embeddings"
CACHE_VERSION = 1

PathLike = Union[str, Path]


def normalize_token(token: str) -> str:
    """Tokens are compared after Unicode NFC normalization, without case folding."""
    return unicodedata.normalize("NFC", token)


class EmbeddingLoader:
    """Read word vectors in the fastText ``.vec`` text format."""

    def __init__(self, path: PathLike):
        """
        Initialize embedding loader.

        Args:
            path: Path to a ``.vec`` file (optional "n d" header line)
        """
        self.path = Path(path)
        if not self.path.exists():
            raise FileNotFoundError(f"Embedding file not found: {path}")
        self.header: Optional[Tuple[int, int]] = None
        self.skipped = 0
        self.duplicates = 0

    def stream(self, dim: Optional[int] = None) -> Iterator[Tuple[str, np.ndarray]]:
        """
        Yield (token, vector) rows in file order.

        Malformed rows (wrong field count, non-numeric or non-finite values)
        are skipped and counted in ``self.skipped``. Duplicate tokens keep
        their first occurrence and are counted in ``self.duplicates``.

        Args:
            dim: Expected dimension; must agree with the header when both exist
        """
        self.skipped = 0
        self.duplicates = 0
        seen = set()
        with open(self.path, "r", encoding="utf-8", errors="replace") as f:
            for line_num, line in enumerate(f, start=1):
                fields = line.rstrip().split()
                if not fields:
                    continue

                if line_num == 1 and self._is_header(fields):
                    self.header = (int(fields[0]), int(fields[1]))
                    if dim is not None and dim != self.header[1]:
                        raise DataError(
                            f"{self.path}: header declares d={self.header[1]} but dim={dim} was requested"
                        )
                    dim = self.header[1]
                    continue

                if dim is None:
                    # headerless file: the first data line fixes d
                    dim = len(fields) - 1
                    if dim < 1:
                        raise DataError(f"{self.path}:{line_num}: cannot infer dimension")

                if len(fields) != dim + 1:
                    self._skip(line_num, f"expected {dim + 1} fields, got {len(fields)}")
                    continue
                try:
                    vector = np.asarray(fields[1:], dtype=np.float64)
                except ValueError:
                    self._skip(line_num, "non-numeric value")
                    continue
                if not np.all(np.isfinite(vector)):
                    self._skip(line_num, "non-finite value")
                    continue

                token = normalize_token(fields[0])
                if token in seen:
                    self.duplicates += 1
                    continue
                seen.add(token)
                yield token, vector

    def load(self, max_vocab: Optional[int] = None, dim: Optional[int] = None) -> EmbeddingTable:
        """
        Load the first ``max_vocab`` parseable rows.

        Args:
            max_vocab: Maximum number of rows to keep (None keeps all)
            dim: Expected vector dimension

        Returns:
            EmbeddingTable with norm_state = raw
        """
        if max_vocab is not None and max_vocab < 1:
            raise DataError(f"max_vocab must be positive, got {max_vocab}")

        words: List[str] = []
        rows: List[np.ndarray] = []
        for token, vector in self.stream(dim=dim):
            words.append(token)
            rows.append(vector)
            if max_vocab is not None and len(words) >= max_vocab:
                break

        if not rows:
            raise DataError(f"{self.path}: no embedding rows could be parsed")
        if self.skipped:
            logger.warning(f"{self.path}: skipped {self.skipped} malformed line(s)")
        if self.duplicates:
            logger.info(f"{self.path}: dropped {self.duplicates} duplicate token(s)")

        return EmbeddingTable(tuple(words), np.vstack(rows), NormState.RAW)

    def _skip(self, line_num: int, reason: str) -> None:
        self.skipped += 1
        logger.debug(f"{self.path}:{line_num}: skipped ({reason})")

    @staticmethod
    def _is_header(fields: List[str]) -> bool:
        return len(fields) == 2 and all(f.isdigit() for f in fields)


def load_embeddings(
    path: PathLike,
    max_vocab: Optional[int] = 200000,
    dim: Optional[int] = None,
) -> EmbeddingTable:
    """
    Load a ``.vec`` file (or a binary cache written by :func:`save_cache`).

    Args:
        path: Path to the embeddings
        max_vocab: Keep only the first ``max_vocab`` rows (file order = frequency order)
        dim: Expected dimension; a mismatch with the header is an error

    Returns:
        EmbeddingTable with raw vectors
    """
    if str(path).endswith(".npz"):
        table = load_cache(path)
        if dim is not None and table.dim != dim:
            raise DataError(f"{path}: cached table has d={table.dim}, expected {dim}")
        return table.top(max_vocab) if max_vocab else table
    return EmbeddingLoader(path).load(max_vocab=max_vocab, dim=dim)


def save_embeddings(table: EmbeddingTable, path: PathLike, precision: int = 17) -> None:
    """
    Write a table in ``.vec`` format with an "n d" header.

    Args:
        table: Table to write
        path: Output path
        precision: Significant digits per value (17 round-trips float64 exactly)
    """
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    fmt = f"{{:.{precision}g}}"
    with open(output, "w", encoding="utf-8") as f:
        f.write(f"{len(table)} {table.dim}\n")
        for word, row in zip(table.words, table.vectors):
            f.write(word + " " + " ".join(fmt.format(x) for x in row) + "\n")


def save_cache(table: EmbeddingTable, path: PathLike) -> None:
    """Write a versioned binary cache (numpy ``.npz``) for fast reload."""
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "wb") as f:
        np.savez(
            f,
            magic=np.array(CACHE_MAGIC),
            version=np.array(CACHE_VERSION),
            words=np.array(table.words, dtype=str),
            vectors=table.vectors,
            norm_state=np.array(table.norm_state.value),
        )


def load_cache(path: PathLike) -> EmbeddingTable:
    """Read a cache written by :func:`save_cache`."""
    with np.load(path, allow_pickle=False) as data:
        if "magic" not in data or str(data["magic"]) != CACHE_MAGIC:
            raise DataError(f"{path}: not a lexalign embedding cache")
        version = int(data["version"])
        if version != CACHE_VERSION:
            raise DataError(f"{path}: unsupported cache version {version}")
        return EmbeddingTable(
            tuple(str(w) for w in data["words"]),
            data["vectors"],
            NormState(str(data["norm_state"])),
        )


def read_word_pairs(path: PathLike) -> List[Tuple[str, str]]:
    """
    Read a dictionary file: two whitespace-separated tokens per line.

    Lines starting with ``#`` and blank lines are ignored; extra columns
    (e.g. scores) are ignored.
    """
    dict_path = Path(path)
    if not dict_path.exists():
        raise FileNotFoundError(f"Dictionary not found: {path}")

    pairs = []
    with open(dict_path, "r", encoding="utf-8") as f:
        for line_num, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) < 2:
                logger.debug(f"{dict_path}:{line_num}: skipped (fewer than two tokens)")
                continue
            pairs.append((normalize_token(fields[0]), normalize_token(fields[1])))
    return pairs


def load_lexicon(
    path: PathLike,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    require_nonempty: bool = True,
) -> AlignedLexicon:
    """
    Load a bilingual dictionary against two vocabularies.

    Args:
        path: Dictionary file in "src_word tgt_word" format
        src: Source table
        tgt: Target table
        require_nonempty: Raise DataError if no pair survives (supervised/semi modes)

    Returns:
        AlignedLexicon of in-vocabulary, de-duplicated pairs; ``oov`` counts
        pairs dropped because a side is out of vocabulary
    """
    lexicon = AlignedLexicon.from_words(read_word_pairs(path), src, tgt)
    logger.info(f"{path}: {lexicon.size} pair(s) in vocabulary, {lexicon.oov} OOV")
    if require_nonempty and lexicon.size == 0:
        raise DataError(f"{path}: no dictionary pair is in vocabulary")
    return lexicon


def save_lexicon(
    pairs: Sequence[Tuple[int, int]],
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    path: PathLike,
    scores: Optional[Sequence[float]] = None,
) -> None:
    """
    Write index pairs as a dictionary file, optionally with a score column.

    Args:
        pairs: (source index, target index) pairs
        src: Source table (for tokens)
        tgt: Target table (for tokens)
        path: Output path
        scores: Optional per-pair scores written as a third column
    """
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8") as f:
        for i, (s, t) in enumerate(pairs):
            line = f"{src.words[s]} {tgt.words[t]}"
            if scores is not None:
                line += f" {scores[i]:.6f}"
            f.write(line + "\n")
