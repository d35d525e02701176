"""Embedding tables, bilingual dictionaries and their file formats."""

from lexalign.embeddings.schema import (
    AlignedLexicon,
    EmbeddingTable,
    NormState,
)
from lexalign.embeddings.loader import (
    EmbeddingLoader,
    load_cache,
    load_embeddings,
    load_lexicon,
    normalize_token,
    read_word_pairs,
    save_cache,
    save_embeddings,
    save_lexicon,
)
from lexalign.embeddings.normalize import (
    center_unit_rows,
    normalize,
    unit_rows,
)

__all__ = [
    "AlignedLexicon",
    "EmbeddingTable",
    "NormState",
    "EmbeddingLoader",
    "load_cache",
    "load_embeddings",
    "load_lexicon",
    "normalize_token",
    "read_word_pairs",
    "save_cache",
    "save_embeddings",
    "save_lexicon",
    "center_unit_rows",
    "normalize",
    "unit_rows",
]
