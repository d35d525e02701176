"""Row normalization of embedding tables."""

from typing import Union

import numpy as np

from lexalign.errors import DataError
from lexalign.embeddings.schema import EmbeddingTable, NormState


def unit_rows(vectors: np.ndarray, words=None) -> np.ndarray:
    """
    Divide every row by its Euclidean norm.

    Args:
        vectors: n x d matrix
        words: Optional tokens, used to name a zero-norm row in the error

    Raises:
        DataError: if any row has zero norm
    """
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    zero = np.flatnonzero(norms[:, 0] == 0)
    if zero.size:
        name = repr(words[zero[0]]) if words is not None else f"row {zero[0]}"
        raise DataError(f"cannot normalize zero-norm vector for {name}")
    return vectors / norms


def center_unit_rows(vectors: np.ndarray, words=None) -> np.ndarray:
    """Subtract the column mean, then unit-normalize every row."""
    return unit_rows(vectors - vectors.mean(axis=0, keepdims=True), words)


def normalize(table: EmbeddingTable, scheme: Union[NormState, str]) -> EmbeddingTable:
    """
    Normalize a raw table.

    ``unit`` divides each row by its norm; ``centered_unit`` subtracts the
    column mean of the retained rows first. Applying ``unit`` again to a
    unit table renormalizes in place of an error, which is idempotent up to
    rounding; re-applying ``centered_unit`` returns the table unchanged.

    Args:
        table: Table to normalize
        scheme: ``unit`` or ``centered_unit``

    Returns:
        New table with updated norm_state
    """
    scheme = NormState(scheme)
    if scheme == NormState.RAW:
        raise DataError("normalize scheme must be 'unit' or 'centered_unit'")

    if table.norm_state != NormState.RAW:
        if table.norm_state != scheme:
            raise DataError(
                f"table is already {table.norm_state.value}; cannot apply {scheme.value}"
            )
        if scheme == NormState.CENTERED_UNIT:
            return table

    if scheme == NormState.UNIT:
        vectors = unit_rows(table.vectors, table.words)
    else:
        vectors = center_unit_rows(table.vectors, table.words)
    return table.with_vectors(vectors, scheme)
