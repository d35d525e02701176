"""Shared fixtures for the lexalign tests."""

from types import SimpleNamespace

import numpy as np
import pytest

from lexalign.embeddings import AlignedLexicon, EmbeddingTable, NormState, center_unit_rows


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def orthogonal():
    """Random orthogonal d x d matrix from a seeded generator."""

    def _orthogonal(d, seed=0):
        return random_orthogonal(np.random.default_rng(seed), d)

    return _orthogonal


@pytest.fixture
def make_table():
    """Build a table with tokens ``<prefix><i>``."""

    def _make(vectors, prefix="w", norm_state=NormState.RAW):
        vectors = np.asarray(vectors, dtype=np.float64)
        words = tuple(f"{prefix}{i}" for i in range(vectors.shape[0]))
        return EmbeddingTable(words, vectors, norm_state)

    return _make


@pytest.fixture
def write_text(tmp_path):
    """Write lines to a file under tmp_path and return its path."""

    def _write(name, lines):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write


def _permuted_pair(seed: int, n: int, d: int) -> SimpleNamespace:
    rng = np.random.default_rng(seed)
    vectors = center_unit_rows(rng.standard_normal((n, d)))
    rotation = random_orthogonal(rng, d)
    perm = rng.permutation(n)
    # target row perm[i] is the image of source row i
    tgt_vectors = np.empty_like(vectors)
    tgt_vectors[perm] = vectors @ rotation.T
    src = EmbeddingTable(tuple(f"s{i}" for i in range(n)), vectors, NormState.CENTERED_UNIT)
    tgt = EmbeddingTable(tuple(f"t{i}" for i in range(n)), tgt_vectors, NormState.CENTERED_UNIT)
    gold = AlignedLexicon([(i, int(perm[i])) for i in range(n)])
    return SimpleNamespace(src=src, tgt=tgt, rotation=rotation, perm=perm, gold=gold)


@pytest.fixture
def permuted_pair():
    """
    Source table and a rotated, row-shuffled copy as target.

    ``rotation`` maps source row i exactly onto target row ``perm[i]``;
    ``gold`` holds those pairs.
    """
    return _permuted_pair(seed=7, n=30, d=32)


@pytest.fixture
def overdetermined_pair():
    """Like ``permuted_pair`` with more words than dimensions."""
    return _permuted_pair(seed=11, n=200, d=8)
