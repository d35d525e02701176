"""Dictionary induction from a mapping, and hubness filtering."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from lexalign.embeddings import AlignedLexicon, EmbeddingTable, save_lexicon
from lexalign.errors import ConfigError, DataError
from lexalign.metric import (
    NeighborIndex,
    RetrievalMethod,
    best_match,
    hubness_counts,
    knn_mean_similarities,
    map_vectors,
    unit,
)

logger = logging.getLogger(__name__)


@dataclass
class ExpansionDictionary:
    """Induced (source row, target row) pairs with their CSLS scores."""
    pairs: np.ndarray
    scores: np.ndarray
    round: int = 0
    index: Optional[NeighborIndex] = field(default=None, repr=False)

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        self.scores = np.asarray(self.scores, dtype=np.float64)

    def __len__(self) -> int:
        return self.pairs.shape[0]

    def as_lexicon(self) -> AlignedLexicon:
        return AlignedLexicon(pairs=[tuple(p) for p in self.pairs.tolist()])

    def save(self, path: Union[str, Path], src: EmbeddingTable, tgt: EmbeddingTable) -> None:
        """Write the two-token dictionary format with a score column."""
        save_lexicon(self.pairs.tolist(), src, tgt, path, scores=self.scores.tolist())


def expand_dictionary(
    W,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    cfg=None,
    round: int = 0,
    expansion_vocab: Optional[int] = None,
    k: Optional[int] = None,
) -> ExpansionDictionary:
    """
    Mutual CSLS rank-1 matches between the most frequent source and target words.

    A pair (s, t) is kept when t is the best target for mapped s and s is
    the best mapped source for t, both within the top ``expansion_vocab``
    rows. Γ terms use the full tables.

    Args:
        W: Mapping (MappingMatrix or array)
        src: Normalized source table
        tgt: Normalized target table
        cfg: RefineConfig supplying ``expansion_vocab`` and ``csls_k``
        round: Refinement round, recorded and named in errors

    Returns:
        ExpansionDictionary; ``index`` holds the forward rank-1 retrieval of
        every candidate source, for hubness counting

    Raises:
        DataError: when no pair is a mutual match
    """
    n_vocab = expansion_vocab or getattr(cfg, "expansion_vocab", 15000)
    k = k or getattr(cfg, "csls_k", 10)
    n_src = min(n_vocab, len(src))
    n_tgt = min(n_vocab, len(tgt))
    k = min(k, len(src), len(tgt))

    mapped = unit(map_vectors(src.vectors, W))
    tgt_unit = unit(tgt.vectors)
    gamma_src = knn_mean_similarities(mapped[:n_src], tgt_unit, k)
    gamma_tgt = knn_mean_similarities(tgt_unit[:n_tgt], mapped, k)

    forward, forward_scores = best_match(mapped[:n_src], tgt_unit[:n_tgt], gamma_src, gamma_tgt)
    backward, _ = best_match(tgt_unit[:n_tgt], mapped[:n_src], gamma_tgt, gamma_src)

    sources = np.arange(n_src)
    mutual = backward[forward] == sources
    if not mutual.any():
        raise DataError(f"refinement round {round}: no mutual nearest-neighbor pairs")

    index = NeighborIndex(
        query_ids=sources,
        ids=forward[:, None],
        scores=forward_scores[:, None],
        k=k,
        method=RetrievalMethod.CSLS,
    )
    pairs = np.stack([sources[mutual], forward[mutual]], axis=1)
    logger.debug(f"Round {round}: {mutual.sum()} mutual pairs out of {n_src} candidates")
    return ExpansionDictionary(pairs=pairs, scores=forward_scores[mutual], round=round, index=index)


def hubness_filter(
    dictionary: ExpansionDictionary,
    index: NeighborIndex,
    threshold: int = 20,
) -> ExpansionDictionary:
    """
    Drop pairs whose target is the rank-1 neighbor of more than ``threshold`` queries.

    Args:
        dictionary: Induced pairs
        index: Retrieval over the candidate sources the counts are taken from
        threshold: Largest N_y(1) a target may have and still be kept
    """
    if threshold < 0:
        raise ConfigError(f"hubness threshold must be non-negative, got {threshold}")
    counts = hubness_counts(index)
    keep = np.array([counts[int(t)] <= threshold for t in dictionary.pairs[:, 1]], dtype=bool)
    if len(dictionary) and not keep.all():
        logger.debug(f"Hubness filter removed {int((~keep).sum())} pair(s)")
    return ExpansionDictionary(
        pairs=dictionary.pairs[keep],
        scores=dictionary.scores[keep],
        round=dictionary.round,
        index=dictionary.index,
    )
