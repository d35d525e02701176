"""Unsupervised model-selection criterion."""

from typing import Optional

import numpy as np

from lexalign.embeddings import EmbeddingTable
from lexalign.metric import RetrievalMethod, map_vectors, nn_retrieve, unit


def unsupervised_criterion(
    W,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    cfg=None,
    m_val: Optional[int] = None,
    k: Optional[int] = None,
    max_targets: Optional[int] = None,
) -> float:
    """
    Mean cos(Wx, ŷ) over the most frequent source words, ŷ = CSLS rank-1 target.

    Needs no dictionary, so it can select checkpoints in unsupervised runs.

    Args:
        W: Mapping (MappingMatrix, array or None for identity)
        src: Normalized source table
        tgt: Normalized target table
        cfg: TrainConfig or RefineConfig supplying ``criterion_vocab`` and ``csls_k``
        m_val: Number of source words translated (overrides cfg)
        k: CSLS neighborhood size (overrides cfg)
        max_targets: Restrict candidates to the first rows of ``tgt``
    """
    m_val = m_val or getattr(cfg, "criterion_vocab", 10000)
    k = k or getattr(cfg, "csls_k", 10)
    m_val = min(m_val, len(src))
    k = min(k, len(tgt), len(src))

    index = nn_retrieve(
        src,
        W,
        tgt,
        method=RetrievalMethod.CSLS,
        k=k,
        topn=1,
        query_ids=np.arange(m_val),
        max_targets=max_targets,
    )
    mapped = unit(map_vectors(src.vectors[:m_val], W))
    matched = unit(tgt.vectors[index.rank1])
    return float(np.mean(np.sum(mapped * matched, axis=1)))
