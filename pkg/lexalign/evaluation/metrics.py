"""Translation accuracy."""

from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from lexalign.embeddings import AlignedLexicon, EmbeddingTable
from lexalign.errors import DataError
from lexalign.metric import NeighborIndex, RetrievalMethod, nn_retrieve


def precision_at_k(predictions: NeighborIndex, gold: AlignedLexicon, k: int) -> float:
    """
    Fraction of gold source words with any gold target among the top-k predictions.

    Args:
        predictions: Ranked targets; must cover every gold source
        gold: Test dictionary (one source may have several targets)
        k: Cut-off rank

    Raises:
        DataError: empty gold dictionary, uncovered source, or k beyond the ranked list
    """
    if gold.size == 0:
        raise DataError("gold dictionary is empty")
    if k < 1 or k > predictions.topn:
        raise DataError(f"k={k} outside the {predictions.topn} ranked predictions")

    rows = {int(q): i for i, q in enumerate(predictions.query_ids)}
    hits = 0
    targets = gold.targets_by_source()
    for source, expected in targets.items():
        if source not in rows:
            raise DataError(f"no predictions for gold source row {source}")
        ranked = predictions.ids[rows[source], :k]
        hits += bool(expected.intersection(int(t) for t in ranked))
    return hits / len(targets)


def precision_table(
    predictions: NeighborIndex,
    gold: AlignedLexicon,
    ks: Iterable[int] = (1, 5, 10),
) -> Dict[int, float]:
    """precision@k for every k that fits in the ranked list."""
    return {k: precision_at_k(predictions, gold, k) for k in ks if k <= predictions.topn}


def retrieve_for_lexicon(
    W,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    gold: AlignedLexicon,
    method: RetrievalMethod = RetrievalMethod.CSLS,
    k: int = 10,
    topn: int = 10,
    max_targets: Optional[int] = None,
) -> NeighborIndex:
    """Rank targets for the gold sources only (Γ terms still use full tables)."""
    if gold.size == 0:
        raise DataError("gold dictionary is empty")
    sources: Sequence[int] = gold.sources()
    n_cand = len(tgt) if max_targets is None else min(max_targets, len(tgt))
    return nn_retrieve(
        src,
        W,
        tgt,
        method=method,
        k=min(k, len(tgt), len(src)),
        topn=min(topn, n_cand),
        query_ids=np.asarray(sources),
        max_targets=max_targets,
    )
