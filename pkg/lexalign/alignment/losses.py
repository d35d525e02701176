"""
Loss terms of the mapping objective.

All functions take torch tensors; ``W`` is the d x d mapping (row vectors
are mapped as ``x @ W.T``). The mapping loss is the weighted sum of an
adversarial term, a supervised term on dictionary pairs and a weak
orthogonality term.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import torch
import torch.nn.functional as F

from lexalign.alignment.config import LossWeights, PairSimilarity
from lexalign.alignment.discriminator import Discriminator
from lexalign.errors import DataError
from lexalign.metric import top_n

PROB_EPS = 1e-7
COS_EPS = 1e-12

Number = Union[float, torch.Tensor]


def clamp_probs(p: torch.Tensor) -> torch.Tensor:
    return p.clamp(PROB_EPS, 1.0 - PROB_EPS)


def map_rows(W: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    return x @ W.T


def loss_discriminator(
    disc: Discriminator,
    W: torch.Tensor,
    src_batch: torch.Tensor,
    tgt_batch: torch.Tensor,
    smoothing: float = 0.0,
) -> torch.Tensor:
    """
    Cross-entropy of the discriminator on mapped sources vs genuine targets.

    Labels are smoothed on both sides: genuine targets get ``1 - smoothing``,
    mapped sources get ``smoothing``.
    """
    if src_batch.shape[0] == 0 or tgt_batch.shape[0] == 0:
        raise DataError("discriminator batches must be nonempty")
    p_mapped = clamp_probs(disc(map_rows(W, src_batch)))
    p_real = clamp_probs(disc(tgt_batch))
    eps = smoothing
    mapped_term = -(eps * torch.log(p_mapped) + (1 - eps) * torch.log(1 - p_mapped)).mean()
    real_term = -((1 - eps) * torch.log(p_real) + eps * torch.log(1 - p_real)).mean()
    return mapped_term + real_term


def loss_generator_adv(disc: Discriminator, W: torch.Tensor, src_batch: torch.Tensor) -> torch.Tensor:
    """-mean log D(Wx): the mapping tries to pass for genuine targets."""
    if src_batch.shape[0] == 0:
        raise DataError("adversarial batch must be nonempty")
    return -torch.log(clamp_probs(disc(map_rows(W, src_batch)))).mean()


def _knn_ids(queries: np.ndarray, candidates: np.ndarray, k: int, batch_size: int = 1024) -> np.ndarray:
    if k > candidates.shape[0]:
        raise DataError(f"k={k} exceeds the {candidates.shape[0]} available candidate(s)")
    out = np.empty((queries.shape[0], k), dtype=np.int64)
    for start in range(0, queries.shape[0], batch_size):
        ids, _ = top_n(queries[start:start + batch_size] @ candidates.T, k)
        out[start:start + batch_size] = ids
    return out


def _unit_np(x: np.ndarray) -> np.ndarray:
    return x / np.maximum(np.linalg.norm(x, axis=1, keepdims=True), COS_EPS)


@dataclass
class CSLSNeighborhoods:
    """
    Frozen k-NN sets for the CSLS supervised loss.

    For every dictionary source row: its k nearest targets under the current
    map. For every dictionary target row: its k nearest mapped sources.
    Neighbors are searched over the full tables; the sets stay fixed until
    the next :meth:`build`, while the similarities to them stay functions of W.
    """
    src: torch.Tensor
    tgt: torch.Tensor
    src_rows: np.ndarray
    tgt_rows: np.ndarray
    targets_near_src: torch.Tensor
    sources_near_tgt: torch.Tensor
    k: int

    @classmethod
    def build(
        cls,
        W: torch.Tensor,
        src: torch.Tensor,
        tgt: torch.Tensor,
        src_ids: Sequence[int],
        tgt_ids: Sequence[int],
        k: int = 10,
    ) -> "CSLSNeighborhoods":
        """Search neighbors for the given source and target rows under W."""
        W_np = W.detach().cpu().numpy().astype(np.float64)
        src_np = src.detach().cpu().numpy().astype(np.float64)
        tgt_np = tgt.detach().cpu().numpy().astype(np.float64)
        mapped = _unit_np(src_np @ W_np.T)
        tgt_unit = _unit_np(tgt_np)

        src_rows = np.unique(np.asarray(src_ids, dtype=np.int64))
        tgt_rows = np.unique(np.asarray(tgt_ids, dtype=np.int64))
        near_src = _knn_ids(mapped[src_rows], tgt_unit, k)
        near_tgt = _knn_ids(tgt_unit[tgt_rows], mapped, k)
        return cls(
            src=src,
            tgt=tgt,
            src_rows=src_rows,
            tgt_rows=tgt_rows,
            targets_near_src=torch.as_tensor(near_src),
            sources_near_tgt=torch.as_tensor(near_tgt),
            k=k,
        )

    def _positions(self, rows: np.ndarray, ids) -> torch.Tensor:
        ids = np.asarray(ids, dtype=np.int64)
        pos = np.searchsorted(rows, ids)
        if np.any(pos >= len(rows)) or np.any(rows[np.minimum(pos, len(rows) - 1)] != ids):
            raise DataError("pair id has no frozen neighborhood; rebuild the CSLS context")
        return torch.as_tensor(pos)

    def gamma_src(self, W: torch.Tensor, src_ids) -> torch.Tensor:
        """Γ_Y(Wx) for the given source rows, differentiable in W."""
        neighbors = self.targets_near_src[self._positions(self.src_rows, src_ids)]
        mapped = map_rows(W, self.src[torch.as_tensor(np.asarray(src_ids))])
        sims = F.cosine_similarity(mapped.unsqueeze(1), self.tgt[neighbors], dim=-1, eps=COS_EPS)
        return sims.mean(dim=1)

    def gamma_tgt(self, W: torch.Tensor, tgt_ids) -> torch.Tensor:
        """Γ_WX(y) for the given target rows, differentiable in W."""
        neighbors = self.sources_near_tgt[self._positions(self.tgt_rows, tgt_ids)]
        mapped = map_rows(W, self.src[neighbors])
        y = self.tgt[torch.as_tensor(np.asarray(tgt_ids))]
        sims = F.cosine_similarity(y.unsqueeze(1), mapped, dim=-1, eps=COS_EPS)
        return sims.mean(dim=1)


def loss_supervised(
    W: torch.Tensor,
    src_batch: torch.Tensor,
    tgt_batch: torch.Tensor,
    f_s: Union[PairSimilarity, str] = PairSimilarity.COSINE,
    context: Optional[CSLSNeighborhoods] = None,
    pair_ids: Optional[np.ndarray] = None,
) -> torch.Tensor:
    """
    Negative mean similarity of mapped dictionary pairs.

    Args:
        W: Mapping
        src_batch: Source vectors of the pairs
        tgt_batch: Target vectors of the pairs
        f_s: ``cosine`` or ``csls``
        context: Frozen neighborhoods (required for ``csls``)
        pair_ids: (k, 2) source/target row ids of the pairs (required for ``csls``)
    """
    f_s = PairSimilarity(f_s)
    if src_batch.shape[0] == 0:
        raise DataError("supervised batch is empty")
    cos = F.cosine_similarity(map_rows(W, src_batch), tgt_batch, dim=-1, eps=COS_EPS)
    if f_s == PairSimilarity.COSINE:
        return -cos.mean()

    if context is None or pair_ids is None:
        raise DataError("csls supervised loss needs neighborhoods and pair ids")
    pair_ids = np.asarray(pair_ids, dtype=np.int64)
    score = 2 * cos - context.gamma_src(W, pair_ids[:, 0]) - context.gamma_tgt(W, pair_ids[:, 1])
    return -score.mean()


def loss_orthogonality(W: torch.Tensor, batch: torch.Tensor) -> torch.Tensor:
    """-mean cos(x, WᵀW x); minimum -1 exactly when W is a scaled orthogonal matrix."""
    if batch.shape[0] == 0:
        raise DataError("orthogonality batch must be nonempty")
    reconstructed = map_rows(W, batch) @ W
    return -F.cosine_similarity(batch, reconstructed, dim=-1, eps=COS_EPS).mean()


def total_map_loss(
    adv: Optional[Number],
    sup: Optional[Number],
    orth: Optional[Number],
    weights: LossWeights,
) -> Number:
    """
    λ_adv L_adv + λ_sup L_sup + λ_orth L_orth.

    A term that is None or has weight 0 is dropped entirely, so a
    non-finite value of an unused term never leaks into the sum.
    """
    total: Number = 0.0
    for value, weight in ((adv, weights.adv), (sup, weights.sup), (orth, weights.orth)):
        if value is None or weight == 0:
            continue
        total = total + weight * value
    return total
