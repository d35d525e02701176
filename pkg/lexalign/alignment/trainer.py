"""
Joint training of the mapping.

Alternates discriminator updates with mapping updates on the weighted sum
of the adversarial, supervised and orthogonality losses. The mapping with
the best unsupervised criterion at a round end is kept.
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import torch

from lexalign.alignment.config import (
    LossWeights,
    Orthogonality,
    PairSimilarity,
    TrainConfig,
    TrainingProvenance,
    TrainMode,
)
from lexalign.alignment.criterion import unsupervised_criterion
from lexalign.alignment.discriminator import build_discriminator
from lexalign.alignment.losses import (
    CSLSNeighborhoods,
    loss_discriminator,
    loss_generator_adv,
    loss_orthogonality,
    loss_supervised,
    total_map_loss,
)
from lexalign.alignment.mapping import MappingMatrix
from lexalign.alignment.projection import beta_projection_step
from lexalign.embeddings import AlignedLexicon, EmbeddingTable, NormState
from lexalign.errors import ConfigError, DataError, DivergenceError
from lexalign.evaluation.metrics import precision_at_k, retrieve_for_lexicon
from lexalign.logging import Logger, NullLogger

logger = logging.getLogger(__name__)


@dataclass
class TrainingRecord:
    """Losses averaged over a logging interval; round-end records carry the criterion."""
    iter: int
    round: int
    L_D: Optional[float] = None
    L_adv: Optional[float] = None
    L_sup: Optional[float] = None
    L_orth: Optional[float] = None
    lr: float = 0.0
    criterion: Optional[float] = None
    precision_at_1: Optional[float] = None

    @property
    def is_round_end(self) -> bool:
        return self.criterion is not None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "iter": self.iter,
            "round": self.round,
            "L_D": self.L_D,
            "L_W|D": self.L_adv,
            "L_W|S": self.L_sup,
            "L_W|O": self.L_orth,
            "lr": self.lr,
            "criterion": self.criterion,
            "precision_at_1": self.precision_at_1,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainingRecord":
        return cls(
            iter=data["iter"],
            round=data["round"],
            L_D=data.get("L_D"),
            L_adv=data.get("L_W|D"),
            L_sup=data.get("L_W|S"),
            L_orth=data.get("L_W|O"),
            lr=data.get("lr", 0.0),
            criterion=data.get("criterion"),
            precision_at_1=data.get("precision_at_1"),
        )


@dataclass
class TrainingLog:
    """Ordered training records, serialised as JSON lines."""
    records: List[TrainingRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, record: TrainingRecord) -> None:
        self.records.append(record)

    def round_records(self) -> List[TrainingRecord]:
        """One record per completed round."""
        return [r for r in self.records if r.is_round_end]

    def write_jsonl(self, path: Union[str, Path]) -> None:
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            for record in self.records:
                f.write(json.dumps(record.to_dict()) + "\n")

    @classmethod
    def read_jsonl(cls, path: Union[str, Path]) -> "TrainingLog":
        records = []
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    records.append(TrainingRecord.from_dict(json.loads(line)))
        return cls(records)


@dataclass
class TrainingResult:
    """Best mapping of a run plus its log."""
    mapping: MappingMatrix
    log: TrainingLog
    best_criterion: float
    best_round: int
    diverged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "best_criterion": self.best_criterion,
            "best_round": self.best_round,
            "diverged": self.diverged,
            "rounds": len(self.log.round_records()),
            "provenance": self.mapping.provenance,
        }


class _Interval:
    """Running means of the loss terms between two log records."""

    def __init__(self):
        self.sums: Dict[str, float] = defaultdict(float)
        self.counts: Dict[str, int] = defaultdict(int)

    def add(self, name: str, value: Optional[torch.Tensor]) -> None:
        if value is None:
            return
        self.sums[name] += float(value)
        self.counts[name] += 1

    def mean(self, name: str) -> Optional[float]:
        if not self.counts[name]:
            return None
        return self.sums[name] / self.counts[name]

    def reset(self) -> None:
        self.sums.clear()
        self.counts.clear()


def _check_inputs(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    lexicon: Optional[AlignedLexicon],
    cfg: TrainConfig,
) -> None:
    if src.dim != tgt.dim:
        raise DataError(f"source has d={src.dim} but target has d={tgt.dim}")
    if cfg.require_normalized and (src.norm_state == NormState.RAW or tgt.norm_state == NormState.RAW):
        raise DataError("training expects normalized tables (set require_normalized=false for raw ones)")
    if cfg.mode != TrainMode.UNSUPERVISED:
        if lexicon is None or lexicon.size == 0:
            raise DataError(f"mode {cfg.mode.value} needs a nonempty seed dictionary")
        lexicon.validate(src, tgt)


def initial_weight(cfg: TrainConfig, d: int, rng: np.random.Generator) -> np.ndarray:
    """Identity, or a random orthogonal matrix drawn from ``rng``."""
    if cfg.init == "identity":
        return np.eye(d)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def _is_finite(value) -> bool:
    if value is None:
        return True
    if isinstance(value, torch.Tensor):
        return bool(torch.isfinite(value).all())
    return bool(np.isfinite(value))


def _set_lr(optimizer: torch.optim.Optimizer, lr: float) -> None:
    for group in optimizer.param_groups:
        group["lr"] = lr


def train(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    lexicon: Optional[AlignedLexicon] = None,
    cfg: Optional[TrainConfig] = None,
    run_logger: Optional[Logger] = None,
    eval_lexicon: Optional[AlignedLexicon] = None,
) -> TrainingResult:
    """
    Learn W with y ≈ W x.

    Each iteration runs ``dis_steps_per_map_step`` discriminator updates on
    fresh uniform batches from the top ``vocab_cap`` rows, then one mapping
    update on the weighted loss. After each round the learning rate decays;
    it is also shrunk after ``lr_halving_patience`` rounds without criterion
    improvement.

    Args:
        src: Normalized source table
        tgt: Normalized target table
        lexicon: Seed dictionary (required unless mode is unsupervised)
        cfg: Training configuration
        run_logger: Receives one ``train.round`` event per round
        eval_lexicon: Optional test dictionary; precision@1 is logged per round

    Returns:
        TrainingResult with the best round-end mapping

    Raises:
        DivergenceError: a non-finite loss before the first round completed
    """
    cfg = cfg or TrainConfig()
    run_log = run_logger or NullLogger()
    _check_inputs(src, tgt, lexicon, cfg)
    weights = LossWeights.from_config(cfg)
    if weights.adv == 0 and weights.sup == 0 and weights.orth == 0:
        raise ConfigError("no active loss term for this mode and weights")

    d = src.dim
    dtype = getattr(torch, cfg.dtype)
    rng = np.random.default_rng(cfg.seed)
    generator = torch.Generator().manual_seed(cfg.seed)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(cfg.seed)
        disc = build_discriminator(cfg, d, generator=generator)

    src_t = torch.as_tensor(src.vectors, dtype=dtype)
    tgt_t = torch.as_tensor(tgt.vectors, dtype=dtype)
    W = torch.nn.Parameter(torch.as_tensor(initial_weight(cfg, d, rng), dtype=dtype))

    lr = cfg.lr
    dis_lr_ratio = (cfg.dis_lr or cfg.lr) / cfg.lr
    map_opt = torch.optim.SGD([W], lr=lr)
    dis_opt = torch.optim.SGD(disc.parameters(), lr=lr * dis_lr_ratio)
    sup_opt = None
    if weights.sup and cfg.sup_optimizer == "adam":
        sup_opt = torch.optim.Adam([W], lr=cfg.sup_lr or 1e-3)
    elif weights.sup and cfg.sup_lr is not None:
        sup_opt = torch.optim.SGD([W], lr=cfg.sup_lr)

    pairs = lexicon.as_array() if lexicon is not None else np.zeros((0, 2), dtype=np.int64)
    n_src = min(cfg.vocab_cap, len(src))
    n_tgt = min(cfg.vocab_cap, len(tgt))
    csls_k = min(cfg.csls_k, len(src), len(tgt))

    def sample(table: torch.Tensor, n: int) -> torch.Tensor:
        return table[torch.as_tensor(rng.integers(n, size=cfg.batch_size))]

    def supervised_term(context: Optional[CSLSNeighborhoods]) -> torch.Tensor:
        batch = pairs[rng.integers(len(pairs), size=cfg.batch_size)]
        return loss_supervised(
            W,
            src_t[torch.as_tensor(batch[:, 0])],
            tgt_t[torch.as_tensor(batch[:, 1])],
            cfg.f_s,
            context,
            batch,
        )

    def step(optimizer: torch.optim.Optimizer, loss) -> None:
        if not isinstance(loss, torch.Tensor):
            return
        if not _is_finite(loss):
            raise DivergenceError(f"non-finite mapping loss at step {map_step}")
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

    log = TrainingLog()
    interval = _Interval()
    context: Optional[CSLSNeighborhoods] = None
    best_weight: Optional[np.ndarray] = None
    best_criterion = -np.inf
    best_round = -1
    stale_rounds = 0
    map_step = 0
    diverged = False

    logger.info(f"Training {cfg.mode.value} mapping, d={d}, {cfg.rounds} rounds x {cfg.iters_per_round} iterations")
    try:
        for rnd in range(cfg.rounds):
            for _ in range(cfg.iters_per_round):
                if weights.adv:
                    disc.train()
                    for _ in range(cfg.dis_steps_per_map_step):
                        loss_d = loss_discriminator(
                            disc, W.detach(), sample(src_t, n_src), sample(tgt_t, n_tgt), cfg.label_smoothing
                        )
                        if not _is_finite(loss_d):
                            raise DivergenceError(f"non-finite discriminator loss at step {map_step}")
                        dis_opt.zero_grad()
                        loss_d.backward()
                        dis_opt.step()
                        interval.add("L_D", loss_d)
                    disc.eval()

                if weights.sup and cfg.f_s == PairSimilarity.CSLS and map_step % cfg.neighbor_refresh == 0:
                    context = CSLSNeighborhoods.build(W, src_t, tgt_t, pairs[:, 0], pairs[:, 1], k=csls_k)

                xb = sample(src_t, n_src)
                adv = loss_generator_adv(disc, W, xb) if weights.adv else None
                orth = loss_orthogonality(W, xb) if weights.orth else None
                if sup_opt is None:
                    sup = supervised_term(context) if weights.sup else None
                    step(map_opt, total_map_loss(adv, sup, orth, weights))
                else:
                    step(map_opt, total_map_loss(adv, None, orth, weights))
                    # the supervised term sees the already-updated W
                    sup = supervised_term(context)
                    step(sup_opt, weights.sup * sup)

                if cfg.orthogonality == Orthogonality.BETA:
                    with torch.no_grad():
                        W.copy_(beta_projection_step(W, cfg.beta))
                if not _is_finite(W.detach()):
                    raise DivergenceError(f"mapping became non-finite at step {map_step}")

                interval.add("L_adv", adv)
                interval.add("L_sup", sup)
                interval.add("L_orth", orth)
                map_step += 1
                if map_step % cfg.log_interval == 0:
                    log.append(TrainingRecord(
                        iter=map_step,
                        round=rnd,
                        L_D=interval.mean("L_D"),
                        L_adv=interval.mean("L_adv"),
                        L_sup=interval.mean("L_sup"),
                        L_orth=interval.mean("L_orth"),
                        lr=lr,
                    ))
                    interval.reset()

            weight = W.detach().cpu().numpy().astype(np.float64)
            criterion = unsupervised_criterion(weight, src, tgt, cfg)
            p_at_1 = None
            if eval_lexicon is not None and eval_lexicon.size:
                index = retrieve_for_lexicon(weight, src, tgt, eval_lexicon, k=cfg.csls_k, topn=1)
                p_at_1 = precision_at_k(index, eval_lexicon, 1)

            record = TrainingRecord(iter=map_step, round=rnd, lr=lr, criterion=criterion, precision_at_1=p_at_1)
            log.append(record)
            run_log.info(
                "train.round",
                f"Round {rnd + 1}/{cfg.rounds}",
                {k: v for k, v in record.to_dict().items() if v is not None},
            )

            if criterion > best_criterion:
                best_criterion, best_weight, best_round = criterion, weight, rnd
                stale_rounds = 0
                run_log.info(
                    "train.checkpoint",
                    f"Best criterion {criterion:.4f} at round {rnd + 1}",
                    {"round": rnd, "criterion": criterion},
                )
            else:
                stale_rounds += 1

            lr *= cfg.lr_decay_per_round
            if stale_rounds >= cfg.lr_halving_patience:
                lr *= cfg.lr_shrink
                stale_rounds = 0
                logger.info(f"Criterion stalled; learning rate shrunk to {lr:.3g}")
            lr = max(lr, cfg.min_lr)
            _set_lr(map_opt, lr)
            _set_lr(dis_opt, lr * dis_lr_ratio)
    except DivergenceError as e:
        if best_weight is None:
            run_log.error("train.diverged", str(e), {"step": map_step})
            raise
        diverged = True
        logger.warning(f"{e}; returning the round {best_round} checkpoint")
        run_log.warning("train.diverged", str(e), {"step": map_step, "best_round": best_round})

    provenance = TrainingProvenance(
        mode=cfg.mode.value,
        seed=cfg.seed,
        config_hash=cfg.config_hash(),
        extra={"best_round": best_round, "criterion": best_criterion, "diverged": diverged},
    )
    return TrainingResult(
        mapping=MappingMatrix(best_weight, provenance.to_dict()),
        log=log,
        best_criterion=float(best_criterion),
        best_round=best_round,
        diverged=diverged,
    )
