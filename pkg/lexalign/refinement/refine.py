"""Iterative Procrustes refinement."""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from lexalign.alignment import MappingMatrix, unsupervised_criterion
from lexalign.embeddings import EmbeddingTable
from lexalign.errors import ConfigError, DataError
from lexalign.logging import Logger, NullLogger
from lexalign.refinement.expansion import ExpansionDictionary, expand_dictionary, hubness_filter
from lexalign.refinement.procrustes import procrustes_solve

logger = logging.getLogger(__name__)


@dataclass
class RefineConfig:
    """Settings of the expand / filter / solve loop."""
    rounds: int = 5
    expansion_vocab: int = 15000
    csls_k: int = 10
    hubness_threshold: int = 20
    hubness_filter: bool = True
    early_stop: bool = True
    criterion_vocab: int = 10000

    def __post_init__(self):
        if self.rounds < 1:
            raise ConfigError("rounds must be positive")
        if self.expansion_vocab < 1 or self.csls_k < 1 or self.criterion_vocab < 1:
            raise ConfigError("expansion_vocab, csls_k and criterion_vocab must be positive")
        if self.hubness_threshold < 0:
            raise ConfigError("hubness_threshold must be non-negative")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RefineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown refinement option(s): {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class RefinementRound:
    """What happened in one round; round 0 is the input mapping."""
    round: int
    candidates: int
    kept: int
    criterion: float
    improved: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class RefinementResult:
    """Best mapping found, with the per-round history."""
    mapping: MappingMatrix
    best_round: int
    best_criterion: float
    history: List[RefinementRound] = field(default_factory=list)
    dictionaries: List[ExpansionDictionary] = field(default_factory=list, repr=False)
    stopped_early: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "best_round": self.best_round,
            "best_criterion": self.best_criterion,
            "stopped_early": self.stopped_early,
            "history": [r.to_dict() for r in self.history],
        }

    def write_json(self, path: Union[str, Path]) -> None:
        output = Path(path)
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)


def iterative_refine(
    W0: Union[MappingMatrix, np.ndarray],
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    cfg: Optional[RefineConfig] = None,
    rounds: Optional[int] = None,
    run_logger: Optional[Logger] = None,
) -> RefinementResult:
    """
    Repeat: induce a dictionary under W, drop hub targets, re-solve Procrustes.

    The returned mapping has the best unsupervised criterion seen, the input
    mapping included, so refinement never makes the criterion worse.

    Args:
        W0: Starting mapping
        src: Normalized source table
        tgt: Normalized target table
        cfg: Refinement settings
        rounds: Overrides ``cfg.rounds``
        run_logger: Receives ``refine.round`` and ``refine.stopped`` events
    """
    cfg = cfg or RefineConfig()
    run_log = run_logger or NullLogger()
    rounds = rounds if rounds is not None else cfg.rounds
    if rounds < 1:
        raise ConfigError("rounds must be positive")
    if not isinstance(W0, MappingMatrix):
        W0 = MappingMatrix(W0)

    best = W0
    best_criterion = unsupervised_criterion(W0, src, tgt, cfg)
    best_round = 0
    history = [RefinementRound(0, 0, 0, best_criterion, False)]
    dictionaries: List[ExpansionDictionary] = []
    stopped_early = False
    current = W0

    for rnd in range(1, rounds + 1):
        try:
            induced = expand_dictionary(current, src, tgt, cfg, round=rnd)
        except DataError as e:
            stopped_early = True
            run_log.warning("refine.stopped", str(e), {"round": rnd})
            break
        kept = hubness_filter(induced, induced.index, cfg.hubness_threshold) if cfg.hubness_filter else induced
        if len(kept) == 0:
            stopped_early = True
            run_log.warning("refine.stopped", f"Round {rnd}: hubness filter left no pairs", {"round": rnd})
            break
        dictionaries.append(kept)

        solved = procrustes_solve(src.vectors[kept.pairs[:, 0]], tgt.vectors[kept.pairs[:, 1]])
        current = MappingMatrix(solved.weight, {**W0.provenance, **solved.provenance, "refine_round": rnd})
        criterion = unsupervised_criterion(current, src, tgt, cfg)
        improved = criterion > best_criterion
        history.append(RefinementRound(rnd, len(induced), len(kept), criterion, improved))
        run_log.info(
            "refine.round",
            f"Round {rnd}/{rounds}",
            {"round": rnd, "pairs": len(kept), "criterion": criterion},
        )

        if improved:
            best, best_criterion, best_round = current, criterion, rnd
        elif cfg.early_stop:
            stopped_early = True
            run_log.info("refine.stopped", f"Criterion did not improve in round {rnd}", {"round": rnd})
            break

    logger.info(f"Refinement kept round {best_round} (criterion {best_criterion:.4f})")
    return RefinementResult(
        mapping=best,
        best_round=best_round,
        best_criterion=best_criterion,
        history=history,
        dictionaries=dictionaries,
        stopped_early=stopped_early,
    )
