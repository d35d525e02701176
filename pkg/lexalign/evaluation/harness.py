"""Multi-seed runs on the toy dataset."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

from lexalign.alignment import TrainConfig, TrainMode, train
from lexalign.errors import DivergenceError
from lexalign.evaluation.stability import sample_variance
from lexalign.evaluation.toy import ToyData, ToySpec, generate_toy, transform_distance
from lexalign.logging import Logger, NullLogger

logger = logging.getLogger(__name__)


@dataclass
class ToyRun:
    """Outcome of one seeded training run."""
    seed: int
    mode: str
    success: bool
    distance: Optional[float]
    final_criterion: Optional[float]
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "mode": self.mode,
            "success": self.success,
            "distance": self.distance,
            "final_criterion": self.final_criterion,
            "error": self.error,
        }


@dataclass
class ToyModeSummary:
    """All runs of one training mode."""
    mode: str
    runs: List[ToyRun] = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        if not self.runs:
            return 0.0
        return sum(r.success for r in self.runs) / len(self.runs)

    @property
    def criterion_variance(self) -> Optional[float]:
        """Sample variance of the final criterion over runs that finished."""
        values = [r.final_criterion for r in self.runs if r.final_criterion is not None]
        return sample_variance(values) if len(values) >= 2 else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "success_rate": self.success_rate,
            "criterion_variance": self.criterion_variance,
            "num_runs": len(self.runs),
            "runs": [r.to_dict() for r in self.runs],
        }


@dataclass
class ToyHarnessReport:
    """Per-mode summaries of a multi-seed toy experiment."""
    spec: ToySpec
    tol: float
    modes: Dict[str, ToyModeSummary] = field(default_factory=dict)

    def __getitem__(self, mode: str) -> ToyModeSummary:
        return self.modes[TrainMode.parse(mode).value]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "tol": self.tol,
            "modes": {name: summary.to_dict() for name, summary in self.modes.items()},
        }


def run_toy_seed(data: ToyData, cfg: TrainConfig, seed: int, tol: float = 0.15) -> ToyRun:
    """Train once with ``seed`` and compare the best mapping with the planted transform."""
    run_cfg = replace(cfg, seed=seed)
    lexicon = data.anchors if run_cfg.mode != TrainMode.UNSUPERVISED else None
    try:
        result = train(data.src, data.tgt, lexicon, run_cfg)
    except DivergenceError as e:
        logger.warning(f"seed {seed} ({run_cfg.mode.value}) diverged: {e}")
        return ToyRun(seed, run_cfg.mode.value, False, None, None, error=str(e))
    distance = transform_distance(result.mapping, data.spec)
    return ToyRun(seed, run_cfg.mode.value, distance < tol, distance, result.best_criterion)


def run_toy_seeds(
    spec: ToySpec,
    cfg: TrainConfig,
    seeds: Sequence[int] = tuple(range(20)),
    modes: Sequence[str] = ("unsupervised", "semi"),
    tol: float = 0.15,
    workers: int = 1,
    run_logger: Optional[Logger] = None,
) -> ToyHarnessReport:
    """
    Train on one toy dataset once per (mode, seed) and report success rates.

    The dataset is drawn once from ``spec``; seeds vary only the training.
    A run succeeds when ||W - T||_F < tol.
    """
    run_log = run_logger or NullLogger()
    data = generate_toy(spec)
    report = ToyHarnessReport(spec=spec, tol=tol)
    jobs = [(replace(cfg, mode=TrainMode.parse(mode)), seed) for mode in modes for seed in seeds]

    def record(run: ToyRun) -> None:
        report.modes.setdefault(run.mode, ToyModeSummary(run.mode)).runs.append(run)
        run_log.info("toy.seed", f"{run.mode} seed={run.seed}", run.to_dict())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run_toy_seed, data, job_cfg, seed, tol) for job_cfg, seed in jobs]
            for future in as_completed(futures):
                record(future.result())
    else:
        for job_cfg, seed in jobs:
            record(run_toy_seed(data, job_cfg, seed, tol))

    for summary in report.modes.values():
        summary.runs.sort(key=lambda r: r.seed)
        logger.info(f"{summary.mode}: success rate {summary.success_rate:.0%} over {len(summary.runs)} seeds")
    return report
