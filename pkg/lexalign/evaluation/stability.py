"""Training stability: per-round accuracy traces and across-seed variance."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from lexalign.errors import DataError


@dataclass
class StabilityPoint:
    """Round-end accuracy and criterion."""
    round: int
    precision_at_1: Optional[float]
    criterion: float

    def to_dict(self) -> Dict[str, Any]:
        return {"round": self.round, "precision_at_1": self.precision_at_1, "criterion": self.criterion}


def stability_trace(log) -> List[StabilityPoint]:
    """
    (round, precision@1, criterion) for every completed round of a training log.

    precision@1 is None unless the run was given an evaluation dictionary.
    """
    return [
        StabilityPoint(r.round, r.precision_at_1, r.criterion)
        for r in log.round_records()
    ]


def sample_variance(values: Sequence[float]) -> float:
    """Unbiased variance; needs at least two values."""
    if len(values) < 2:
        raise DataError(f"variance needs at least 2 values, got {len(values)}")
    return float(np.var(np.asarray(values, dtype=np.float64), ddof=1))
