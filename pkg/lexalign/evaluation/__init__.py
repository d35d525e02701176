"""Translation accuracy, training stability and the toy dataset."""

from lexalign.evaluation.metrics import (
    precision_at_k,
    precision_table,
    retrieve_for_lexicon,
)
from lexalign.evaluation.results import (
    EvalReport,
    EvaluationSummary,
    evaluate_mapping,
)
from lexalign.evaluation.stability import (
    StabilityPoint,
    sample_variance,
    stability_trace,
)
from lexalign.evaluation.toy import (
    COUNTER_CLOCKWISE,
    N_CLASSES,
    PLANTED_TRANSFORM,
    ToyData,
    ToySpec,
    check_toy_transform,
    generate_toy,
    transform_distance,
)

# harness imports the trainer, which imports this package; load it as
# lexalign.evaluation.harness

__all__ = [
    "precision_at_k",
    "precision_table",
    "retrieve_for_lexicon",
    "EvalReport",
    "EvaluationSummary",
    "evaluate_mapping",
    "StabilityPoint",
    "sample_variance",
    "stability_trace",
    "COUNTER_CLOCKWISE",
    "N_CLASSES",
    "PLANTED_TRANSFORM",
    "ToyData",
    "ToySpec",
    "check_toy_transform",
    "generate_toy",
    "transform_distance",
]
