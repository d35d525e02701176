"""Procrustes refinement with induced dictionaries."""

from lexalign.refinement.procrustes import procrustes_solve
from lexalign.refinement.expansion import (
    ExpansionDictionary,
    expand_dictionary,
    hubness_filter,
)
from lexalign.refinement.refine import (
    RefineConfig,
    RefinementResult,
    RefinementRound,
    iterative_refine,
)

__all__ = [
    "procrustes_solve",
    "ExpansionDictionary",
    "expand_dictionary",
    "hubness_filter",
    "RefineConfig",
    "RefinementResult",
    "RefinementRound",
    "iterative_refine",
]
