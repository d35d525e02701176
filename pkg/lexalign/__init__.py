"""lexalign - bilingual lexicon induction by mapping word embedding spaces, and isometry analysis."""

__version__ = "0.1.0"

from . import embeddings
from . import metric
from . import alignment
from . import refinement
from . import isometry
from . import evaluation

__all__ = [
    "embeddings",
    "metric",
    "alignment",
    "refinement",
    "isometry",
    "evaluation",
]
