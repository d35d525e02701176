"""Learning the linear map between two embedding spaces."""

from lexalign.alignment.config import (
    LossWeights,
    Orthogonality,
    PairSimilarity,
    TrainConfig,
    TrainingProvenance,
    TrainMode,
)
from lexalign.alignment.mapping import MappingMatrix
from lexalign.alignment.discriminator import (
    Discriminator,
    build_discriminator,
    discriminator_forward,
)
from lexalign.alignment.losses import (
    CSLSNeighborhoods,
    loss_discriminator,
    loss_generator_adv,
    loss_orthogonality,
    loss_supervised,
    total_map_loss,
)
from lexalign.alignment.projection import beta_projection_step
from lexalign.alignment.criterion import unsupervised_criterion
from lexalign.alignment.trainer import (
    TrainingLog,
    TrainingRecord,
    TrainingResult,
    initial_weight,
    train,
)

__all__ = [
    "LossWeights",
    "Orthogonality",
    "PairSimilarity",
    "TrainConfig",
    "TrainingProvenance",
    "TrainMode",
    "MappingMatrix",
    "Discriminator",
    "build_discriminator",
    "discriminator_forward",
    "CSLSNeighborhoods",
    "loss_discriminator",
    "loss_generator_adv",
    "loss_orthogonality",
    "loss_supervised",
    "total_map_loss",
    "beta_projection_step",
    "unsupervised_criterion",
    "TrainingLog",
    "TrainingRecord",
    "TrainingResult",
    "initial_weight",
    "train",
]
