"""
Discriminator network.

A feed-forward binary classifier that tells genuine target embeddings
from mapped source embeddings.
"""

from typing import Optional, Sequence

import numpy as np
import torch
import torch.nn as nn


class Discriminator(nn.Module):
    """
    MLP ``d -> h -> ... -> h -> 1`` with LeakyReLU hidden activations and a
    logistic output.

    Dropout is applied to the input layer only, and only in training mode.
    The dropout mask is drawn from an explicit ``torch.Generator`` so a
    seeded run is reproducible.
    """

    def __init__(
        self,
        dim: int,
        hidden: Sequence[int] = (2048, 2048),
        input_dropout: float = 0.1,
        leaky_slope: float = 0.2,
        generator: Optional[torch.Generator] = None,
    ):
        super().__init__()
        self.dim = dim
        self.input_dropout = input_dropout
        self.leaky_slope = leaky_slope
        self.generator = generator

        sizes = [dim] + list(hidden) + [1]
        layers = []
        for n_in, n_out in zip(sizes, sizes[1:]):
            layers.extend([nn.Linear(n_in, n_out), nn.LeakyReLU(leaky_slope)])
        layers.pop()  # no activation on the output logit
        self.net = nn.Sequential(*layers)

    @property
    def output_layer(self) -> nn.Linear:
        return self.net[-1]

    def drop_input(self, x: torch.Tensor) -> torch.Tensor:
        if not self.training or self.input_dropout == 0:
            return x
        keep = 1.0 - self.input_dropout
        mask = torch.rand(x.shape, generator=self.generator, dtype=x.dtype) < keep
        return x * mask / keep

    def logits(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(self.drop_input(x)).squeeze(-1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Probability that each row is a genuine target embedding."""
        return torch.sigmoid(self.logits(x))


def build_discriminator(cfg, dim: int, generator: Optional[torch.Generator] = None) -> Discriminator:
    """Discriminator shaped by a TrainConfig."""
    disc = Discriminator(
        dim,
        hidden=[cfg.hidden_dim] * cfg.hidden_layers,
        input_dropout=cfg.input_dropout,
        leaky_slope=cfg.leaky_slope,
        generator=generator,
    )
    return disc.to(getattr(torch, cfg.dtype))


def discriminator_forward(disc: Discriminator, v, train_mode: bool = False) -> float:
    """
    D(v) for a single vector.

    Args:
        disc: Discriminator parameters
        v: d-vector (array or tensor)
        train_mode: Apply input dropout

    Returns:
        Probability in (0, 1)
    """
    dtype = next(disc.parameters()).dtype
    x = torch.as_tensor(np.asarray(v), dtype=dtype).reshape(1, -1)
    was_training = disc.training
    disc.train(train_mode)
    try:
        with torch.no_grad():
            return float(disc(x)[0])
    finally:
        disc.train(was_training)
