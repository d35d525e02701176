"""Orthogonality projection applied after each mapping update."""

import numpy as np
import torch

from lexalign.errors import ConfigError


def beta_projection_step(W, beta: float):
    """
    W <- (1 + β) W - β (W Wᵀ) W.

    Orthogonal matrices are fixed points. Works on numpy arrays and torch
    tensors alike and returns the same kind.
    """
    if not beta > 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    if isinstance(W, torch.Tensor):
        return (1 + beta) * W - beta * (W @ W.T) @ W
    W = np.asarray(W, dtype=np.float64)
    return (1 + beta) * W - beta * (W @ W.T) @ W
