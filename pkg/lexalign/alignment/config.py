"""Training configuration for the mapping learner."""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Dict, Optional

from lexalign.errors import ConfigError


class TrainMode(str, Enum):
    """Which loss terms drive the mapping."""
    UNSUPERVISED = "unsupervised"
    SUPERVISED = "supervised"
    SEMI = "semi"

    @classmethod
    def parse(cls, value: str) -> "TrainMode":
        """Accept the short CLI spellings ``unsup``/``sup`` as well."""
        aliases = {"unsup": cls.UNSUPERVISED, "sup": cls.SUPERVISED}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown mode {value!r}; expected unsup, sup or semi")


class PairSimilarity(str, Enum):
    """f_s: similarity maximised over dictionary pairs."""
    COSINE = "cosine"
    CSLS = "csls"


class Orthogonality(str, Enum):
    """How the mapping is kept close to orthogonal."""
    AUTOENCODER = "autoencoder"
    BETA = "beta"
    NONE = "none"


@dataclass
class TrainConfig:
    """Hyperparameters of adversarial + supervised + orthogonality training."""
    mode: TrainMode = TrainMode.SEMI
    f_s: PairSimilarity = PairSimilarity.COSINE
    f_a: str = "cosine"
    lambda_adv: float = 1.0
    lambda_sup: float = 1.0
    lambda_orth: float = 1.0
    orthogonality: Orthogonality = Orthogonality.AUTOENCODER
    beta: float = 0.001
    batch_size: int = 32
    vocab_cap: int = 75000
    dis_steps_per_map_step: int = 5
    rounds: int = 15
    iters_per_round: int = 10000
    lr: float = 0.1
    dis_lr: Optional[float] = None  # defaults to lr
    lr_decay_per_round: float = 0.98
    lr_halving_patience: int = 2
    lr_shrink: float = 0.5
    min_lr: float = 1e-6
    sup_optimizer: str = "sgd"  # sgd or adam
    sup_lr: Optional[float] = None  # defaults to lr for sgd, 1e-3 for adam
    init: str = "identity"  # identity or orthogonal
    hidden_dim: int = 2048
    hidden_layers: int = 2
    input_dropout: float = 0.1
    leaky_slope: float = 0.2
    label_smoothing: float = 0.1
    csls_k: int = 10
    neighbor_refresh: int = 500
    log_interval: int = 500
    criterion_vocab: int = 10000
    require_normalized: bool = True
    dtype: str = "float32"
    seed: int = 0

    def __post_init__(self):
        self.mode = TrainMode.parse(self.mode) if isinstance(self.mode, str) else self.mode
        self.f_s = PairSimilarity(self.f_s)
        self.orthogonality = Orthogonality(self.orthogonality)
        self.validate()

    def validate(self) -> None:
        """Raise ConfigError on inconsistent values."""
        for name in ("lambda_adv", "lambda_sup", "lambda_orth"):
            value = getattr(self, name)
            if not value >= 0 or value == float("inf"):
                raise ConfigError(f"{name} must be a finite non-negative number, got {value}")
        if self.f_a != "cosine":
            raise ConfigError("f_a is fixed to cosine")
        if not 0 <= self.label_smoothing < 0.5:
            raise ConfigError("label_smoothing must be in [0, 0.5)")
        if not 0 <= self.input_dropout < 1:
            raise ConfigError("input_dropout must be in [0, 1)")
        if self.hidden_dim <= 0 or self.hidden_layers < 1:
            raise ConfigError("discriminator needs at least one hidden layer of positive width")
        if self.orthogonality == Orthogonality.BETA and self.beta <= 0:
            raise ConfigError("beta must be positive")
        if self.sup_optimizer not in ("sgd", "adam"):
            raise ConfigError(f"sup_optimizer must be sgd or adam, got {self.sup_optimizer!r}")
        if self.init not in ("identity", "orthogonal"):
            raise ConfigError(f"init must be identity or orthogonal, got {self.init!r}")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"dtype must be float32 or float64, got {self.dtype!r}")
        for name in ("batch_size", "vocab_cap", "rounds", "iters_per_round", "csls_k",
                     "neighbor_refresh", "criterion_vocab", "log_interval"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.dis_steps_per_map_step < 0:
            raise ConfigError("dis_steps_per_map_step must be non-negative")

    @property
    def uses_adversarial(self) -> bool:
        return self.mode != TrainMode.SUPERVISED and self.lambda_adv > 0

    @property
    def uses_supervised(self) -> bool:
        return self.mode != TrainMode.UNSUPERVISED and self.lambda_sup > 0

    @property
    def uses_orthogonality_loss(self) -> bool:
        return self.orthogonality == Orthogonality.AUTOENCODER and self.lambda_orth > 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary."""
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        """Build from a (possibly partial) dictionary; unknown keys are an error."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown training option(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    def config_hash(self) -> str:
        """Short stable hash of the resolved configuration."""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class LossWeights:
    """λ_adv, λ_sup, λ_orth of the joint mapping loss."""
    adv: float = 1.0
    sup: float = 1.0
    orth: float = 1.0

    @classmethod
    def from_config(cls, cfg: TrainConfig) -> "LossWeights":
        """Weights with terms dropped by the config's mode and switches zeroed."""
        return cls(
            adv=cfg.lambda_adv if cfg.uses_adversarial else 0.0,
            sup=cfg.lambda_sup if cfg.uses_supervised else 0.0,
            orth=cfg.lambda_orth if cfg.uses_orthogonality_loss else 0.0,
        )

    def as_dict(self) -> Dict[str, float]:
        return {"adv": self.adv, "sup": self.sup, "orth": self.orth}


@dataclass
class TrainingProvenance:
    """Where a mapping came from."""
    mode: str
    seed: int
    config_hash: str
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"mode": self.mode, "seed": self.seed, "config_hash": self.config_hash, **self.extra}
