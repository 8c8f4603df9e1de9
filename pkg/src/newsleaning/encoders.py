"""Encoder and autoencoder reducing mean topic vectors to topic codes.

The encoder maps the embedding-space mean (default 300 dimensions) down to
the topic representation (default 200) through two affine layers with one
rectifier between them.  The autoencoder mirrors that path with a decoder
back to the input dimension; its reconstruction error can be added to the
classification loss during joint training.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .errors import DimensionMismatch
from .validation import check_positive

ENCODER_MODES = ("none", "encoder", "autoencoder")


@dataclass(frozen=True)
class EncoderConfig:
    """Dimensions and mode of the topic encoder."""

    in_dim: int = 300
    out_dim: int = 200
    hidden_dim: int = 256
    mode: str = "encoder"
    recon_weight: float = 1.0

    def validate(self) -> "EncoderConfig":
        check_positive(self.in_dim, "in_dim")
        check_positive(self.out_dim, "out_dim")
        check_positive(self.hidden_dim, "hidden_dim")
        if self.mode not in ENCODER_MODES:
            raise ValueError(f"mode must be one of {ENCODER_MODES}, got {self.mode!r}")
        if not self.out_dim < self.in_dim:
            raise ValueError(
                f"out_dim must be smaller than in_dim, got {self.out_dim} >= {self.in_dim}")
        if not self.hidden_dim >= self.out_dim:
            raise ValueError(
                f"hidden_dim must be at least out_dim, got {self.hidden_dim} < {self.out_dim}")
        if self.recon_weight < 0:
            raise ValueError(f"recon_weight must be >= 0, got {self.recon_weight}")
        return self


def _check_in_dim(v: torch.Tensor, in_dim: int) -> None:
    if v.shape[-1] != in_dim:
        raise DimensionMismatch(
            f"encoder expects input dimension {in_dim}, got {v.shape[-1]}")


class TopicEncoder(nn.Module):
    """Two affine layers with a rectifier between: in_dim -> hidden -> out_dim."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        config.validate()
        self.config = config
        self.net = nn.Sequential(
            nn.Linear(config.in_dim, config.hidden_dim),
            nn.ReLU(),
            nn.Linear(config.hidden_dim, config.out_dim),
        )

    def forward(self, v: torch.Tensor) -> torch.Tensor:
        _check_in_dim(v, self.config.in_dim)
        return self.net(v)


class TopicAutoencoder(nn.Module):
    """Encoder plus a mirrored decoder back to the input dimension.

    ``forward`` returns (code, reconstruction) so training can use the code
    for classification while also penalizing reconstruction error.
    """

    def __init__(self, config: EncoderConfig):
        super().__init__()
        config.validate()
        self.config = config
        self.encoder = nn.Sequential(
            nn.Linear(config.in_dim, config.hidden_dim),
            nn.ReLU(),
            nn.Linear(config.hidden_dim, config.out_dim),
        )
        self.decoder = nn.Sequential(
            nn.Linear(config.out_dim, config.hidden_dim),
            nn.ReLU(),
            nn.Linear(config.hidden_dim, config.in_dim),
        )

    def forward(self, v: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        _check_in_dim(v, self.config.in_dim)
        code = self.encoder(v)
        recon = self.decoder(code)
        return code, recon

    def encode(self, v: torch.Tensor) -> torch.Tensor:
        _check_in_dim(v, self.config.in_dim)
        return self.encoder(v)


def build_topic_encoder(config: EncoderConfig) -> nn.Module | None:
    """Instantiate the module for the configured mode; None when disabled."""
    config.validate()
    if config.mode == "none":
        return None
    if config.mode == "encoder":
        return TopicEncoder(config)
    return TopicAutoencoder(config)


def reconstruction_loss(v: torch.Tensor, recon: torch.Tensor) -> torch.Tensor:
    """Mean squared error over components (and over the batch, if batched)."""
    if v.shape != recon.shape:
        raise DimensionMismatch(
            f"input and reconstruction shapes differ: {tuple(v.shape)} "
            f"vs {tuple(recon.shape)}")
    return torch.mean((v - recon) ** 2)
