"""Fusing the article, outlet-knowledge, and topic vectors; scoring head.

The fused vector is built in two steps.  First the two knowledge sources are
traded off by a scalar weight: the outlet vector is scaled by beta, the topic
vector by (1 - beta), and the two are concatenated.  Then that knowledge
block is concatenated after the article's own vector.  With article width q
and topic width r the fused width is p = 2q + r.

The scoring head is a single affine map to three scores followed by a
rectifier, with softmax cross-entropy as the training loss.  The rectifier
before the softmax is kept for fidelity to the modeled design even though a
plain linear head is the textbook choice; a flag selects between the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from .errors import DimensionMismatch
from .validation import check_beta

N_CLASSES = 3
HEAD_MODES = ("paper_relu", "plain_linear")


@dataclass(frozen=True)
class RepresentationBundle:
    """All intermediate vectors for one article (or one batch of articles)."""

    article: torch.Tensor
    wiki: torch.Tensor
    topic: torch.Tensor
    knowledge: torch.Tensor
    fused: torch.Tensor
    beta: float

    @property
    def base_dim(self) -> int:
        return self.article.shape[-1]

    @property
    def topic_dim(self) -> int:
        return self.topic.shape[-1]

    @property
    def fused_dim(self) -> int:
        return self.fused.shape[-1]


def fuse(article: torch.Tensor, wiki: torch.Tensor, topic: torch.Tensor,
         beta: float) -> RepresentationBundle:
    """Weight the knowledge sources by beta and concatenate everything.

    Accepts single vectors or batches (the concatenation runs along the last
    axis).  At beta=0 the outlet block is exactly zero; at beta=1 the topic
    block is exactly zero.
    """
    beta = check_beta(beta)
    if wiki.shape[-1] != article.shape[-1]:
        raise DimensionMismatch(
            f"article and outlet vectors must share their width, got "
            f"{article.shape[-1]} and {wiki.shape[-1]}")
    if article.shape[:-1] != wiki.shape[:-1] or article.shape[:-1] != topic.shape[:-1]:
        raise DimensionMismatch(
            f"batch shapes differ: {tuple(article.shape)}, {tuple(wiki.shape)}, "
            f"{tuple(topic.shape)}")
    knowledge = torch.cat([beta * wiki, (1.0 - beta) * topic], dim=-1)
    fused = torch.cat([article, knowledge], dim=-1)
    return RepresentationBundle(article=article, wiki=wiki, topic=topic,
                                knowledge=knowledge, fused=fused, beta=beta)


@dataclass(frozen=True)
class ClassifierHead:
    """Affine scoring head: weight of shape (3, p) and bias of shape (3,)."""

    weight: torch.Tensor
    bias: torch.Tensor

    def __post_init__(self):
        if self.weight.ndim != 2 or self.weight.shape[0] != N_CLASSES:
            raise DimensionMismatch(
                f"head weight must have shape (3, p), got {tuple(self.weight.shape)}")
        if self.bias.shape != (N_CLASSES,):
            raise DimensionMismatch(
                f"head bias must have shape (3,), got {tuple(self.bias.shape)}")

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]


def classify(fused: torch.Tensor, head: ClassifierHead,
             mode: str = "paper_relu") -> torch.Tensor:
    """Three non-negative class scores (rectified affine map of the input).

    With mode="plain_linear" the rectifier is skipped and the scores are raw
    logits.
    """
    if mode not in HEAD_MODES:
        raise ValueError(f"head mode must be one of {HEAD_MODES}, got {mode!r}")
    if fused.shape[-1] != head.in_dim:
        raise DimensionMismatch(
            f"head expects input width {head.in_dim}, got {fused.shape[-1]}")
    logits = fused @ head.weight.T + head.bias
    return F.relu(logits) if mode == "paper_relu" else logits


def predict_label(scores: torch.Tensor | np.ndarray) -> np.ndarray | int:
    """Argmax over the three scores; ties go to the lowest class code."""
    arr = scores.detach().cpu().numpy() if isinstance(scores, torch.Tensor) else np.asarray(scores)
    if arr.shape[-1] != N_CLASSES:
        raise DimensionMismatch(f"expected 3 scores, got {arr.shape[-1]}")
    # numpy argmax picks the first maximal index, which is the stated tie rule
    result = np.argmax(arr, axis=-1)
    return int(result) if result.ndim == 0 else result.astype(np.int64)


def classification_loss(scores: torch.Tensor,
                        labels: torch.Tensor | int) -> torch.Tensor:
    """Softmax cross-entropy of the scores against integer class labels.

    A single score vector pairs with a single label; a batch of score rows
    pairs with a label vector, and the batch loss is the mean over examples.
    """
    if isinstance(labels, int):
        labels = torch.tensor(labels)
    if scores.ndim == 1:
        scores = scores.unsqueeze(0)
        labels = labels.reshape(1)
    if scores.shape[-1] != N_CLASSES:
        raise DimensionMismatch(f"expected 3 scores per example, got {scores.shape[-1]}")
    return F.cross_entropy(scores, labels.long())
