"""The knowledge-infused leaning classifier as a scikit-learn estimator.

One estimator owns the whole trainable stack: text backbone, optional topic
encoder, and the three-way scoring head.  Its inputs are pre-assembled
per-article features (article text, outlet-page text, mean topic vector), so
the estimator itself stays independent of corpora, caches, and files.

Which blocks make up the fused vector follows the configuration: the
article vector always; the outlet-page vector when wiki knowledge is
enabled; the encoded topic vector when a topic encoder is selected.  The
beta trade-off applies only when both knowledge sources are present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import torch
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from torch import nn

from .backbones import DEFAULT_MAX_TOKENS, build_backbone
from .encoders import EncoderConfig, TopicAutoencoder, build_topic_encoder, reconstruction_loss
from .errors import DimensionMismatch, NonFiniteLoss
from .fusion import (
    ClassifierHead,
    classification_loss,
    classify,
    fuse,
    predict_label,
)
from .validation import check_beta

MISSING_WIKI_MODES = ("empty_text", "zero_vector")


class ArticleInputs(NamedTuple):
    """Assembled inputs for one article.

    ``wiki_text`` is None when the outlet has no encyclopedia page and the
    zero-vector policy is active; ``topic_vector`` is None when the topic
    path is disabled.
    """

    text: str
    wiki_text: str | None = None
    topic_vector: np.ndarray | None = None


@dataclass
class HistoryRow:
    """One optimization step in the training history."""

    epoch: int
    step: int
    loss: float
    recon_loss: float | None

    def to_dict(self) -> dict:
        return {"epoch": self.epoch, "step": self.step, "loss": self.loss,
                "recon_loss": self.recon_loss}


class KnowledgeFusedClassifier(BaseEstimator, ClassifierMixin):
    """Three-way leaning classifier over fused text and knowledge vectors.

    Follows the scikit-learn contract: all constructor arguments are plain
    hyper-parameters, ``fit`` learns attributes with trailing underscores
    and returns self, and ``predict`` maps inputs to label codes 0/1/2.
    """

    def __init__(self, backbone: str = "bert-base", stub_dim: int = 128,
                 max_tokens: int = DEFAULT_MAX_TOKENS,
                 topic_encoder: str = "none", topic_out_dim: int = 200,
                 topic_hidden_dim: int = 256, use_wiki: bool = False,
                 beta: float = 0.5, head: str = "paper_relu",
                 batch_size: int = 2, learning_rate: float = 1e-6,
                 epochs: int = 3, seed: int = 0, recon_weight: float = 1.0):
        self.backbone = backbone
        self.stub_dim = stub_dim
        self.max_tokens = max_tokens
        self.topic_encoder = topic_encoder
        self.topic_out_dim = topic_out_dim
        self.topic_hidden_dim = topic_hidden_dim
        self.use_wiki = use_wiki
        self.beta = beta
        self.head = head
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed
        self.recon_weight = recon_weight

    # ---------------------------------------------------------------- fit

    def fit(self, X: Sequence[ArticleInputs], y) -> "KnowledgeFusedClassifier":
        X = list(X)
        y_arr = np.asarray(y, dtype=np.int64)
        if len(X) == 0:
            raise ValueError("cannot fit on an empty training set")
        if y_arr.shape != (len(X),):
            raise ValueError(
                f"X and y lengths differ: {len(X)} vs {y_arr.shape}")
        if ((y_arr < 0) | (y_arr > 2)).any():
            raise ValueError("labels must be integer codes in {0, 1, 2}")
        check_beta(self.beta)
        self._check_inputs(X)

        torch.manual_seed(self.seed)
        self.backbone_ = build_backbone(self.backbone, stub_dim=self.stub_dim,
                                        max_tokens=self.max_tokens)
        q = self.backbone_.hidden_dim
        self.topic_in_dim_ = self._topic_in_dim(X)
        self.topic_encoder_ = None
        if self.topic_encoder != "none":
            config = EncoderConfig(
                in_dim=self.topic_in_dim_, out_dim=self.topic_out_dim,
                hidden_dim=self.topic_hidden_dim, mode=self.topic_encoder,
                recon_weight=self.recon_weight)
            self.topic_encoder_ = build_topic_encoder(config)
        self.fused_dim_ = (q + (q if self.use_wiki else 0)
                           + (self.topic_out_dim if self.topic_encoder_ else 0))
        self.head_linear_ = nn.Linear(self.fused_dim_, 3)
        self.classes_ = np.array([0, 1, 2])

        params = list(self.backbone_.parameters()) + list(self.head_linear_.parameters())
        if self.topic_encoder_ is not None:
            params += list(self.topic_encoder_.parameters())
        optimizer = torch.optim.Adam(params, lr=self.learning_rate)

        rng = np.random.default_rng(self.seed)
        self.history_ = []
        self._train_mode()
        step = 0
        n = len(X)
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch_idx = order[start:start + self.batch_size]
                batch = [X[i] for i in batch_idx]
                labels = torch.from_numpy(y_arr[batch_idx])
                optimizer.zero_grad()
                scores, recon = self._forward(batch)
                loss = classification_loss(scores, labels)
                recon_value = None
                if recon is not None:
                    loss = loss + self.recon_weight * recon
                    recon_value = float(recon.detach())
                loss_value = float(loss.detach())
                if not math.isfinite(loss_value):
                    raise NonFiniteLoss(
                        f"loss became {loss_value} at epoch {epoch} step {step}; "
                        f"last batch size {len(batch)}, lr {self.learning_rate}")
                loss.backward()
                optimizer.step()
                self.history_.append(HistoryRow(
                    epoch=epoch, step=step, loss=loss_value, recon_loss=recon_value))
                step += 1
        self._eval_mode()
        return self

    # ---------------------------------------------------------- inference

    def predict(self, X: Sequence[ArticleInputs]) -> np.ndarray:
        scores = self.decision_scores(X)
        return np.asarray(predict_label(scores)).reshape(-1)

    def predict_proba(self, X: Sequence[ArticleInputs]) -> np.ndarray:
        scores = self.decision_scores(X)
        return torch.softmax(scores, dim=-1).numpy()

    def decision_scores(self, X: Sequence[ArticleInputs]) -> torch.Tensor:
        """Class scores for each input row, computed in eval mode."""
        self._require_fitted()
        X = list(X)
        if not X:
            raise ValueError("cannot score an empty input list")
        self._check_inputs(X)
        self._eval_mode()
        chunks = []
        with torch.no_grad():
            for start in range(0, len(X), max(self.batch_size, 16)):
                batch = X[start:start + max(self.batch_size, 16)]
                scores, _ = self._forward(batch, reuse_wiki=True)
                chunks.append(scores)
        return torch.cat(chunks, dim=0)

    # ---------------------------------------------------------- internals

    def _check_inputs(self, X: Sequence[ArticleInputs]) -> None:
        for row in X:
            if not isinstance(row, ArticleInputs):
                raise TypeError(
                    f"expected ArticleInputs rows, got {type(row).__name__}")
            if self.topic_encoder != "none" and row.topic_vector is None:
                raise ValueError(
                    "topic_vector is required when a topic encoder is enabled")

    def _topic_in_dim(self, X: Sequence[ArticleInputs]) -> int | None:
        if self.topic_encoder == "none":
            return None
        dims = {len(np.asarray(row.topic_vector).reshape(-1)) for row in X}
        if len(dims) != 1:
            raise DimensionMismatch(f"topic vectors have mixed dimensions {sorted(dims)}")
        return dims.pop()

    def _wiki_vectors(self, rows: list[ArticleInputs],
                      reuse: bool) -> torch.Tensor:
        q = self.backbone_.hidden_dim
        texts = [row.wiki_text if row.wiki_text is not None else "" for row in rows]
        present = [row.wiki_text is not None for row in rows]
        if reuse:
            # identical page texts collapse to one backbone pass in eval mode
            unique = sorted(set(texts))
            embedded = self.backbone_.embed(unique)
            index = {t: i for i, t in enumerate(unique)}
            vecs = embedded[[index[t] for t in texts]]
        else:
            vecs = self.backbone_.embed(texts)
        if all(present):
            return vecs
        mask = torch.tensor(present, dtype=vecs.dtype).unsqueeze(-1)
        return vecs * mask  # zero-vector policy for missing pages

    def _forward(self, rows: list[ArticleInputs],
                 reuse_wiki: bool = False) -> tuple[torch.Tensor, torch.Tensor | None]:
        article = self.backbone_.embed([row.text for row in rows])
        blocks = [article]
        recon = None
        topic_code = None
        if self.topic_encoder_ is not None:
            topic = torch.from_numpy(np.stack(
                [np.asarray(r.topic_vector, dtype=np.float32) for r in rows]))
            if isinstance(self.topic_encoder_, TopicAutoencoder):
                topic_code, reconstructed = self.topic_encoder_(topic)
                recon = reconstruction_loss(topic, reconstructed)
            else:
                topic_code = self.topic_encoder_(topic)
        if self.use_wiki:
            wiki = self._wiki_vectors(rows, reuse=reuse_wiki)
            if topic_code is not None:
                bundle = fuse(article, wiki, topic_code, self.beta)
                fused = bundle.fused
            else:
                fused = torch.cat([article, wiki], dim=-1)
        else:
            if topic_code is not None:
                fused = torch.cat([article, topic_code], dim=-1)
            else:
                fused = article
        head = ClassifierHead(self.head_linear_.weight, self.head_linear_.bias)
        return classify(fused, head, mode=self.head), recon

    def _require_fitted(self) -> None:
        if not hasattr(self, "head_linear_"):
            raise NotFittedError(
                "this KnowledgeFusedClassifier instance is not fitted yet")

    def _train_mode(self) -> None:
        self.backbone_.train()
        self.head_linear_.train()
        if self.topic_encoder_ is not None:
            self.topic_encoder_.train()

    def _eval_mode(self) -> None:
        self.backbone_.eval()
        self.head_linear_.eval()
        if self.topic_encoder_ is not None:
            self.topic_encoder_.eval()

    # -------------------------------------------------------- persistence

    def save(self, path, metadata: dict | None = None) -> None:
        """Write hyper-parameters and learned weights to one checkpoint file."""
        self._require_fitted()
        state = {
            "params": self.get_params(),
            "topic_in_dim": self.topic_in_dim_,
            "fused_dim": self.fused_dim_,
            "backbone_state": self.backbone_.state_dict(),
            "head_state": self.head_linear_.state_dict(),
            "encoder_state": (self.topic_encoder_.state_dict()
                              if self.topic_encoder_ is not None else None),
            "history": [row.to_dict() for row in self.history_],
            "metadata": dict(metadata) if metadata else {},
        }
        torch.save(state, path)

    @classmethod
    def load(cls, path) -> "KnowledgeFusedClassifier":
        state = torch.load(path, map_location="cpu", weights_only=False)
        est = cls(**state["params"])
        est.backbone_ = build_backbone(est.backbone, stub_dim=est.stub_dim,
                                       max_tokens=est.max_tokens)
        est.backbone_.load_state_dict(state["backbone_state"])
        est.topic_in_dim_ = state["topic_in_dim"]
        est.topic_encoder_ = None
        if est.topic_encoder != "none":
            config = EncoderConfig(
                in_dim=est.topic_in_dim_, out_dim=est.topic_out_dim,
                hidden_dim=est.topic_hidden_dim, mode=est.topic_encoder,
                recon_weight=est.recon_weight)
            est.topic_encoder_ = build_topic_encoder(config)
            est.topic_encoder_.load_state_dict(state["encoder_state"])
        est.fused_dim_ = state["fused_dim"]
        est.head_linear_ = nn.Linear(est.fused_dim_, 3)
        est.head_linear_.load_state_dict(state["head_state"])
        est.classes_ = np.array([0, 1, 2])
        est.history_ = [HistoryRow(**row) for row in state["history"]]
        est.metadata_ = state.get("metadata", {})
        est._eval_mode()
        return est
