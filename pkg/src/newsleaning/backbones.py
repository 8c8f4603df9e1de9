"""Text backbones producing the article and outlet-page vectors.

Two families are provided behind one interface: pretrained transformer
models (fine-tunable, downloaded on first use), and a deterministic hashing
stub that needs no downloads and exists so the full pipeline can run in CI.
Both expose ``embed(texts) -> (batch, hidden_dim)`` with gradients flowing
into their trainable parameters, and both pool token vectors with a mean.
"""

from __future__ import annotations

import hashlib

import numpy as np
import torch
from torch import nn

from .errors import BackboneLoadError
from .text import tokenize
from .validation import check_positive

TRANSFORMER_MODEL_IDS = {
    "bert-base": "bert-base-uncased",
    "roberta-base": "roberta-base",
    "distilbert-base": "distilbert-base-uncased",
}
STUB_NAMES = ("hash", "stub")
DEFAULT_MAX_TOKENS = 512

_STUB_MATRIX_SEED = 0x5EED
_STUB_BUCKETS = 8192


def _token_bucket(token: str) -> int:
    # blake2b rather than hash() so the mapping survives interpreter restarts
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % _STUB_BUCKETS


class HashingBackbone(nn.Module):
    """Deterministic stand-in for a pretrained encoder.

    Each token hashes to a row of a fixed random matrix; a text's frozen
    feature is the mean of its token rows.  A trainable linear layer
    (initialized to the identity) sits on top, so the backbone has
    fine-tunable parameters like its transformer counterparts while the
    frozen part is cacheable per text.
    """

    def __init__(self, hidden_dim: int = 128,
                 max_tokens: int = DEFAULT_MAX_TOKENS):
        super().__init__()
        check_positive(hidden_dim, "hidden_dim")
        check_positive(max_tokens, "max_tokens")
        self.hidden_dim = hidden_dim
        self.max_tokens = max_tokens
        rng = np.random.default_rng(_STUB_MATRIX_SEED)
        table = rng.standard_normal((_STUB_BUCKETS, hidden_dim)).astype(np.float32)
        self.register_buffer("token_table", torch.from_numpy(table))
        self.projection = nn.Linear(hidden_dim, hidden_dim)
        with torch.no_grad():
            self.projection.weight.copy_(torch.eye(hidden_dim))
            self.projection.bias.zero_()
        self._feature_cache: dict[str, torch.Tensor] = {}

    def _frozen_features(self, text: str) -> torch.Tensor:
        cached = self._feature_cache.get(text)
        if cached is not None:
            return cached
        tokens = tokenize(text)[: self.max_tokens]
        if tokens:
            idx = torch.tensor([_token_bucket(t) for t in tokens], dtype=torch.long)
            feat = self.token_table[idx].mean(dim=0)
        else:
            feat = self.token_table.new_zeros(self.hidden_dim)
        self._feature_cache[text] = feat
        return feat

    def embed(self, texts: list[str]) -> torch.Tensor:
        feats = torch.stack([self._frozen_features(t) for t in texts])
        return self.projection(feats)

    def forward(self, texts: list[str]) -> torch.Tensor:
        return self.embed(texts)


class TransformerBackbone(nn.Module):
    """Mean-pooled final-layer representations from a pretrained transformer.

    Inputs are truncated to ``max_tokens``; the pooled mean runs over the
    non-padding positions (special tokens included), so even an empty string
    produces a finite vector from its special-token-only sequence.
    """

    def __init__(self, model_id: str, max_tokens: int = DEFAULT_MAX_TOKENS):
        super().__init__()
        check_positive(max_tokens, "max_tokens")
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise BackboneLoadError(
                "the transformers package is required for pretrained backbones; "
                "install the 'hf' extra") from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise BackboneLoadError(f"could not load backbone {model_id!r}: {exc}") from exc
        self.model_id = model_id
        self.max_tokens = max_tokens
        self.hidden_dim = int(self.model.config.hidden_size)

    def embed(self, texts: list[str]) -> torch.Tensor:
        batch = self.tokenizer(texts, return_tensors="pt", padding=True,
                               truncation=True, max_length=self.max_tokens)
        device = next(self.model.parameters()).device
        batch = {k: v.to(device) for k, v in batch.items()}
        hidden = self.model(**batch).last_hidden_state
        mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
        summed = (hidden * mask).sum(dim=1)
        counts = mask.sum(dim=1).clamp(min=1.0)
        return summed / counts

    def forward(self, texts: list[str]) -> torch.Tensor:
        return self.embed(texts)


def build_backbone(name: str, stub_dim: int = 128,
                   max_tokens: int = DEFAULT_MAX_TOKENS) -> nn.Module:
    """Build a backbone by short name.

    Known names: bert-base, roberta-base, distilbert-base, and the
    download-free stub under "hash" (alias "stub").
    """
    if name in STUB_NAMES:
        return HashingBackbone(hidden_dim=stub_dim, max_tokens=max_tokens)
    if name in TRANSFORMER_MODEL_IDS:
        return TransformerBackbone(TRANSFORMER_MODEL_IDS[name], max_tokens=max_tokens)
    raise BackboneLoadError(
        f"unknown backbone {name!r}; expected one of "
        f"{sorted(TRANSFORMER_MODEL_IDS) + list(STUB_NAMES)}")
