"""Skip-gram word embeddings with negative sampling, trained from scratch.

The trainer is a single-threaded numpy implementation so that a given seed
produces bit-identical vectors on every run; that reproducibility contract is
the reason for not delegating to an external word2vec library.  The model is
persisted as a small text format: a JSON header line followed by one
``token v1 v2 ... v_dim`` line per vocabulary entry.

Training follows the classic recipe: dynamic context windows, a unigram^0.75
noise distribution for negatives, and a linearly decaying learning rate.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, MalformedRecord
from .text import tokenize
from .validation import check_positive

_MIN_LR_FACTOR = 1e-4


@dataclass(frozen=True)
class SkipgramParams:
    """Hyper-parameters of one embedding training run."""

    window: int = 5
    negative: int = 5
    epochs: int = 5
    min_count: int = 2
    learning_rate: float = 0.025
    seed: int = 0

    def validate(self) -> "SkipgramParams":
        check_positive(self.window, "window")
        check_positive(self.negative, "negative")
        check_positive(self.epochs, "epochs")
        check_positive(self.min_count, "min_count")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        return self


class WordEmbeddingModel:
    """Lookup table from token to embedding vector."""

    def __init__(self, embed_dim: int, tokens: Sequence[str], vectors: np.ndarray,
                 params: SkipgramParams):
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.shape != (len(tokens), embed_dim):
            raise DimensionMismatch(
                f"expected vectors of shape {(len(tokens), embed_dim)}, "
                f"got {vectors.shape}")
        self.embed_dim = int(embed_dim)
        self.tokens = tuple(tokens)
        self.vectors = vectors
        self.params = params
        self._index = {tok: i for i, tok in enumerate(self.tokens)}

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.tokens)

    def vector(self, token: str) -> np.ndarray:
        """Embedding for a known token; KeyError for out-of-vocabulary input."""
        return self.vectors[self._index[token]]

    def save(self, path: str | Path) -> None:
        header = {
            "embed_dim": self.embed_dim,
            "vocab_size": len(self.tokens),
            "params": asdict(self.params),
        }
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(header, sort_keys=True) + "\n")
            for tok, vec in zip(self.tokens, self.vectors):
                values = " ".join(repr(float(v)) for v in vec)
                f.write(f"{tok} {values}\n")

    @classmethod
    def load(cls, path: str | Path) -> "WordEmbeddingModel":
        with open(path, "r", encoding="utf-8") as f:
            header_line = f.readline()
            try:
                header = json.loads(header_line)
                embed_dim = int(header["embed_dim"])
                vocab_size = int(header["vocab_size"])
                params = SkipgramParams(**header["params"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRecord(f"bad embedding header in {path}: {exc}") from exc
            tokens: list[str] = []
            rows: list[np.ndarray] = []
            for lineno, line in enumerate(f, start=2):
                parts = line.rstrip("\n").split(" ")
                if len(parts) != embed_dim + 1:
                    raise MalformedRecord(
                        f"line {lineno} of {path} has {len(parts) - 1} values, "
                        f"expected {embed_dim}")
                tokens.append(parts[0])
                rows.append(np.array([float(x) for x in parts[1:]], dtype=np.float32))
        if len(tokens) != vocab_size:
            raise MalformedRecord(
                f"{path} declares {vocab_size} tokens but contains {len(tokens)}")
        vectors = (np.stack(rows) if rows
                   else np.zeros((0, embed_dim), dtype=np.float32))
        return cls(embed_dim, tokens, vectors, params)


def build_vocabulary(token_lists: Sequence[Sequence[str]],
                     min_count: int) -> list[str]:
    """Tokens seen at least min_count times, most frequent first.

    Frequency ties break alphabetically so the ordering is reproducible.
    """
    counts = Counter()
    for toks in token_lists:
        counts.update(toks)
    kept = [t for t, c in counts.items() if c >= min_count]
    kept.sort(key=lambda t: (-counts[t], t))
    return kept


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def train_skipgram(texts: Sequence[str], embed_dim: int = 300,
                   params: SkipgramParams | None = None) -> WordEmbeddingModel:
    """Train skip-gram embeddings over raw texts.

    Every text contributes to one shared embedding space; no grouping of the
    inputs (by speaker, party, or anything else) affects training.
    """
    params = (params or SkipgramParams()).validate()
    check_positive(embed_dim, "embed_dim")

    token_lists = [tokenize(t) for t in texts]
    vocab = build_vocabulary(token_lists, params.min_count)
    index = {t: i for i, t in enumerate(vocab)}
    sentences = [
        np.array([index[t] for t in toks if t in index], dtype=np.int64)
        for toks in token_lists
    ]
    sentences = [s for s in sentences if len(s) >= 2]

    v = len(vocab)
    rng = np.random.default_rng(params.seed)
    vecs_in = ((rng.random((v, embed_dim), dtype=np.float32) - 0.5) / embed_dim)
    vecs_out = np.zeros((v, embed_dim), dtype=np.float32)
    if v == 0 or not sentences:
        return WordEmbeddingModel(embed_dim, vocab, vecs_in, params)

    counts = np.zeros(v, dtype=np.float64)
    for s in sentences:
        np.add.at(counts, s, 1.0)
    noise = counts ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    total_positions = sum(len(s) for s in sentences) * params.epochs
    lr0 = params.learning_rate
    done = 0
    for _epoch in range(params.epochs):
        for sent in sentences:
            lr = max(lr0 * (1.0 - done / total_positions), lr0 * _MIN_LR_FACTOR)
            n = len(sent)
            # one dynamic window draw per center position, like word2vec
            widths = rng.integers(1, params.window + 1, size=n)
            for i in range(n):
                center = sent[i]
                lo, hi = max(0, i - widths[i]), min(n, i + widths[i] + 1)
                ctx = np.concatenate([sent[lo:i], sent[i + 1:hi]])
                ctx = ctx[ctx != center]
                if ctx.size == 0:
                    continue
                m = ctx.size
                draws = rng.random((m, params.negative))
                negs = np.searchsorted(noise_cum, draws)
                targets = np.concatenate([ctx[:, None], negs], axis=1)
                labels = np.zeros_like(targets, dtype=np.float32)
                labels[:, 0] = 1.0
                # a negative that hits the positive context is skipped
                keep = np.ones_like(labels, dtype=bool)
                keep[:, 1:] = negs != ctx[:, None]

                flat_t = targets[keep]
                flat_l = labels[keep]
                z = vecs_in[center]
                scores = _sigmoid(vecs_out[flat_t] @ z)
                g = (flat_l - scores) * np.float32(lr)
                grad_in = g @ vecs_out[flat_t]
                np.add.at(vecs_out, flat_t, g[:, None] * z[None, :])
                vecs_in[center] += grad_in
            done += n
    return WordEmbeddingModel(embed_dim, vocab, vecs_in, params)
