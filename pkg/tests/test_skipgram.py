"""Skip-gram trainer: shape, determinism, persistence, and similarity checks."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from newsleaning.errors import MalformedRecord
from newsleaning.skipgram import (
    SkipgramParams,
    WordEmbeddingModel,
    build_vocabulary,
    train_skipgram,
)
from newsleaning.text import tokenize


def toy_sentences(n: int = 200, seed: int = 0) -> list[str]:
    rng = np.random.default_rng(seed)
    words = [f"w{i}" for i in range(40)]
    out = []
    for _ in range(n):
        k = int(rng.integers(4, 9))
        out.append(" ".join(words[i] for i in rng.integers(0, len(words), size=k)))
    return out


def small_params(**overrides) -> SkipgramParams:
    base = dict(window=3, negative=4, epochs=3, min_count=2,
                learning_rate=0.05, seed=0)
    base.update(overrides)
    return SkipgramParams(**base)


def test_vector_shapes_and_vocab_coverage() -> None:
    texts = toy_sentences(200)
    model = train_skipgram(texts, embed_dim=50, params=small_params())
    counts = Counter(t for s in texts for t in tokenize(s))
    expected_vocab = {t for t, c in counts.items() if c >= 2}
    assert set(model.tokens) == expected_vocab
    assert model.vectors.shape == (len(expected_vocab), 50)
    for tok in list(expected_vocab)[:5]:
        assert model.vector(tok).shape == (50,)


def test_min_count_filters_rare_tokens() -> None:
    texts = ["alpha beta gamma", "alpha beta delta", "alpha beta"]
    model = train_skipgram(texts, embed_dim=8, params=small_params(min_count=2))
    assert "alpha" in model
    assert "beta" in model
    assert "gamma" not in model  # appears once
    assert "delta" not in model


def test_vocabulary_order_is_frequency_then_alphabetical() -> None:
    token_lists = [["b", "b", "b", "c", "c", "a", "a", "z"]]
    assert build_vocabulary(token_lists, min_count=2) == ["b", "a", "c"]


def test_training_is_bit_deterministic() -> None:
    texts = toy_sentences(80)
    m1 = train_skipgram(texts, embed_dim=16, params=small_params(seed=7))
    m2 = train_skipgram(texts, embed_dim=16, params=small_params(seed=7))
    assert m1.tokens == m2.tokens
    assert np.array_equal(m1.vectors, m2.vectors)
    m3 = train_skipgram(texts, embed_dim=16, params=small_params(seed=8))
    assert not np.array_equal(m1.vectors, m3.vectors)


def test_training_moves_vectors() -> None:
    texts = toy_sentences(80)
    params = small_params()
    trained = train_skipgram(texts, embed_dim=16, params=params)
    rng = np.random.default_rng(params.seed)
    init = (rng.random((len(trained.tokens), 16), dtype=np.float32) - 0.5) / 16
    assert not np.allclose(trained.vectors, init)


def test_save_load_round_trip_is_exact(tmp_path: Path) -> None:
    model = train_skipgram(toy_sentences(60), embed_dim=12, params=small_params())
    path = tmp_path / "emb.txt"
    model.save(path)
    loaded = WordEmbeddingModel.load(path)
    assert loaded.tokens == model.tokens
    assert loaded.embed_dim == 12
    assert loaded.params == model.params
    assert np.array_equal(loaded.vectors, model.vectors)


def test_saved_format_is_header_plus_token_lines(tmp_path: Path) -> None:
    import json

    model = train_skipgram(["one two one two", "one two three three"],
                           embed_dim=4, params=small_params(min_count=2))
    path = tmp_path / "emb.txt"
    model.save(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    assert header["embed_dim"] == 4
    assert header["vocab_size"] == len(model.tokens)
    assert header["params"]["min_count"] == 2
    assert len(lines) == 1 + len(model.tokens)
    for line in lines[1:]:
        parts = line.split(" ")
        assert len(parts) == 5
        assert parts[0] in model
        [float(x) for x in parts[1:]]  # parses as numbers


def test_load_rejects_corrupted_file(tmp_path: Path) -> None:
    path = tmp_path / "emb.txt"
    path.write_text("not a header\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        WordEmbeddingModel.load(path)

    model = train_skipgram(["a b a b a b"], embed_dim=4,
                           params=small_params(min_count=2))
    good = tmp_path / "good.txt"
    model.save(good)
    lines = good.read_text().splitlines()
    lines[1] = lines[1] + " 0.5"  # one value too many
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        WordEmbeddingModel.load(bad)


def test_out_of_vocabulary_lookup() -> None:
    model = train_skipgram(["a b a b"], embed_dim=4, params=small_params())
    assert "zzz" not in model
    with pytest.raises(KeyError):
        model.vector("zzz")


def test_shared_context_tokens_end_up_similar() -> None:
    # "tax" and "taxes" always appear in identical contexts; "wolf" never
    # shares a sentence with either.
    sentences = []
    for _ in range(30):
        sentences.append("budget plan tax rate vote")
        sentences.append("budget plan taxes rate vote")
        sentences.append("dog wolf grass stone river")

    def cosine(u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))

    margins = []
    for seed in range(5):
        model = train_skipgram(
            sentences, embed_dim=24,
            params=small_params(window=2, epochs=8, seed=seed))
        same = cosine(model.vector("tax"), model.vector("taxes"))
        cross = cosine(model.vector("tax"), model.vector("wolf"))
        margins.append(same - cross)
    assert float(np.mean(margins)) > 0.0
