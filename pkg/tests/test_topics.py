"""Debate loading, topic extraction, and mean topic vectors."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from newsleaning.errors import EmptyCorpus, MalformedRecord, UnknownParty
from newsleaning.skipgram import SkipgramParams, WordEmbeddingModel
from newsleaning.topics import (
    DebateSpeech,
    Party,
    TopicSet,
    TopicVectorizer,
    extract_topics,
    load_debates,
    party_counts,
    topic_mean_vector,
    train_debate_embeddings,
)

from conftest import make_article


def make_model(token_vectors: dict[str, list[float]]) -> WordEmbeddingModel:
    tokens = list(token_vectors)
    dim = len(next(iter(token_vectors.values())))
    vectors = np.array([token_vectors[t] for t in tokens], dtype=np.float32)
    return WordEmbeddingModel(dim, tokens, vectors, SkipgramParams())


def write_debates(path: Path, records: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
    return path


def debate_records() -> list[dict]:
    return [
        {"id": "s1", "speaker": "Alpha", "party": "Democrat",
         "text": "We will lower taxes for families."},
        {"id": "s2", "speaker": "Bravo", "party": "Republican",
         "text": "Our plan secures the border."},
        {"id": "s3", "speaker": "Alpha", "party": "democrat",
         "text": "Healthcare must be affordable."},
    ]


def test_load_debates_fixture(tmp_path: Path) -> None:
    path = write_debates(tmp_path / "d.jsonl", debate_records())
    speeches = load_debates(path)
    assert len(speeches) == 3
    assert speeches[0].party is Party.DEMOCRAT
    assert speeches[2].party is Party.DEMOCRAT  # case-insensitive
    assert party_counts(speeches) == {"Democrat": 2, "Republican": 1}


def test_load_debates_unknown_party(tmp_path: Path) -> None:
    records = debate_records()
    records[1]["party"] = "independent"
    path = write_debates(tmp_path / "d.jsonl", records)
    with pytest.raises(UnknownParty):
        load_debates(path)


def test_load_debates_rejects_empty_text(tmp_path: Path) -> None:
    records = debate_records()
    records[0]["text"] = ""
    path = write_debates(tmp_path / "d.jsonl", records)
    with pytest.raises(MalformedRecord):
        load_debates(path)


def test_load_debates_missing_field(tmp_path: Path) -> None:
    records = debate_records()
    del records[2]["speaker"]
    path = write_debates(tmp_path / "d.jsonl", records)
    with pytest.raises(MalformedRecord, match="speaker"):
        load_debates(path)


def test_train_debate_embeddings_requires_speeches() -> None:
    with pytest.raises(EmptyCorpus):
        train_debate_embeddings([])


def test_train_debate_embeddings_ignores_party() -> None:
    dem = DebateSpeech("s1", "A", Party.DEMOCRAT, "tax plan budget tax plan")
    rep = DebateSpeech("s2", "B", Party.REPUBLICAN, "tax plan budget tax plan")
    model = train_debate_embeddings(
        [dem, rep], embed_dim=8,
        params=SkipgramParams(window=2, negative=2, epochs=2, min_count=2, seed=0))
    # both parties' tokens land in one shared vocabulary
    assert "tax" in model
    assert "plan" in model


def test_extract_topics_matches_hand_filtering() -> None:
    model = make_model({
        "economy": [1.0, 0.0], "border": [0.0, 1.0], "votes": [1.0, 1.0],
    })
    article = make_article(
        1, "news.com", "left",
        title="The economy and the border",
        body="Votes on the economy matter; weather does not.")
    topic_set = extract_topics(article, model, stopwords={"the", "and", "on", "does", "not"})
    # hand-filtered: lowercase tokens of title+body, keep in-vocab non-stopwords
    assert topic_set.topics == ("economy", "border", "votes", "economy")
    assert topic_set.article_id == article.id


def test_extract_topics_strips_punctuation_like_training() -> None:
    model = make_model({"taxes": [1.0], "economy": [2.0]})
    article = make_article(2, "news.com", "center",
                           title="Taxes, taxes!", body="(economy)")
    topic_set = extract_topics(article, model, stopwords=set())
    assert topic_set.topics == ("taxes", "taxes", "economy")


def test_extract_topics_empty_when_nothing_matches() -> None:
    model = make_model({"economy": [1.0, 0.0]})
    article = make_article(3, "news.com", "right", title="Hello", body="world")
    topic_set = extract_topics(article, model, stopwords=set())
    assert topic_set.topics == ()


def test_topic_mean_vector_hand_computed() -> None:
    model = make_model({"a": [1.0, 3.0], "b": [2.0, 5.0]})
    mean = topic_mean_vector(TopicSet("x", ("a", "b")), model)
    assert mean.dtype == np.float64
    np.testing.assert_allclose(mean, [1.5, 4.0], rtol=0, atol=1e-15)


def test_topic_mean_vector_is_frequency_weighted() -> None:
    model = make_model({"a": [3.0], "b": [0.0]})
    mean = topic_mean_vector(TopicSet("x", ("a", "a", "b")), model)
    np.testing.assert_allclose(mean, [2.0], atol=1e-15)


def test_topic_mean_vector_empty_is_zero_vector() -> None:
    model = make_model({"a": [1.0, 2.0, 3.0]})
    mean = topic_mean_vector(TopicSet("x", ()), model)
    assert mean.shape == (3,)
    assert np.array_equal(mean, np.zeros(3))


def test_topic_mean_vector_permutation_invariant() -> None:
    rng = np.random.default_rng(5)
    vocab = {f"t{i}": rng.normal(size=8).tolist() for i in range(20)}
    model = make_model(vocab)
    topics = tuple(rng.choice(list(vocab), size=50))
    shuffled = tuple(np.array(topics)[rng.permutation(50)])
    a = topic_mean_vector(TopicSet("x", topics), model)
    b = topic_mean_vector(TopicSet("x", shuffled), model)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_topic_mean_norm_bounded_by_largest_vector() -> None:
    rng = np.random.default_rng(9)
    vocab = {f"t{i}": rng.normal(size=6).tolist() for i in range(10)}
    model = make_model(vocab)
    topics = tuple(rng.choice(list(vocab), size=30))
    mean = topic_mean_vector(TopicSet("x", topics), model)
    max_norm = max(np.linalg.norm(np.asarray(v, dtype=np.float64))
                   for v in vocab.values())
    assert np.linalg.norm(mean) <= max_norm + 1e-9


def test_vectorizer_fit_transform_and_clone() -> None:
    speeches = [
        DebateSpeech("s1", "A", Party.DEMOCRAT,
                     "taxes and healthcare and taxes and budget"),
        DebateSpeech("s2", "B", Party.REPUBLICAN,
                     "border security budget taxes healthcare border"),
    ]
    vec = TopicVectorizer(embed_dim=6, window=2, negative=2, epochs=2,
                          min_count=2, seed=1)
    assert clone(vec).get_params() == vec.get_params()
    with pytest.raises(NotFittedError):
        vec.transform(["taxes"])
    vec.fit(speeches)
    articles = [
        make_article(1, "d.com", "left", title="Taxes", body="healthcare budget"),
        make_article(2, "d.com", "right", title="Nothing", body="matches here"),
    ]
    out = vec.transform(articles)
    assert out.shape == (2, 6)
    assert np.array_equal(out[1], np.zeros(6))  # no topics, zero vector
    direct = topic_mean_vector(
        extract_topics(articles[0], vec.model_, vec.stopwords_), vec.model_)
    np.testing.assert_allclose(out[0], direct, atol=0)
