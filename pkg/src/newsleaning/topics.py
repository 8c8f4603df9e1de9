"""Debate transcripts, topic extraction, and mean topic vectors.

Topic extraction intersects an article's tokens with the vocabulary of an
embedding model trained on presidential-debate transcripts: debate language
is political-topic language, so tokens the two share act as the article's
topics.  The article representation on this path is the mean of the topic
token vectors, unweighted; any trade-off weighting happens later at fusion
time.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .corpus import Article
from .errors import EmptyCorpus, MalformedRecord, UnknownParty
from .skipgram import SkipgramParams, WordEmbeddingModel, train_skipgram
from .text import load_stopwords, tokenize


class Party(enum.Enum):
    DEMOCRAT = "Democrat"
    REPUBLICAN = "Republican"

    @classmethod
    def from_string(cls, value: str) -> "Party":
        if isinstance(value, str):
            for member in cls:
                if value.strip().lower() == member.value.lower():
                    return member
        raise UnknownParty(
            f"unknown party {value!r}; expected Democrat or Republican")


@dataclass(frozen=True)
class DebateSpeech:
    """One speech turn from a debate transcript."""

    id: str
    speaker: str
    party: Party
    text: str

    def __post_init__(self):
        if not self.text:
            raise MalformedRecord(f"speech {self.id!r} has empty text")


def load_debates(path: str | Path) -> list[DebateSpeech]:
    """Load a JSON-lines debate file with id, speaker, party, text fields."""
    speeches = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(
                    f"invalid JSON on line {lineno}: {exc.msg}") from exc
            missing = [k for k in ("id", "speaker", "party", "text") if k not in obj]
            if missing:
                raise MalformedRecord(f"record missing keys {missing} (line {lineno})")
            if not isinstance(obj["text"], str) or not obj["text"]:
                raise MalformedRecord(f"speech text must be non-empty (line {lineno})")
            speeches.append(DebateSpeech(
                id=str(obj["id"]),
                speaker=str(obj["speaker"]),
                party=Party.from_string(obj["party"]),
                text=obj["text"],
            ))
    return speeches


def party_counts(speeches: Iterable[DebateSpeech]) -> dict[str, int]:
    counts = Counter(s.party.value for s in speeches)
    return {p.value: counts.get(p.value, 0) for p in Party}


def train_debate_embeddings(speeches: Sequence[DebateSpeech],
                            embed_dim: int = 300,
                            params: SkipgramParams | None = None) -> WordEmbeddingModel:
    """Train embeddings on every speech together, regardless of party."""
    if not speeches:
        raise EmptyCorpus("cannot train embeddings on zero speeches")
    return train_skipgram([s.text for s in speeches], embed_dim=embed_dim,
                          params=params)


@dataclass(frozen=True)
class TopicSet:
    """Ordered topic tokens extracted from one article.

    Duplicates are kept on purpose: a token an article repeats weighs more in
    the mean vector.
    """

    article_id: str
    topics: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.topics)


def extract_topics(article: Article, model: WordEmbeddingModel,
                   stopwords: frozenset[str] | set[str] | None = None) -> TopicSet:
    """Article tokens that are in-vocabulary content words, in article order."""
    if stopwords is None:
        stopwords = load_stopwords()
    tokens = tokenize(article.text)
    kept = tuple(t for t in tokens if t not in stopwords and t in model)
    return TopicSet(article_id=article.id, topics=kept)


def topic_mean_vector(topic_set: TopicSet,
                      model: WordEmbeddingModel) -> np.ndarray:
    """Mean of the topic token vectors; the zero vector when no topics.

    Accumulation happens in float64 regardless of how the embeddings are
    stored, so the result is stable to far below test tolerances.
    """
    if len(topic_set) == 0:
        return np.zeros(model.embed_dim, dtype=np.float64)
    total = np.zeros(model.embed_dim, dtype=np.float64)
    for token in topic_set.topics:
        total += model.vector(token).astype(np.float64)
    return total / len(topic_set)


class TopicVectorizer(BaseEstimator, TransformerMixin):
    """Estimator facade over embedding training plus topic extraction.

    ``fit`` takes debate speeches (or raw strings) and trains the embedding
    model; ``transform`` maps articles (or raw strings) to mean topic
    vectors, one row per input.
    """

    def __init__(self, embed_dim: int = 300, window: int = 5, negative: int = 5,
                 epochs: int = 5, min_count: int = 2,
                 learning_rate: float = 0.025, seed: int = 0):
        self.embed_dim = embed_dim
        self.window = window
        self.negative = negative
        self.epochs = epochs
        self.min_count = min_count
        self.learning_rate = learning_rate
        self.seed = seed

    def _params(self) -> SkipgramParams:
        return SkipgramParams(
            window=self.window, negative=self.negative, epochs=self.epochs,
            min_count=self.min_count, learning_rate=self.learning_rate,
            seed=self.seed)

    def fit(self, X: Sequence[DebateSpeech] | Sequence[str], y=None) -> "TopicVectorizer":
        texts = [x.text if isinstance(x, DebateSpeech) else x for x in X]
        if not texts:
            raise EmptyCorpus("cannot fit on zero speeches")
        self.model_ = train_skipgram(texts, embed_dim=self.embed_dim,
                                     params=self._params())
        self.stopwords_ = load_stopwords()
        return self

    def transform(self, X: Sequence[Article] | Sequence[str]) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise NotFittedError("TopicVectorizer must be fitted before transform")
        rows = []
        for item in X:
            if isinstance(item, Article):
                topic_set = extract_topics(item, self.model_, self.stopwords_)
            else:
                tokens = tuple(t for t in tokenize(item)
                               if t not in self.stopwords_ and t in self.model_)
                topic_set = TopicSet(article_id="", topics=tokens)
            rows.append(topic_mean_vector(topic_set, self.model_))
        if not rows:
            return np.zeros((0, self.embed_dim), dtype=np.float64)
        return np.stack(rows)
