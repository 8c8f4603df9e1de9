"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from newsleaning.corpus import Article, Corpus, Leaning

LABELS = ("left", "center", "right")


def make_article(i: int, domain: str, label: str, title: str | None = None,
                 body: str | None = None) -> Article:
    return Article(
        id=f"a{i:04d}",
        domain=domain,
        title=title if title is not None else f"Headline {i}",
        body=body if body is not None else f"Body text for article {i}.",
        label=Leaning.from_string(label),
    )


def make_corpus(n_articles: int = 30, n_domains: int = 5) -> Corpus:
    """Small deterministic corpus cycling labels and domains."""
    articles = [
        make_article(i, domain=f"outlet{i % n_domains}.com", label=LABELS[i % 3])
        for i in range(n_articles)
    ]
    return Corpus(articles)


def write_corpus_file(path: Path, records: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
    return path


def corpus_records(n_articles: int = 30, n_domains: int = 5) -> list[dict]:
    return [
        {
            "id": f"a{i:04d}",
            "domain": f"outlet{i % n_domains}.com",
            "title": f"Headline {i}",
            "body": f"Body text for article {i}.",
            "label": LABELS[i % 3],
        }
        for i in range(n_articles)
    ]


@pytest.fixture
def tiny_corpus() -> Corpus:
    return make_corpus()


@pytest.fixture
def corpus_path(tmp_path: Path) -> Path:
    return write_corpus_file(tmp_path / "corpus.jsonl", corpus_records())
