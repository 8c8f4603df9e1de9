"""Corpus loading, label parsing, and split behaviour."""

from __future__ import annotations

import json
import math
from collections import Counter
from pathlib import Path

import pytest

from newsleaning.corpus import (
    Corpus,
    Leaning,
    SplitSpec,
    load_corpus,
    load_split,
    make_media_split,
    make_random_split,
    save_split,
    validate_split,
)
from newsleaning.errors import (
    DuplicateId,
    EmptyCorpus,
    MalformedRecord,
    TooFewDomains,
    UnknownLabel,
)

from conftest import corpus_records, make_article, make_corpus, write_corpus_file


def test_leaning_codes_are_ordinal() -> None:
    assert Leaning.LEFT == 0
    assert Leaning.CENTER == 1
    assert Leaning.RIGHT == 2


@pytest.mark.parametrize("raw,expected", [
    ("left", Leaning.LEFT),
    ("LEFT", Leaning.LEFT),
    ("Center", Leaning.CENTER),
    (" right ", Leaning.RIGHT),
])
def test_label_parse_case_insensitive(raw: str, expected: Leaning) -> None:
    assert Leaning.from_string(raw) is expected


def test_label_parse_rejects_unknown() -> None:
    with pytest.raises(UnknownLabel):
        Leaning.from_string("centrist")
    with pytest.raises(UnknownLabel):
        Leaning.from_string(1)  # type: ignore[arg-type]


def test_load_corpus_round_trip(tmp_path: Path) -> None:
    records = corpus_records(n_articles=9, n_domains=3)
    path = write_corpus_file(tmp_path / "c.jsonl", records)
    corpus = load_corpus(path)
    assert len(corpus) == 9
    art = corpus["a0004"]
    assert art.domain == "outlet1.com"
    assert art.title == "Headline 4"
    assert art.label is Leaning.CENTER
    assert corpus.ids() == [r["id"] for r in records]


def test_load_corpus_reports_bad_line_number(tmp_path: Path) -> None:
    path = tmp_path / "c.jsonl"
    lines = [json.dumps(r) for r in corpus_records(n_articles=3)]
    lines.insert(2, "{not json")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(MalformedRecord, match="line 3"):
        load_corpus(path)


def test_load_corpus_missing_key(tmp_path: Path) -> None:
    rec = corpus_records(n_articles=1)[0]
    del rec["body"]
    path = write_corpus_file(tmp_path / "c.jsonl", [rec])
    with pytest.raises(MalformedRecord, match="body"):
        load_corpus(path)


def test_load_corpus_duplicate_id(tmp_path: Path) -> None:
    rec = corpus_records(n_articles=1)[0]
    path = write_corpus_file(tmp_path / "c.jsonl", [rec, rec])
    with pytest.raises(DuplicateId):
        load_corpus(path)


def test_load_corpus_unknown_label(tmp_path: Path) -> None:
    rec = corpus_records(n_articles=1)[0]
    rec["label"] = "far-left"
    path = write_corpus_file(tmp_path / "c.jsonl", [rec])
    with pytest.raises(UnknownLabel):
        load_corpus(path)


def test_load_corpus_empty_file(tmp_path: Path) -> None:
    path = tmp_path / "c.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(EmptyCorpus):
        load_corpus(path)


def test_media_split_domains_disjoint() -> None:
    corpus = make_corpus(n_articles=200, n_domains=20)
    split = make_media_split(corpus, test_domain_fraction=0.2, seed=7)
    train_domains = {corpus[i].domain for i in split.train_ids}
    test_domains = {corpus[i].domain for i in split.test_ids}
    assert train_domains
    assert test_domains
    assert not train_domains & test_domains
    assert set(split.test_domains) == test_domains
    # every article lands on exactly one side
    assert sorted(split.train_ids + split.test_ids) == sorted(corpus.ids())


def test_media_split_domain_count_rounds_to_nearest() -> None:
    # 10 domains at fraction 0.07 rounds 0.7 up to a single held-out domain
    corpus = make_corpus(n_articles=50, n_domains=10)
    split = make_media_split(corpus, test_domain_fraction=0.07, seed=0)
    assert len(split.test_domains) == 1

    corpus = make_corpus(n_articles=200, n_domains=40)
    split = make_media_split(corpus, test_domain_fraction=0.07, seed=0)
    assert len(split.test_domains) == int(math.floor(40 * 0.07 + 0.5))


def test_media_split_needs_two_domains() -> None:
    corpus = make_corpus(n_articles=10, n_domains=1)
    with pytest.raises(TooFewDomains):
        make_media_split(corpus, test_domain_fraction=0.5, seed=0)


def test_media_split_deterministic() -> None:
    corpus = make_corpus(n_articles=120, n_domains=15)
    a = make_media_split(corpus, test_domain_fraction=0.2, seed=3)
    b = make_media_split(corpus, test_domain_fraction=0.2, seed=3)
    assert a == b
    c = make_media_split(corpus, test_domain_fraction=0.2, seed=4)
    assert a != c


def test_random_split_stratified_within_one() -> None:
    # uneven label mix: 40 left, 25 center, 10 right
    articles = (
        [make_article(i, "d0.com", "left") for i in range(40)]
        + [make_article(100 + i, "d1.com", "center") for i in range(25)]
        + [make_article(200 + i, "d2.com", "right") for i in range(10)]
    )
    corpus = Corpus(articles)
    split = make_random_split(corpus, test_fraction=0.3, seed=11)
    n = len(corpus)
    n_test = len(split.test_ids)
    assert n_test == int(math.floor(n * 0.3 + 0.5))
    test_counts = Counter(corpus[i].label for i in split.test_ids)
    totals = corpus.label_counts()
    for label, total in totals.items():
        expected = n_test * total / n
        assert abs(test_counts.get(label, 0) - expected) <= 1.0


def test_random_split_clamps_to_one_article() -> None:
    corpus = make_corpus(n_articles=100, n_domains=5)
    split = make_random_split(corpus, test_fraction=0.0001, seed=0)
    assert len(split.test_ids) == 1
    assert len(split.train_ids) == 99


def test_random_split_rejects_boundary_fractions() -> None:
    corpus = make_corpus(n_articles=10)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            make_random_split(corpus, test_fraction=bad, seed=0)


def test_split_serialization_round_trip(tmp_path: Path) -> None:
    corpus = make_corpus(n_articles=60, n_domains=12)
    split = make_media_split(corpus, test_domain_fraction=0.25, seed=5)
    path = tmp_path / "split.json"
    save_split(split, path)
    assert load_split(path) == split


def test_split_serialization_byte_identical(tmp_path: Path) -> None:
    corpus = make_corpus(n_articles=60, n_domains=12)
    p1, p2 = tmp_path / "s1.json", tmp_path / "s2.json"
    save_split(make_media_split(corpus, 0.25, seed=9), p1)
    save_split(make_media_split(corpus, 0.25, seed=9), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_validate_split_accepts_clean_split(tiny_corpus: Corpus) -> None:
    split = make_media_split(tiny_corpus, test_domain_fraction=0.3, seed=1)
    report = validate_split(split, tiny_corpus)
    assert report.ok
    assert not report.messages
    assert sum(report.train_label_counts.values()) == len(split.train_ids)


def test_validate_split_flags_overlap_and_leak(tiny_corpus: Corpus) -> None:
    split = make_media_split(tiny_corpus, test_domain_fraction=0.3, seed=1)
    tampered = SplitSpec(
        kind=split.kind,
        seed=split.seed,
        train_ids=split.train_ids + split.test_ids[:1],
        test_ids=split.test_ids,
        test_domains=split.test_domains,
    )
    report = validate_split(tampered, tiny_corpus)
    assert not report.ok
    assert report.overlap_ids == [split.test_ids[0]]
    assert report.leaked_domains  # the shared article drags its domain across


def test_validate_split_flags_missing_coverage(tiny_corpus: Corpus) -> None:
    split = make_random_split(tiny_corpus, test_fraction=0.2, seed=0)
    gutted = SplitSpec(kind="random", seed=0,
                       train_ids=split.train_ids[:-2], test_ids=split.test_ids)
    report = validate_split(gutted, tiny_corpus)
    assert not report.ok
    assert len(report.missing_ids) == 2
