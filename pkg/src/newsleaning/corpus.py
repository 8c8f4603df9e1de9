"""Article corpus: loading, validation, and train/test splitting.

Articles carry a three-way leaning label (left=0, center=1, right=2) and the
web domain of the outlet that published them.  Two split strategies are
provided: a label-stratified random split, and a media split that holds out
whole domains so no outlet seen in training appears at test time.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateId,
    EmptyCorpus,
    MalformedRecord,
    TooFewDomains,
    UnknownLabel,
)
from .validation import check_fraction


class Leaning(enum.IntEnum):
    """Political leaning of an article, encoded on an ordinal scale."""

    LEFT = 0
    CENTER = 1
    RIGHT = 2

    @classmethod
    def from_string(cls, value: str) -> "Leaning":
        """Parse a label string, case-insensitively."""
        if not isinstance(value, str):
            raise UnknownLabel(f"label must be a string, got {value!r}")
        try:
            return cls[value.strip().upper()]
        except KeyError:
            raise UnknownLabel(
                f"unknown label {value!r}; expected one of left, center, right"
            ) from None


@dataclass(frozen=True)
class Article:
    """One news article with its outlet domain and leaning label."""

    id: str
    domain: str
    title: str
    body: str
    label: Leaning

    @property
    def text(self) -> str:
        """Full text used for representation: title and body."""
        return f"{self.title}\n{self.body}" if self.title else self.body


class Corpus:
    """Immutable collection of articles with id lookup.

    Construction rejects duplicate ids.  Iteration preserves input order so
    downstream artifacts are reproducible.
    """

    def __init__(self, articles):
        self._articles = tuple(articles)
        by_id: dict[str, Article] = {}
        for art in self._articles:
            if art.id in by_id:
                raise DuplicateId(f"duplicate article id {art.id!r}")
            by_id[art.id] = art
        self._by_id = by_id

    def __len__(self) -> int:
        return len(self._articles)

    def __iter__(self):
        return iter(self._articles)

    def __getitem__(self, article_id: str) -> Article:
        return self._by_id[article_id]

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._by_id

    @property
    def articles(self) -> tuple[Article, ...]:
        return self._articles

    def ids(self) -> list[str]:
        return [a.id for a in self._articles]

    @property
    def domains(self) -> list[str]:
        """Distinct outlet domains in sorted order."""
        return sorted({a.domain for a in self._articles})

    def label_counts(self) -> Counter:
        return Counter(a.label for a in self._articles)

    def subset(self, ids) -> "Corpus":
        return Corpus(self._by_id[i] for i in ids)


_REQUIRED_KEYS = ("id", "domain", "title", "body", "label")


def parse_record(obj: dict, lineno: int | None = None) -> Article:
    """Turn one decoded JSON object into an Article, validating every field."""
    where = f" (line {lineno})" if lineno is not None else ""
    if not isinstance(obj, dict):
        raise MalformedRecord(f"record is not an object{where}")
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise MalformedRecord(f"record missing keys {missing}{where}")
    art_id, domain = obj["id"], obj["domain"]
    if not isinstance(art_id, str) or not art_id:
        raise MalformedRecord(f"id must be a non-empty string{where}")
    if not isinstance(domain, str) or not domain:
        raise MalformedRecord(f"domain must be a non-empty string{where}")
    title, body = obj["title"], obj["body"]
    if not isinstance(title, str) or not isinstance(body, str):
        raise MalformedRecord(f"title and body must be strings{where}")
    return Article(id=art_id, domain=domain, title=title, body=body,
                   label=Leaning.from_string(obj["label"]))


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSON-lines corpus file.

    Raises MalformedRecord (with the offending line number), DuplicateId,
    UnknownLabel, or EmptyCorpus when the file holds no articles.
    """
    articles = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"invalid JSON on line {lineno}: {exc.msg}") from exc
            articles.append(parse_record(obj, lineno))
    if not articles:
        raise EmptyCorpus(f"no articles found in {path}")
    return Corpus(articles)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back out as JSON lines (one article per line)."""
    with open(path, "w", encoding="utf-8") as f:
        for a in corpus:
            record = {"id": a.id, "domain": a.domain, "title": a.title,
                      "body": a.body, "label": a.label.name.lower()}
            f.write(json.dumps(record, sort_keys=True) + "\n")


@dataclass(frozen=True)
class SplitSpec:
    """A concrete train/test partition of a corpus.

    ``test_domains`` is populated only for media splits, where it lists the
    domains held out entirely from training.
    """

    kind: str
    seed: int
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    test_domains: tuple[str, ...] = field(default_factory=tuple)

    @property
    def split_id(self) -> str:
        return f"{self.kind}-seed{self.seed}"

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "seed": self.seed,
            "train_ids": list(self.train_ids),
            "test_ids": list(self.test_ids),
            "test_domains": list(self.test_domains),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplitSpec":
        obj = json.loads(text)
        return cls(
            kind=obj["kind"],
            seed=int(obj["seed"]),
            train_ids=tuple(obj["train_ids"]),
            test_ids=tuple(obj["test_ids"]),
            test_domains=tuple(obj.get("test_domains", [])),
        )


def save_split(spec: SplitSpec, path: str | Path) -> None:
    Path(path).write_text(spec.to_json(), encoding="utf-8")


def load_split(path: str | Path) -> SplitSpec:
    return SplitSpec.from_json(Path(path).read_text(encoding="utf-8"))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def make_media_split(corpus: Corpus, test_domain_fraction: float = 0.07,
                     seed: int = 0) -> SplitSpec:
    """Hold out whole outlet domains for testing.

    The number of held-out domains is the fraction of distinct domains,
    rounded to the nearest integer with a floor of one (and a cap that keeps
    at least one training domain).  Held-out domains are drawn uniformly at
    random, articles follow their domain, so train and test share no outlet.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot split an empty corpus")
    check_fraction(test_domain_fraction, "test_domain_fraction")
    domains = corpus.domains
    if len(domains) < 2:
        raise TooFewDomains(
            f"media split needs at least 2 distinct domains, found {len(domains)}")
    n_test = _round_half_up(len(domains) * test_domain_fraction)
    n_test = min(max(n_test, 1), len(domains) - 1)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(domains))
    held_out = sorted(domains[i] for i in order[:n_test])
    held_set = set(held_out)
    train_ids = tuple(a.id for a in corpus if a.domain not in held_set)
    test_ids = tuple(a.id for a in corpus if a.domain in held_set)
    return SplitSpec(kind="media", seed=seed, train_ids=train_ids,
                     test_ids=test_ids, test_domains=tuple(held_out))


def make_random_split(corpus: Corpus, test_fraction: float = 0.2,
                      seed: int = 0) -> SplitSpec:
    """Label-stratified random split at the article level.

    The total test size is the requested fraction of the corpus rounded to
    the nearest article, clamped so both sides are non-empty.  Per-label test
    counts are apportioned by largest remainder, which keeps each label's
    share of the test set within one article of its share of the corpus.
    """
    n = len(corpus)
    if n == 0:
        raise EmptyCorpus("cannot split an empty corpus")
    check_fraction(test_fraction, "test_fraction")
    if n < 2:
        raise EmptyCorpus("need at least 2 articles to form a train/test split")
    n_test = min(max(_round_half_up(n * test_fraction), 1), n - 1)

    by_label: dict[Leaning, list[str]] = {}
    for a in corpus:
        by_label.setdefault(a.label, []).append(a.id)
    labels = sorted(by_label)

    quotas = {lab: n_test * len(by_label[lab]) / n for lab in labels}
    counts = {lab: int(math.floor(quotas[lab])) for lab in labels}
    shortfall = n_test - sum(counts.values())
    # Hand leftover slots to the largest fractional parts; ties break on label.
    order = sorted(labels, key=lambda lab: (counts[lab] - quotas[lab], lab))
    for lab in order[:shortfall]:
        counts[lab] += 1

    rng = np.random.default_rng(seed)
    test_set: set[str] = set()
    for lab in labels:
        ids = by_label[lab]
        perm = rng.permutation(len(ids))
        take = min(counts[lab], len(ids))
        test_set.update(ids[i] for i in perm[:take])
    train_ids = tuple(a.id for a in corpus if a.id not in test_set)
    test_ids = tuple(a.id for a in corpus if a.id in test_set)
    return SplitSpec(kind="random", seed=seed, train_ids=train_ids, test_ids=test_ids)


@dataclass
class SplitReport:
    """Outcome of validating a split against its corpus."""

    ok: bool
    overlap_ids: list[str]
    unknown_ids: list[str]
    missing_ids: list[str]
    leaked_domains: list[str]
    train_label_counts: dict[str, int]
    test_label_counts: dict[str, int]
    messages: list[str]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def validate_split(split: SplitSpec, corpus: Corpus) -> SplitReport:
    """Check coverage, disjointness, and (for media splits) domain leakage.

    Any violation is fatal: the report comes back with ``ok=False`` and a
    human-readable message per problem.
    """
    train, test = set(split.train_ids), set(split.test_ids)
    messages: list[str] = []

    overlap = sorted(train & test)
    if overlap:
        messages.append(f"{len(overlap)} ids appear in both train and test")
    known = set(corpus.ids())
    unknown = sorted((train | test) - known)
    if unknown:
        messages.append(f"{len(unknown)} split ids are not in the corpus")
    missing = sorted(known - (train | test))
    if missing:
        messages.append(f"{len(missing)} corpus ids are missing from the split")

    leaked: list[str] = []
    if split.kind == "media":
        train_domains = {corpus[i].domain for i in train if i in corpus}
        test_domains = {corpus[i].domain for i in test if i in corpus}
        leaked = sorted(train_domains & test_domains)
        if leaked:
            messages.append(f"{len(leaked)} domains leak across the media split")
        declared = set(split.test_domains)
        if declared and declared != test_domains:
            messages.append("declared test_domains disagree with test article domains")

    def label_counts(ids):
        ctr = Counter(corpus[i].label.name.lower() for i in ids if i in corpus)
        return {k: ctr.get(k, 0) for k in ("left", "center", "right")}

    return SplitReport(
        ok=not messages,
        overlap_ids=overlap,
        unknown_ids=unknown,
        missing_ids=missing,
        leaked_domains=leaked,
        train_label_counts=label_counts(split.train_ids),
        test_label_counts=label_counts(split.test_ids),
        messages=messages,
    )
