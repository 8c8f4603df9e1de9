"""Synthetic benchmark data with controllable domain and topic signal.

The generator builds a corpus whose labels can be predicted two ways:

* Domain marker tokens: unique per outlet, strongly label-correlated inside
  a domain, useless on held-out domains.  They reward outlet memorization,
  which is exactly the failure mode media splits expose.
* Issue tokens: shared across outlets of one leaning but injected with
  noise, so article text alone carries only a weak transferable signal.

Outlet pages and debate speeches are built from the same leaning-aligned
vocabularies, minus the markers: a page describes its outlet with leaning
descriptor tokens shared across domains, and debates use the issue tokens.
Knowledge infusion therefore adds signal that does transfer to unseen
outlets, which is the effect the trend benchmarks measure.
"""

from __future__ import annotations

import argparse
import json
import urllib.parse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Article, Corpus, Leaning, save_corpus
from .topics import DebateSpeech, Party
from .wiki import WikiCache, WikiDoc

N_CLASSES = 3
_ISSUES_PER_LEANING = 8
_MARKERS_PER_DOMAIN = 4
_DESCRIPTORS_PER_LEANING = 6


def issue_tokens(leaning: int) -> list[str]:
    return [f"issue{leaning}w{k}" for k in range(_ISSUES_PER_LEANING)]


def marker_tokens(domain_index: int) -> list[str]:
    return [f"dom{domain_index}m{k}" for k in range(_MARKERS_PER_DOMAIN)]


def descriptor_tokens(leaning: int) -> list[str]:
    return [f"desc{leaning}d{k}" for k in range(_DESCRIPTORS_PER_LEANING)]


@dataclass
class SyntheticBenchmark:
    """A generated corpus with its knowledge resources."""

    corpus: Corpus
    wiki_pages: dict[str, tuple[str, str]]  # domain -> (title, body)
    debates: list[DebateSpeech]
    domain_leanings: dict[str, Leaning]


def generate_benchmark(n_articles: int = 600, n_domains: int = 30,
                       seed: int = 0, topic_noise: float = 0.3,
                       wiki_coverage: float = 0.8,
                       n_speeches_per_party: int = 60) -> SyntheticBenchmark:
    """Build one benchmark instance deterministically from the seed."""
    if n_domains < N_CLASSES:
        raise ValueError(f"need at least {N_CLASSES} domains, got {n_domains}")
    rng = np.random.default_rng(seed)

    domains = [f"outlet{d}.example" for d in range(n_domains)]
    domain_leanings = {domains[d]: Leaning(d % N_CLASSES)
                       for d in range(n_domains)}
    filler = [f"fill{k}" for k in range(20)]

    articles = []
    for i in range(n_articles):
        d = i % n_domains
        domain = domains[d]
        leaning = domain_leanings[domain]
        # the visible topic signal is noisy on purpose
        if rng.random() < topic_noise:
            topic_leaning = int(rng.integers(0, N_CLASSES))
        else:
            topic_leaning = int(leaning)
        markers = list(rng.choice(marker_tokens(d), size=5))
        issues = list(rng.choice(issue_tokens(topic_leaning), size=3))
        noise_words = list(rng.choice(filler, size=6))
        words = markers + issues + noise_words
        rng.shuffle(words)
        title_words = [f"report{i}", str(rng.choice(marker_tokens(d)))]
        articles.append(Article(
            id=f"a{i:05d}", domain=domain,
            title=" ".join(title_words), body=" ".join(words),
            label=leaning))
    corpus = Corpus(articles)

    # outlet pages: leaning descriptors shared across domains, no markers
    wiki_fill = [f"wfill{k}" for k in range(8)]
    with_page = rng.random(n_domains) < wiki_coverage
    wiki_pages: dict[str, tuple[str, str]] = {}
    for d in range(n_domains):
        if not with_page[d]:
            continue
        domain = domains[d]
        leaning = int(domain_leanings[domain])
        words = list(rng.choice(descriptor_tokens(leaning), size=6))
        words += list(rng.choice(wiki_fill, size=4))
        rng.shuffle(words)
        wiki_pages[domain] = (f"Outlet {d}", " ".join(words))

    # debates: issue vocabulary only; each party leans on its side plus center
    say = [f"say{k}" for k in range(10)]
    debates = []
    sides = {Party.DEMOCRAT: (0, 1), Party.REPUBLICAN: (2, 1)}
    speech_no = 0
    for party, (main, secondary) in sides.items():
        for _ in range(n_speeches_per_party):
            bucket = main if rng.random() < 0.7 else secondary
            words = list(rng.choice(issue_tokens(bucket), size=8))
            words += list(rng.choice(say, size=4))
            rng.shuffle(words)
            debates.append(DebateSpeech(
                id=f"s{speech_no:04d}", speaker=f"speaker{speech_no % 7}",
                party=party, text=" ".join(words)))
            speech_no += 1

    return SyntheticBenchmark(corpus=corpus, wiki_pages=wiki_pages,
                              debates=debates, domain_leanings=domain_leanings)


def populate_wiki_cache(benchmark: SyntheticBenchmark,
                        cache_dir: str | Path) -> WikiCache:
    """Write the benchmark's pages straight into a cache directory."""
    cache = WikiCache(cache_dir)
    for domain in benchmark.corpus.domains:
        page = benchmark.wiki_pages.get(domain)
        if page is None:
            doc = WikiDoc(domain=domain, title="", body="", fetched_at=0.0,
                          found=False)
        else:
            doc = WikiDoc(domain=domain, title=page[0], body=page[1],
                          fetched_at=0.0, found=True)
        cache.put(doc)
    return cache


def write_benchmark(benchmark: SyntheticBenchmark,
                    out_dir: str | Path) -> dict[str, Path]:
    """Write corpus, debates, and page fixtures as the CLI expects them.

    Returns the paths keyed by artifact name: corpus, debates, fixtures,
    overrides.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.jsonl"
    save_corpus(benchmark.corpus, corpus_path)

    debates_path = out / "debates.jsonl"
    with open(debates_path, "w", encoding="utf-8") as f:
        for s in benchmark.debates:
            f.write(json.dumps({"id": s.id, "speaker": s.speaker,
                                "party": s.party.value, "text": s.text}) + "\n")

    fixtures = out / "wiki_fixtures"
    fixtures.mkdir(exist_ok=True)
    index = {domain: title for domain, (title, _body) in benchmark.wiki_pages.items()}
    (fixtures / "index.json").write_text(json.dumps(index, sort_keys=True, indent=2),
                                         encoding="utf-8")
    for domain, (title, body) in benchmark.wiki_pages.items():
        name = urllib.parse.quote(title, safe="") + ".json"
        (fixtures / name).write_text(json.dumps({"title": title, "body": body}),
                                     encoding="utf-8")

    overrides_path = out / "overrides.json"
    overrides_path.write_text(json.dumps(index, sort_keys=True, indent=2),
                              encoding="utf-8")
    return {"corpus": corpus_path, "debates": debates_path,
            "fixtures": fixtures, "overrides": overrides_path}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate a synthetic benchmark dataset")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--articles", type=int, default=600)
    parser.add_argument("--domains", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    benchmark = generate_benchmark(n_articles=args.articles,
                                   n_domains=args.domains, seed=args.seed)
    paths = write_benchmark(benchmark, args.out)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
