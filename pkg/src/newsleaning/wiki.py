"""Encyclopedia pages for news outlets: resolution, fetching, caching.

Every corpus domain resolves to at most one page.  Resolution consults a
manual overrides map first and falls back to search; domains without a page
are recorded as not-found so the cache can answer "this outlet has no page"
without touching the network again.  The cache is a directory of JSON files,
one per domain, written atomically so concurrent fetchers never expose a
half-written entry.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import time
import urllib.parse
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import CacheMiss, MalformedRecord, NetworkError, PageGone
from .corpus import Article, Corpus

WIKIPEDIA_API = "https://en.wikipedia.org/w/api.php"


def normalize_domain(domain: str) -> str:
    return domain.strip().lower()


@dataclass(frozen=True)
class WikiDoc:
    """Cached page for one outlet domain.

    ``found=False`` means the domain is known to have no page (body empty);
    it is different from the domain never having been looked up at all.
    """

    domain: str
    title: str
    body: str
    fetched_at: float
    found: bool

    def __post_init__(self):
        if self.found and not self.body:
            raise MalformedRecord(
                f"found page for {self.domain!r} must have a non-empty body")
        if not self.found and self.body:
            raise MalformedRecord(
                f"not-found entry for {self.domain!r} must have an empty body")

    @property
    def text(self) -> str:
        """Title and body when the page exists, empty string otherwise."""
        return f"{self.title}\n{self.body}" if self.found else ""


class WikiCache:
    """Directory-backed map from domain to WikiDoc, one JSON file each."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, domain: str) -> Path:
        encoded = urllib.parse.quote(normalize_domain(domain), safe="")
        return self.directory / f"{encoded}.json"

    def has(self, domain: str) -> bool:
        return self._path(domain).exists()

    def get(self, domain: str) -> WikiDoc | None:
        path = self._path(domain)
        if not path.exists():
            return None
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
            return WikiDoc(**obj)
        except (json.JSONDecodeError, TypeError) as exc:
            raise MalformedRecord(f"corrupt cache entry {path}: {exc}") from exc

    def put(self, doc: WikiDoc) -> None:
        # write-temp-then-rename keeps readers away from partial files
        path = self._path(doc.domain)
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(json.dumps(asdict(doc), sort_keys=True, indent=2) + "\n")
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    def domains(self) -> list[str]:
        out = []
        for path in self.directory.glob("*.json"):
            out.append(urllib.parse.unquote(path.stem))
        return sorted(out)

    def missing(self, domains) -> list[str]:
        return sorted(d for d in {normalize_domain(d) for d in domains}
                      if not self.has(d))


class LiveWikipediaClient:
    """Talks to the live encyclopedia API with retries and a rate limit.

    ``fetch_count`` counts HTTP requests so tests (and the ingest report)
    can observe that a warm cache needs zero network calls.
    """

    def __init__(self, session=None, api_url: str = WIKIPEDIA_API,
                 max_retries: int = 3, backoff: float = 0.5,
                 min_interval: float = 0.1, timeout: float = 20.0):
        if session is None:
            import requests

            session = requests.Session()
        self.session = session
        self.api_url = api_url
        self.max_retries = max_retries
        self.backoff = backoff
        self.min_interval = min_interval
        self.timeout = timeout
        self.fetch_count = 0
        self._lock = threading.Lock()
        self._last_request = 0.0

    def _request(self, params: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            with self._lock:
                wait = self.min_interval - (time.monotonic() - self._last_request)
                if wait > 0:
                    time.sleep(wait)
                self._last_request = time.monotonic()
                self.fetch_count += 1
            try:
                response = self.session.get(
                    self.api_url, params={**params, "format": "json"},
                    timeout=self.timeout)
                if response.status_code >= 500:
                    raise NetworkError(f"server error {response.status_code}")
                response.raise_for_status()
                return response.json()
            except NetworkError as exc:
                last_error = exc
            except Exception as exc:
                last_error = exc
            time.sleep(self.backoff * (2 ** attempt))
        raise NetworkError(
            f"request failed after {self.max_retries} attempts: {last_error}")

    def search_title(self, domain: str) -> str | None:
        """Best-effort page title for a domain; None when search finds nothing."""
        for query in (domain, domain.rsplit(".", 1)[0]):
            data = self._request({
                "action": "query", "list": "search", "srsearch": query,
                "srlimit": 1,
            })
            hits = data.get("query", {}).get("search", [])
            if hits:
                return hits[0]["title"]
        return None

    def fetch_page(self, title: str) -> tuple[str, str]:
        """Plain-text title and body; PageGone when the page does not exist."""
        data = self._request({
            "action": "query", "prop": "extracts", "explaintext": 1,
            "redirects": 1, "titles": title,
        })
        pages = data.get("query", {}).get("pages", {})
        for page in pages.values():
            if "missing" in page:
                raise PageGone(f"page {title!r} is missing")
            body = (page.get("extract") or "").strip()
            if not body:
                raise PageGone(f"page {title!r} has no extractable text")
            return page.get("title", title), body
        raise PageGone(f"no page data returned for {title!r}")


class FixtureWikipediaClient:
    """Offline stand-in reading pages from a local fixture directory.

    Layout: ``index.json`` maps domain to page title; each page lives in
    ``<percent-encoded title>.json`` with keys title and body (or
    ``{"gone": true}`` for a deleted page).
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.fetch_count = 0
        index_path = self.directory / "index.json"
        self._index: dict[str, str] = {}
        if index_path.exists():
            raw = json.loads(index_path.read_text(encoding="utf-8"))
            self._index = {normalize_domain(k): v for k, v in raw.items()}

    def search_title(self, domain: str) -> str | None:
        self.fetch_count += 1
        return self._index.get(normalize_domain(domain))

    def fetch_page(self, title: str) -> tuple[str, str]:
        self.fetch_count += 1
        path = self.directory / f"{urllib.parse.quote(title, safe='')}.json"
        if not path.exists():
            raise PageGone(f"fixture has no page {title!r}")
        obj = json.loads(path.read_text(encoding="utf-8"))
        if obj.get("gone"):
            raise PageGone(f"fixture page {title!r} is marked deleted")
        return obj["title"], obj["body"]


def map_domain_to_wiki(domain: str, overrides: dict[str, str] | None = None,
                       client=None) -> str | None:
    """Resolve a domain to a page title; None stands for not-found."""
    domain = normalize_domain(domain)
    overrides = overrides or {}
    if domain in overrides:
        return overrides[domain]
    if client is None:
        return None
    return client.search_title(domain)


def fetch_wiki_doc(domain: str, title: str | None, client,
                   cache: WikiCache) -> WikiDoc:
    """Fetch (or reuse) the cache entry for one domain.

    A cached entry short-circuits the client entirely.  A vanished or
    unresolvable page is recorded as a not-found entry; the entry is written
    to the cache before it is returned.
    """
    domain = normalize_domain(domain)
    cached = cache.get(domain)
    if cached is not None:
        return cached
    if title is None:
        doc = WikiDoc(domain=domain, title="", body="",
                      fetched_at=time.time(), found=False)
    else:
        try:
            fetched_title, body = client.fetch_page(title)
            doc = WikiDoc(domain=domain, title=fetched_title, body=body,
                          fetched_at=time.time(), found=True)
        except PageGone:
            doc = WikiDoc(domain=domain, title=title, body="",
                          fetched_at=time.time(), found=False)
    cache.put(doc)
    return doc


@dataclass
class IngestReport:
    """Counts from one ingestion run."""

    total_domains: int
    already_cached: int
    resolved: int
    not_found: int

    @property
    def newly_fetched(self) -> int:
        return self.resolved + self.not_found


def ingest_wiki(corpus: Corpus, cache: WikiCache, client,
                overrides: dict[str, str] | None = None,
                max_workers: int = 1) -> IngestReport:
    """Ensure every corpus domain has a cache entry (found or not-found)."""
    domains = [normalize_domain(d) for d in corpus.domains]
    missing = cache.missing(domains)
    already = len(domains) - len(missing)
    overrides = {normalize_domain(k): v for k, v in (overrides or {}).items()}

    def ingest_one(domain: str) -> bool:
        title = map_domain_to_wiki(domain, overrides, client)
        doc = fetch_wiki_doc(domain, title, client, cache)
        return doc.found

    if max_workers > 1 and len(missing) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(ingest_one, missing))
    else:
        outcomes = [ingest_one(d) for d in missing]
    resolved = sum(outcomes)
    return IngestReport(total_domains=len(domains), already_cached=already,
                        resolved=resolved, not_found=len(missing) - resolved)


def load_overrides(path: str | Path) -> dict[str, str]:
    """Read the domain-to-title overrides map from a JSON file."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in obj.items()):
        raise MalformedRecord(f"overrides file {path} must map strings to strings")
    return {normalize_domain(k): v for k, v in obj.items()}


def wiki_text_for_article(article: Article, cache: WikiCache) -> str:
    """Page text for an article's outlet; raises CacheMiss if never resolved."""
    doc = cache.get(article.domain)
    if doc is None:
        raise CacheMiss(
            f"domain {article.domain!r} has no cache entry; run ingestion first")
    return doc.text
