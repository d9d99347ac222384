"""Tweet link categories and web-page eligibility filtering.

Categories:

1. direct link to a PubMed article
2. link to an ordinary web page (news, blogs, Reddit, Wikipedia, ...)
3. link to a social-media post (Facebook, YouTube, Instagram, ...)
4. no link at all

A tweet with several links takes the lowest-numbered category among them.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol
from urllib.parse import urlsplit, urlunsplit

from .ingest import Tweet, WebPage

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)

MIN_PAGE_WORDS = 300


class LinkCategory(IntEnum):
    PUBMED_DIRECT = 1
    WEB_PAGE = 2
    SOCIAL_MEDIA = 3
    NO_URL = 4


def canonical_url(url: str) -> str:
    """Lower-case scheme and host, drop ``www.``, fragment and trailing slash."""
    url = url.strip()
    parts = urlsplit(url if "://" in url else "http://" + url)
    host = (parts.hostname or "").lower()
    if host.startswith("www."):
        host = host[4:]
    if parts.port:
        host = f"{host}:{parts.port}"
    path = parts.path.rstrip("/")
    return urlunsplit((parts.scheme.lower() or "http", host, path, parts.query, ""))


@dataclass(frozen=True)
class DomainConfig:
    pubmed_hosts: tuple[str, ...]
    social_hosts: tuple[str, ...]

    @staticmethod
    def _matches(host: str, path: str, pattern: str) -> bool:
        p_host, _, p_path = pattern.lower().partition("/")
        if p_host.startswith("www."):
            p_host = p_host[4:]
        if host != p_host and not host.endswith("." + p_host):
            return False
        if not p_path:
            return True
        path = path.lower().strip("/")
        return path == p_path or path.startswith(p_path + "/")

    def classify(self, url: str) -> LinkCategory:
        parts = urlsplit(canonical_url(url))
        host, path = parts.hostname or "", parts.path
        if any(self._matches(host, path, p) for p in self.pubmed_hosts):
            return LinkCategory.PUBMED_DIRECT
        if any(self._matches(host, path, p) for p in self.social_hosts):
            return LinkCategory.SOCIAL_MEDIA
        return LinkCategory.WEB_PAGE


def load_domains(path=None) -> DomainConfig:
    if path is None:
        raw = resources.files("vaxcomm").joinpath("domains.toml").read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    doc = tomllib.loads(raw)
    try:
        return DomainConfig(tuple(doc["pubmed_hosts"]), tuple(doc["social_hosts"]))
    except KeyError as exc:
        raise ValueError(f"domain config missing key {exc}") from exc


# resolver -------------------------------------------------------------------

@dataclass(frozen=True)
class ResolverRecord:
    short_url: str
    expanded_url: str
    links_to_pubmed: bool = False
    unknown: bool = False


class Resolver(Protocol):
    def lookup(self, url: str) -> ResolverRecord | None: ...


class FixtureResolver:
    """Offline URL expansion and PubMed-linkage lookup backed by a JSONL file."""

    def __init__(self, records: Iterable[ResolverRecord] = ()):
        self._table = {canonical_url(r.short_url): r for r in records}

    @classmethod
    def from_jsonl(cls, path) -> "FixtureResolver":
        records = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                obj = json.loads(raw)
                try:
                    records.append(ResolverRecord(
                        short_url=obj["short_url"],
                        expanded_url=obj.get("expanded_url") or obj["short_url"],
                        links_to_pubmed=bool(obj.get("links_to_pubmed", False)),
                    ))
                except KeyError as exc:
                    raise ValueError(f"{path}:{lineno}: missing {exc}") from exc
        return cls(records)

    def lookup(self, url: str) -> ResolverRecord | None:
        return self._table.get(canonical_url(url))

    def __len__(self) -> int:
        return len(self._table)


def resolve_url(url: str, resolver: Resolver | None) -> ResolverRecord:
    """Expand ``url``; a miss is returned unchanged with ``unknown=True``."""
    hit = resolver.lookup(url) if resolver is not None else None
    if hit is None:
        return ResolverRecord(url, url, False, True)
    return hit


# categorisation ---------------------------------------------------------------

@dataclass(frozen=True)
class TweetLinks:
    """Category of one tweet plus the expanded web-page URLs it carries."""

    tweet: Tweet
    category: LinkCategory
    web_pages: tuple[str, ...] = ()
    links_to_pubmed: bool = False
    unresolved: int = 0


def categorize_links(t: Tweet, resolver: Resolver | None, domains: DomainConfig) -> TweetLinks:
    if not t.urls:
        return TweetLinks(t, LinkCategory.NO_URL)
    cats = []
    pages = []
    pubmed_flag = False
    unresolved = 0
    for url in t.urls:
        rec = resolve_url(url, resolver)
        unresolved += rec.unknown
        cat = domains.classify(rec.expanded_url)
        cats.append(cat)
        if cat is LinkCategory.WEB_PAGE:
            pages.append(canonical_url(rec.expanded_url))
            pubmed_flag = pubmed_flag or rec.links_to_pubmed
    return TweetLinks(t, min(cats), tuple(pages), pubmed_flag, unresolved)


def categorize_tweet(t: Tweet, resolver: Resolver | None, domains: DomainConfig) -> LinkCategory:
    return categorize_links(t, resolver, domains).category


def categorize_corpus(tweets: Iterable[Tweet], resolver: Resolver | None,
                      domains: DomainConfig) -> tuple[list[TweetLinks], Counter]:
    out = [categorize_links(t, resolver, domains) for t in tweets]
    counts = Counter(tl.category.name for tl in out)
    counts["urls_without_fixture"] = sum(tl.unresolved for tl in out)
    counts["web_pages_linking_pubmed"] = sum(tl.links_to_pubmed for tl in out)
    return out, counts


def write_categories_csv(path, links: Iterable[TweetLinks]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tweet_id", "user_id", "category", "like_count", "links_to_pubmed", "web_pages"])
        for tl in links:
            w.writerow([tl.tweet.tweet_id, tl.tweet.user_id, int(tl.category), tl.tweet.like_count,
                        int(tl.links_to_pubmed), " ".join(tl.web_pages)])


# page filtering -------------------------------------------------------------

def page_rejection(page: WebPage) -> str | None:
    if not page.available:
        return "unavailable"
    if page.lang.lower() != "en":
        return "non_english"
    if page.word_count < MIN_PAGE_WORDS:
        return "too_short"
    return None


def filter_pages(pages: Iterable[WebPage], report: Counter | None = None) -> list[WebPage]:
    """Keep available English pages of at least 300 words.

    Removed pages are counted in ``report`` under the first failing reason
    (availability, then language, then length).
    """
    report = report if report is not None else Counter()
    kept = []
    for page in pages:
        reason = page_rejection(page)
        if reason is None:
            kept.append(page)
        else:
            report[reason] += 1
    report["kept"] = len(kept)
    return kept
