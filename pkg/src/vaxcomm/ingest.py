"""File loaders for follower edges, tweets, web pages and expert labels.

Loaders never abort on a single bad record: malformed lines are skipped and
counted in a :class:`LoadStats` object that callers can report.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

logger = logging.getLogger(__name__)

N_CRITERIA = 7
CRITERIA_COLUMNS = tuple(f"c{i}" for i in range(1, N_CRITERIA + 1))

_TAG_RE = re.compile(r"<[^>]*>")


class ValidationError(ValueError):
    """Raised when an input file violates a hard schema rule."""


@dataclass(frozen=True)
class Tweet:
    tweet_id: str
    user_id: str
    text: str
    urls: tuple[str, ...] = ()
    like_count: int = 0
    is_retweet: bool = False
    lang: str = "en"


@dataclass(frozen=True)
class FollowerEdge:
    from_user: str
    to_user: str


@dataclass(frozen=True)
class WebPage:
    url: str
    content: str
    word_count: int
    lang: str
    available: bool


@dataclass(frozen=True)
class LabeledPage:
    url: str
    criteria: tuple[int, ...]

    @property
    def score(self) -> int:
        return sum(self.criteria)


@dataclass
class LoadStats:
    """Per-file counters; ``counts`` keys depend on the loader."""

    path: str
    lines: int = 0
    loaded: int = 0
    counts: Counter = field(default_factory=Counter)

    def as_dict(self) -> dict:
        return {"path": self.path, "lines": self.lines, "loaded": self.loaded, **dict(sorted(self.counts.items()))}


def strip_html(text: str) -> str:
    return _TAG_RE.sub(" ", text)


def count_words(text: str) -> int:
    return len(strip_html(text).split())


def _open_text(path):
    path = Path(path)
    try:
        return path.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def _parse_tweet(obj: dict) -> Tweet:
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    tweet_id = obj["tweet_id"]
    user_id = obj["user_id"]
    if tweet_id in (None, "") or user_id in (None, ""):
        raise ValueError("empty id")
    urls = obj.get("urls") or []
    if not isinstance(urls, list):
        raise ValueError("urls is not a list")
    urls = tuple(str(u).strip() for u in urls if u is not None and str(u).strip())
    likes = obj.get("like_count", 0)
    if likes is None:
        likes = 0
    if isinstance(likes, bool) or int(likes) != likes or likes < 0:
        raise ValueError(f"bad like_count {likes!r}")
    return Tweet(
        tweet_id=str(tweet_id),
        user_id=str(user_id),
        text=str(obj.get("text") or ""),
        urls=urls,
        like_count=int(likes),
        is_retweet=bool(obj.get("is_retweet", False)),
        lang=str(obj.get("lang") or ""),
    )


def iter_tweets(path, stats: LoadStats | None = None) -> Iterator[Tweet]:
    """Stream English tweets from a JSONL file.

    Non-English lines, lines without a ``lang`` tag and malformed lines are
    skipped and counted under ``non_english``, ``no_lang`` and ``malformed``.
    Duplicate ids are *not* resolved here; see :func:`load_tweets`.
    """
    stats = stats if stats is not None else LoadStats(str(path))
    with _open_text(path) as fh:
        for raw in fh:
            if not raw.strip():
                continue
            stats.lines += 1
            try:
                tweet = _parse_tweet(json.loads(raw))
            except (ValueError, KeyError, TypeError):
                stats.counts["malformed"] += 1
                continue
            if not tweet.lang:
                stats.counts["no_lang"] += 1
                continue
            if tweet.lang.lower() != "en":
                stats.counts["non_english"] += 1
                continue
            stats.loaded += 1
            yield tweet


def load_tweets(path, stats: LoadStats | None = None) -> list[Tweet]:
    """Load English tweets; for a repeated ``tweet_id`` the last record wins.

    The record keeps the position of its first occurrence so output order is
    stable. Replaced records are counted under ``duplicate_id``.
    """
    stats = stats if stats is not None else LoadStats(str(path))
    by_id: dict[str, Tweet] = {}
    for tweet in iter_tweets(path, stats):
        if tweet.tweet_id in by_id:
            stats.counts["duplicate_id"] += 1
        by_id[tweet.tweet_id] = tweet
    stats.loaded = len(by_id)
    if stats.counts:
        logger.info("tweets %s: %s", path, stats.as_dict())
    return list(by_id.values())


def load_followers(path, stats: LoadStats | None = None) -> list[FollowerEdge]:
    stats = stats if stats is not None else LoadStats(str(path))
    seen: set[tuple[str, str]] = set()
    edges: list[FollowerEdge] = []
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return edges
        header = [h.strip() for h in header]
        if header[:2] != ["from_user", "to_user"]:
            raise ValidationError(f"{path}: expected header from_user,to_user, got {header}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            stats.lines += 1
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                stats.counts["malformed"] += 1
                continue
            a, b = row[0].strip(), row[1].strip()
            if a == b:
                stats.counts["self_follow"] += 1
                continue
            if (a, b) in seen:
                stats.counts["duplicate"] += 1
                continue
            seen.add((a, b))
            edges.append(FollowerEdge(a, b))
    stats.loaded = len(edges)
    if stats.counts.get("self_follow"):
        logger.warning("%s: dropped %d self-follow rows", path, stats.counts["self_follow"])
    return edges


def load_pages(path, stats: LoadStats | None = None) -> list[WebPage]:
    """Load pre-fetched page contents. Unavailable pages carry empty content."""
    stats = stats if stats is not None else LoadStats(str(path))
    pages: dict[str, WebPage] = {}
    with _open_text(path) as fh:
        for raw in fh:
            if not raw.strip():
                continue
            stats.lines += 1
            try:
                obj = json.loads(raw)
                url = str(obj["url"]).strip()
                if not url:
                    raise ValueError("empty url")
                available = bool(obj.get("available", True))
                content = str(obj.get("content") or "") if available else ""
            except (ValueError, KeyError, TypeError, AttributeError):
                stats.counts["malformed"] += 1
                continue
            if url in pages:
                stats.counts["duplicate_url"] += 1
            text = strip_html(content)
            pages[url] = WebPage(
                url=url,
                content=text,
                word_count=len(text.split()),
                lang=str(obj.get("lang") or ""),
                available=available,
            )
    stats.loaded = len(pages)
    return list(pages.values())


def load_labeled_pages(path) -> list[LabeledPage]:
    """Load expert criterion labels.

    Raises :class:`ValidationError` naming the row and column for any cell
    that is not exactly ``0`` or ``1``.
    """
    out: list[LabeledPage] = []
    with _open_text(path) as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("url", *CRITERIA_COLUMNS) if c not in (reader.fieldnames or [])]
        if missing:
            raise ValidationError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            url = (row["url"] or "").strip()
            if not url:
                raise ValidationError(f"{path}: row {lineno}: empty url")
            values = []
            for col in CRITERIA_COLUMNS:
                cell = (row[col] or "").strip()
                if cell not in ("0", "1"):
                    raise ValidationError(f"{path}: row {lineno}, column {col}: expected 0 or 1, got {cell!r}")
                values.append(int(cell))
            out.append(LabeledPage(url, tuple(values)))
    return out
