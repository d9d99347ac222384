"""Per-community measures, rank percentiles and report output.

Missing values (empty denominators) are ``None`` all the way through and are
written as empty CSV cells; they are never coerced to zero.
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
from collections import defaultdict
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .credibility.scoring import Bucket, CredibilityScore
from .links import LinkCategory, TweetLinks

logger = logging.getLogger(__name__)

MEASURES = (
    "videos_pct",
    "videos_avg_likes",
    "low_cred_pct",
    "low_cred_avg_likes",
    "high_cred_pct",
    "high_cred_avg_likes",
    "pub_articles_pct",
    "pub_articles_avg_likes",
    "no_urls_pct",
    "no_urls_avg_likes",
    "internal_density",
    "comm_avg_likes",
    "median_followers",
    "users_avg_tweets",
)


def pct(num: int, den: int) -> float | None:
    return None if den == 0 else 100.0 * num / den


def _mean(values: Sequence[int]) -> float | None:
    return None if not values else sum(values) / len(values)


@dataclass(frozen=True)
class MeasureVector:
    videos_pct: float | None = None
    videos_avg_likes: float | None = None
    low_cred_pct: float | None = None
    low_cred_avg_likes: float | None = None
    high_cred_pct: float | None = None
    high_cred_avg_likes: float | None = None
    pub_articles_pct: float | None = None
    pub_articles_avg_likes: float | None = None
    no_urls_pct: float | None = None
    no_urls_avg_likes: float | None = None
    internal_density: float | None = None
    comm_avg_likes: float | None = None
    median_followers: float | None = None
    users_avg_tweets: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def internal_weights(g, labels: np.ndarray) -> tuple[dict[int, float], int]:
    """Intra-community edge weight per community with each pair clamped at 1.

    Returns the weights and the number of pairs that needed clamping.
    """
    same = labels[g.u] == labels[g.v]
    w = g.w[same]
    clamped = int((w > 1.0).sum())
    acc = np.bincount(labels[g.u][same], weights=np.minimum(w, 1.0), minlength=int(labels.max()) + 1 if len(labels) else 0)
    return {c: float(v) for c, v in enumerate(acc)}, clamped


def density(internal_weight: float, n: int) -> float:
    return 0.0 if n < 2 else 2.0 * internal_weight / (n * (n - 1))


def compute_measures(members: Sequence[str], links: Sequence[TweetLinks], scores: Mapping[str, CredibilityScore],
                     follower_counts: Mapping[str, int], internal_weight: float = 0.0) -> MeasureVector:
    """The 14 measures for one community.

    ``links`` are the categorised tweets authored by ``members``. Credibility
    measures count (tweet, web page) pairs whose page has a score; pages
    without a score are left out of the denominator.
    """
    by_cat: dict[LinkCategory, list[int]] = defaultdict(list)
    for tl in links:
        by_cat[tl.category].append(tl.tweet.like_count)
    n_link = sum(len(by_cat[c]) for c in (LinkCategory.PUBMED_DIRECT, LinkCategory.WEB_PAGE, LinkCategory.SOCIAL_MEDIA))

    cred_likes: dict[Bucket, list[int]] = defaultdict(list)
    n_scored = 0
    for tl in links:
        for url in tl.web_pages:
            s = scores.get(url)
            if s is None:
                continue
            n_scored += 1
            cred_likes[s.bucket].append(tl.tweet.like_count)

    followers = [follower_counts.get(u, 0) for u in members]
    return MeasureVector(
        videos_pct=pct(len(by_cat[LinkCategory.SOCIAL_MEDIA]), n_link),
        videos_avg_likes=_mean(by_cat[LinkCategory.SOCIAL_MEDIA]),
        low_cred_pct=pct(len(cred_likes[Bucket.LOW]), n_scored),
        low_cred_avg_likes=_mean(cred_likes[Bucket.LOW]),
        high_cred_pct=pct(len(cred_likes[Bucket.HIGH]), n_scored),
        high_cred_avg_likes=_mean(cred_likes[Bucket.HIGH]),
        pub_articles_pct=pct(len(by_cat[LinkCategory.PUBMED_DIRECT]), n_link),
        pub_articles_avg_likes=_mean(by_cat[LinkCategory.PUBMED_DIRECT]),
        no_urls_pct=pct(len(by_cat[LinkCategory.NO_URL]), len(links)),
        no_urls_avg_likes=_mean(by_cat[LinkCategory.NO_URL]),
        internal_density=density(internal_weight, len(members)) if members else None,
        comm_avg_likes=_mean([tl.tweet.like_count for tl in links]),
        median_followers=float(statistics.median(followers)) if followers else None,
        users_avg_tweets=len(links) / len(members) if members else None,
    )


def rank_percentiles(values: Sequence[float | None]) -> list[float | None]:
    """Ascending rank percentile ``(rank - 1) / (k - 1)`` over present values.

    Ties share their mean rank; a lone present value gets 0.5.
    """
    present = [i for i, v in enumerate(values) if v is not None]
    out: list[float | None] = [None] * len(values)
    k = len(present)
    if k == 0:
        return out
    if k == 1:
        out[present[0]] = 0.5
        return out
    ranks = rankdata([values[i] for i in present], method="average")
    for i, r in zip(present, ranks.tolist()):
        out[i] = (r - 1.0) / (k - 1)
    return out


@dataclass
class CommunityProfile:
    community_id: int
    user_count: int
    measures: MeasureVector
    percentiles: dict[str, float | None] = field(default_factory=dict)

    @property
    def deviations(self) -> dict[str, float | None]:
        return {m: (None if p is None else p - 0.5) for m, p in self.percentiles.items()}


def attach_percentiles(profiles: Sequence[CommunityProfile]) -> None:
    for name in MEASURES:
        ranked = rank_percentiles([getattr(p.measures, name) for p in profiles])
        for prof, value in zip(profiles, ranked):
            prof.percentiles[name] = value


def profile_communities(assignment: Mapping[str, int], links: Iterable[TweetLinks],
                        scores: Mapping[str, CredibilityScore], follower_counts: Mapping[str, int],
                        internal: Mapping[int, float] | None = None,
                        counters: dict | None = None) -> list[CommunityProfile]:
    """Measures and percentiles for every community in ``assignment`` (user -> id)."""
    counters = counters if counters is not None else {}
    internal = internal or {}
    members: dict[int, list[str]] = defaultdict(list)
    for user, c in sorted(assignment.items()):
        members[c].append(user)
    per_comm: dict[int, list[TweetLinks]] = defaultdict(list)
    unassigned = 0
    for tl in links:
        c = assignment.get(tl.tweet.user_id)
        if c is None:
            unassigned += 1
            continue
        per_comm[c].append(tl)
    counters["unassigned_tweets"] = unassigned
    profiles = [
        CommunityProfile(c, len(members[c]),
                         compute_measures(members[c], per_comm[c], scores, follower_counts, internal.get(c, 0.0)))
        for c in sorted(members)
    ]
    attach_percentiles(profiles)
    return profiles


def _cell(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def measures_header() -> list[str]:
    return (["community_id", "user_count"] + list(MEASURES)
            + [f"{m}_pctile" for m in MEASURES] + [f"{m}_dev" for m in MEASURES])


def write_measures_csv(path, profiles: Sequence[CommunityProfile]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(measures_header())
        for p in profiles:
            dev = p.deviations
            w.writerow(
                [p.community_id, p.user_count]
                + [_cell(getattr(p.measures, m)) for m in MEASURES]
                + [_cell(p.percentiles.get(m)) for m in MEASURES]
                + [_cell(dev.get(m)) for m in MEASURES]
            )


def read_measures_csv(path) -> list[CommunityProfile]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            val = {k: (float(v) if v != "" else None) for k, v in row.items() if k not in ("community_id", "user_count")}
            out.append(CommunityProfile(
                int(row["community_id"]), int(row["user_count"]),
                MeasureVector(**{m: val[m] for m in MEASURES}),
                {m: val[f"{m}_pctile"] for m in MEASURES},
            ))
    return out


def write_report_json(path, profiles: Sequence[CommunityProfile], metadata: Mapping) -> None:
    doc = {
        **metadata,
        "n_communities": len(profiles),
        "measures": list(MEASURES),
        "missing_counts": {m: sum(getattr(p.measures, m) is None for p in profiles) for m in MEASURES},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
