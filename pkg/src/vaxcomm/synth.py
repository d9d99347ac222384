"""Synthetic follower graphs and tweet/page corpora with known ground truth.

Everything here is a pure function of its spec (seed included). In quota
mode categories and credibility buckets are allocated by exact counts, so
the planted percentages can be compared for equality downstream.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .community.partition import Partition
from .credibility.scoring import Bucket, bucket
from .ingest import CRITERIA_COLUMNS, N_CRITERIA, FollowerEdge, Tweet
from .measures import pct

CATEGORY_NAMES = ("cat1", "cat2", "cat3", "cat4")
BUCKET_NAMES = ("low", "medium", "high")

DEFAULT_KEYWORDS: tuple[tuple[str, ...], ...] = (
    ("peerreviewed", "cohort", "randomised", "methodology"),
    ("evidence", "dataset", "participants", "findings"),
    ("limitations", "uncertainty", "caveat", "confounding"),
    ("proportionate", "measured", "cautious", "balanced"),
    ("immunisation", "schedule", "dose", "antigen"),
    ("plainly", "simply", "explained", "everyday"),
    ("funded", "sponsor", "grant", "disclosure"),
)

FILLER = (
    "the a of and to in for on with as at by from that this it is was were be are has have had "
    "people health public news report said says week today local city state family children parents "
    "doctor clinic school community story time year month day more most some many other about after "
    "before during also just like new first last one two three several people's view question answer "
    "online post share comment reader editor article page site issue topic policy change event plan"
).split()

SOCIAL_URLS = (
    "https://www.youtube.com/watch?v={}",
    "https://www.facebook.com/posts/{}",
    "https://www.instagram.com/p/{}",
)


# graph ----------------------------------------------------------------------

@dataclass(frozen=True)
class PlantedPartitionSpec:
    n: int = 400
    k: int = 4
    p_in: float = 0.3
    p_out: float = 0.005
    seed: int = 0
    sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0 <= self.p_out <= self.p_in <= 1:
            raise ValueError("need 0 <= p_out <= p_in <= 1")
        if self.k < 1 or self.n < self.k:
            raise ValueError("need 1 <= k <= n")
        if self.sizes is not None:
            if len(self.sizes) != self.k or sum(self.sizes) != self.n or min(self.sizes) < 1:
                raise ValueError("sizes must be k positive integers summing to n")

    def block_sizes(self) -> list[int]:
        if self.sizes is not None:
            return list(self.sizes)
        base, extra = divmod(self.n, self.k)
        return [base + (1 if b < extra else 0) for b in range(self.k)]


@dataclass
class PlantedGraph:
    edges: list[FollowerEdge]
    users: list[str]
    blocks: list[int]

    @property
    def truth(self) -> dict[str, int]:
        return dict(zip(self.users, self.blocks))

    def partition(self, nodes: Sequence[str]) -> Partition:
        return Partition.from_mapping(nodes, self.truth)


def user_id(i: int, n: int) -> str:
    return f"u{i:0{max(4, len(str(n)))}d}"


def gen_graph(spec: PlantedPartitionSpec) -> PlantedGraph:
    """Sample each ordered pair (a follows b) independently."""
    rng = np.random.default_rng(spec.seed)
    blocks = np.repeat(np.arange(spec.k), spec.block_sizes())
    same = blocks[:, None] == blocks[None, :]
    prob = np.where(same, spec.p_in, spec.p_out)
    draw = rng.random((spec.n, spec.n)) < prob
    np.fill_diagonal(draw, False)
    users = [user_id(i, spec.n) for i in range(spec.n)]
    src, dst = np.nonzero(draw)
    edges = [FollowerEdge(users[a], users[b]) for a, b in zip(src.tolist(), dst.tolist())]
    return PlantedGraph(edges=edges, users=users, blocks=blocks.tolist())


# corpus ---------------------------------------------------------------------

@dataclass(frozen=True)
class SynthCorpusSpec:
    tweets_per_user: int = 5
    # community c uses row c % len(rows)
    category_mix: tuple[tuple[float, ...], ...] = (
        (0.1, 0.4, 0.2, 0.3),
        (0.05, 0.25, 0.4, 0.3),
        (0.2, 0.5, 0.1, 0.2),
        (0.0, 0.2, 0.2, 0.6),
    )
    credibility_mix: tuple[tuple[float, ...], ...] = (
        (0.25, 0.25, 0.5),
        (0.6, 0.2, 0.2),
        (0.1, 0.3, 0.6),
        (0.4, 0.4, 0.2),
    )
    keywords: tuple[tuple[str, ...], ...] = DEFAULT_KEYWORDS
    n_labeled: int = 500
    page_words: tuple[int, int] = (320, 420)
    keyword_repeats: int = 2
    n_rejected_pages: int = 6
    n_foreign_tweets: int = 3
    quota: bool = True
    seed: int = 0

    def __post_init__(self):
        for name, rows, width in (("category_mix", self.category_mix, 4), ("credibility_mix", self.credibility_mix, 3)):
            for row in rows:
                if len(row) != width or min(row) < 0 or abs(sum(row) - 1.0) > 1e-9:
                    raise ValueError(f"{name} rows need {width} probabilities summing to 1")
        if len(self.keywords) != N_CRITERIA:
            raise ValueError(f"need {N_CRITERIA} keyword lists")
        if self.page_words[0] < 300:
            raise ValueError("synthetic pages must have at least 300 words to pass filtering")

    @staticmethod
    def mix_for(rows, community: int):
        return rows[community % len(rows)]


@dataclass
class SynthCorpus:
    tweets: list[Tweet]
    foreign_tweets: list[Tweet]
    pages: list[dict]
    labels: list[tuple[str, tuple[int, ...]]]
    resolver: list[dict]
    truth: dict = field(default_factory=dict)


def quota_counts(total: int, probs: Sequence[float]) -> list[int]:
    """Largest-remainder allocation of ``total`` items to ``probs``; ties go to the earlier slot."""
    raw = [total * p for p in probs]
    counts = [int(np.floor(r)) for r in raw]
    short = total - sum(counts)
    order = sorted(range(len(probs)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def _criteria_for_bucket(b: int, rng: np.random.Generator) -> tuple[int, ...]:
    score = int(rng.choice([(0, 1, 2), (3, 4), (5, 6, 7)][b]))
    chosen = rng.choice(N_CRITERIA, size=score, replace=False)
    return tuple(int(i in chosen) for i in range(N_CRITERIA))


def page_text(criteria: Sequence[int], spec: SynthCorpusSpec, rng: np.random.Generator) -> str:
    """Filler text with the keywords of every satisfied criterion planted in it."""
    n_words = int(rng.integers(spec.page_words[0], spec.page_words[1] + 1))
    words = list(rng.choice(FILLER, size=n_words))
    for i, on in enumerate(criteria):
        if on:
            for kw in spec.keywords[i]:
                for _ in range(spec.keyword_repeats):
                    words.insert(int(rng.integers(0, len(words) + 1)), kw)
    return " ".join(words)


def _draw_categories(n: int, probs, quota: bool, rng) -> list[int]:
    if quota:
        cats = [c for c, cnt in enumerate(quota_counts(n, probs)) for _ in range(cnt)]
        rng.shuffle(cats)
        return cats
    return rng.choice(4, size=n, p=probs).tolist()


def _draw_buckets(n: int, probs, quota: bool, rng) -> list[int]:
    if quota:
        out = [b for b, cnt in enumerate(quota_counts(n, probs)) for _ in range(cnt)]
        rng.shuffle(out)
        return out
    return rng.choice(3, size=n, p=probs).tolist()


def gen_corpus(spec: SynthCorpusSpec, truth: Mapping[str, int]) -> SynthCorpus:
    """Generate tweets, linked pages, expert labels and resolver fixtures.

    ``truth`` maps user id to planted community. Every Cat2 tweet links to
    its own page; half of those links go through a short URL that only the
    resolver fixtures can expand.
    """
    rng = np.random.default_rng(spec.seed)
    communities: dict[int, list[str]] = {}
    for user, c in sorted(truth.items()):
        communities.setdefault(c, []).append(user)

    tweets: list[Tweet] = []
    pages: list[dict] = []
    resolver: list[dict] = []
    community_truth = {}
    seq = 0
    for c in sorted(communities):
        members = communities[c]
        authors = [u for u in members for _ in range(spec.tweets_per_user)]
        cats = _draw_categories(len(authors), spec.mix_for(spec.category_mix, c), spec.quota, rng)
        n_cat2 = cats.count(1)
        buckets = _draw_buckets(n_cat2, spec.mix_for(spec.credibility_mix, c), spec.quota, rng)
        bucket_iter = iter(buckets)
        counts = [0, 0, 0, 0]
        bucket_counts = [0, 0, 0]
        for author, cat in zip(authors, cats):
            seq += 1
            tid = f"t{seq:07d}"
            likes = int(rng.geometric(0.2)) - 1
            counts[cat] += 1
            if cat == 0:
                urls = (f"https://pubmed.ncbi.nlm.nih.gov/{int(rng.integers(10**7, 10**8))}/",)
            elif cat == 1:
                b = next(bucket_iter)
                crit = _criteria_for_bucket(b, rng)
                assert bucket(sum(crit)) is Bucket(b)
                bucket_counts[b] += 1
                url = f"https://news{seq % 17}.example.org/article/{tid}"
                pages.append({"url": url, "content": page_text(crit, spec, rng), "lang": "en", "available": True})
                if seq % 2:
                    short = f"https://t.co/{tid}"
                    resolver.append({"short_url": short, "expanded_url": url, "links_to_pubmed": bool(seq % 3 == 0)})
                    url = short
                urls = (url,)
            elif cat == 2:
                urls = (SOCIAL_URLS[seq % len(SOCIAL_URLS)].format(tid),)
            else:
                urls = ()
            tweets.append(Tweet(tid, author, f"synthetic vaccine tweet {tid}", urls, likes,
                                bool(rng.random() < 0.2), "en"))
        link_bearing = counts[0] + counts[1] + counts[2]
        scored = bucket_counts[0] + bucket_counts[1] + bucket_counts[2]
        community_truth[str(c)] = {
            "members": members,
            "category_counts": dict(zip(CATEGORY_NAMES, counts)),
            "bucket_counts": dict(zip(BUCKET_NAMES, bucket_counts)),
            "expected": {
                "pub_articles_pct": pct(counts[0], link_bearing),
                "videos_pct": pct(counts[2], link_bearing),
                "no_urls_pct": pct(counts[3], len(authors)),
                "low_cred_pct": pct(bucket_counts[0], scored),
                "high_cred_pct": pct(bucket_counts[2], scored),
            },
        }

    foreign = []
    all_users = sorted(truth)
    for i in range(spec.n_foreign_tweets):
        seq += 1
        foreign.append(Tweet(f"t{seq:07d}", all_users[i % len(all_users)], "tweet en français", (), 0, False, "fr"))

    labels = []
    for i in range(spec.n_labeled):
        crit = tuple(int(x) for x in rng.integers(0, 2, size=N_CRITERIA))
        url = f"https://labelled.example.org/doc/{i:05d}"
        pages.append({"url": url, "content": page_text(crit, spec, rng), "lang": "en", "available": True})
        labels.append((url, crit))

    rejected = []
    for i in range(spec.n_rejected_pages):
        url = f"https://rejected.example.org/{i}"
        kind = i % 3
        if kind == 0:
            rejected.append({"url": url, "content": " ".join(rng.choice(FILLER, size=100)), "lang": "en", "available": True})
        elif kind == 1:
            rejected.append({"url": url, "content": " ".join(rng.choice(FILLER, size=350)), "lang": "fr", "available": True})
        else:
            rejected.append({"url": url, "content": "", "lang": "en", "available": False})
    pages.extend(rejected)

    summary = {
        "seed": spec.seed,
        "quota": spec.quota,
        "communities": community_truth,
        "n_tweets": len(tweets),
        "n_foreign_tweets": len(foreign),
        "n_pages": len(pages),
        "n_rejected_pages": len(rejected),
        "n_labeled": len(labels),
    }
    return SynthCorpus(tweets, foreign, pages, labels, resolver, summary)


# file output ------------------------------------------------------------------

def _tweet_record(t: Tweet) -> dict:
    return {"tweet_id": t.tweet_id, "user_id": t.user_id, "text": t.text, "urls": list(t.urls),
            "like_count": t.like_count, "is_retweet": t.is_retweet, "lang": t.lang}


def write_dataset(out_dir, graph_spec: PlantedPartitionSpec, corpus_spec: SynthCorpusSpec) -> dict:
    """Write every ingest-format file plus ``truth.json``; returns the truth document."""
    import csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    planted = gen_graph(graph_spec)
    corpus = gen_corpus(corpus_spec, planted.truth)

    with open(out / "followers.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["from_user", "to_user"])
        w.writerows((e.from_user, e.to_user) for e in planted.edges)
    with open(out / "tweets.jsonl", "w", encoding="utf-8") as fh:
        for t in corpus.tweets + corpus.foreign_tweets:
            fh.write(json.dumps(_tweet_record(t), sort_keys=True) + "\n")
    with open(out / "pages.jsonl", "w", encoding="utf-8") as fh:
        for page in corpus.pages:
            fh.write(json.dumps(page, sort_keys=True) + "\n")
    with open(out / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["url", *CRITERIA_COLUMNS])
        w.writerows([url, *crit] for url, crit in corpus.labels)
    with open(out / "resolver_fixtures.jsonl", "w", encoding="utf-8") as fh:
        for rec in corpus.resolver:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    truth = {
        "graph": {**asdict(graph_spec), "n_edges": len(planted.edges)},
        "partition": planted.truth,
        **corpus.truth,
    }
    with open(out / "truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return truth


DEFAULT_SYNTH_REFINE = {"max_size": 150, "min_size": 3, "max_rounds": 20}


def load_synth_spec(path=None, seed: int | None = None) -> tuple[PlantedPartitionSpec, SynthCorpusSpec, dict]:
    """Read a synth spec (TOML with ``seed``, ``[graph]``, ``[corpus]``, ``[refine]``).

    ``[refine]`` is not used for generation; it is copied into the pipeline
    config written next to the dataset.
    """
    doc: dict = {}
    if path is not None:
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        doc = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    base_seed = int(doc.get("seed", 0) if seed is None else seed)
    graph = dict(doc.get("graph", {}))
    if "sizes" in graph:
        graph["sizes"] = tuple(graph["sizes"])
    corpus = dict(doc.get("corpus", {}))
    for key in ("category_mix", "credibility_mix", "keywords"):
        if key in corpus:
            corpus[key] = tuple(tuple(row) for row in corpus[key])
    if "page_words" in corpus:
        corpus["page_words"] = tuple(corpus["page_words"])
    refine = {**DEFAULT_SYNTH_REFINE, **doc.get("refine", {})}
    return (
        PlantedPartitionSpec(seed=base_seed, **graph),
        SynthCorpusSpec(seed=base_seed, **corpus),
        refine,
    )


def write_pipeline_config(out_dir, seed: int, refine: Mapping[str, int]) -> Path:
    """A run config pointing at the generated files, for ``vaxcomm detect|score|characterize``."""
    lines = [
        f"seed = {int(seed)}",
        'out_dir = "out"',
        "",
        "[inputs]",
        'followers = "followers.csv"',
        'tweets = "tweets.jsonl"',
        'pages = "pages.jsonl"',
        'labels = "labels.csv"',
        'resolver = "resolver_fixtures.jsonl"',
        "",
        "[refine]",
        *(f"{k} = {int(v)}" for k, v in refine.items()),
        "",
        "[characterize]",
        'measures = ["videos_pct", "low_cred_pct", "high_cred_pct", "pub_articles_pct", "no_urls_pct"]',
        "",
    ]
    path = Path(out_dir) / "config.toml"
    path.write_text("\n".join(lines), encoding="utf-8")
    return path
