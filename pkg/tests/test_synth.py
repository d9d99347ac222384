import json

import numpy as np
import pytest

from vaxcomm.credibility import bucket
from vaxcomm.ingest import load_followers, load_labeled_pages, load_pages, load_tweets
from vaxcomm.links import FixtureResolver, LinkCategory, categorize_corpus, load_domains
from vaxcomm.synth import (
    PlantedPartitionSpec,
    SynthCorpusSpec,
    gen_corpus,
    gen_graph,
    load_synth_spec,
    quota_counts,
    write_dataset,
)


def test_extreme_probabilities_give_cliques():
    pg = gen_graph(PlantedPartitionSpec(n=6, k=2, p_in=1.0, p_out=0.0, seed=0))
    pairs = {(e.from_user, e.to_user) for e in pg.edges}
    assert len(pairs) == 12
    truth = pg.truth
    assert all(truth[a] == truth[b] for a, b in pairs)


def test_graph_determinism_and_seed_sensitivity():
    spec = PlantedPartitionSpec(n=80, k=4, seed=5)
    assert gen_graph(spec).edges == gen_graph(spec).edges
    assert gen_graph(spec).edges != gen_graph(PlantedPartitionSpec(n=80, k=4, seed=6)).edges


def test_block_sizes_remainder():
    assert PlantedPartitionSpec(n=10, k=3).block_sizes() == [4, 3, 3]
    assert PlantedPartitionSpec(n=300, sizes=(150, 50, 50, 50)).block_sizes() == [150, 50, 50, 50]


@pytest.mark.parametrize("kw", [dict(p_in=0.1, p_out=0.2), dict(n=10, k=11), dict(n=10, sizes=(3, 3))])
def test_invalid_graph_spec(kw):
    with pytest.raises(ValueError):
        PlantedPartitionSpec(**kw)


def test_invalid_corpus_spec():
    with pytest.raises(ValueError):
        SynthCorpusSpec(category_mix=((0.5, 0.5, 0.5, 0.0),))
    with pytest.raises(ValueError):
        SynthCorpusSpec(page_words=(100, 200))


def test_quota_counts():
    assert quota_counts(8, (0.25, 0.25, 0.5)) == [2, 2, 4]
    assert quota_counts(10, (1 / 3, 1 / 3, 1 / 3)) == [4, 3, 3]
    assert sum(quota_counts(17, (0.1, 0.4, 0.2, 0.3))) == 17


def small_truth(k=2, per=10):
    return {f"u{i:03d}": i % k for i in range(k * per)}


def test_all_cat4_mix():
    corpus = gen_corpus(SynthCorpusSpec(category_mix=((0.0, 0.0, 0.0, 1.0),), n_labeled=0), small_truth())
    assert all(not t.urls for t in corpus.tweets)


def test_quota_counts_match_spec():
    spec = SynthCorpusSpec(n_labeled=0, category_mix=((0.25, 0.25, 0.25, 0.25),),
                           credibility_mix=((0.25, 0.25, 0.5),))
    corpus = gen_corpus(spec, {f"u{i}": 0 for i in range(8)})  # 40 tweets
    c0 = corpus.truth["communities"]["0"]
    assert c0["category_counts"] == {"cat1": 10, "cat2": 10, "cat3": 10, "cat4": 10}
    assert sum(c0["bucket_counts"].values()) == 10


def test_labels_consistent_with_keywords():
    spec = SynthCorpusSpec(n_labeled=30)
    corpus = gen_corpus(spec, small_truth())
    contents = {p["url"]: p["content"] for p in corpus.pages}
    for url, crit in corpus.labels:
        words = set(contents[url].split())
        for i, on in enumerate(crit):
            assert bool(on) == all(kw in words for kw in spec.keywords[i])


def test_cat2_page_buckets_match_plan():
    spec = SynthCorpusSpec(n_labeled=0)
    corpus = gen_corpus(spec, small_truth())
    n_cat2 = sum(c["category_counts"]["cat2"] for c in corpus.truth["communities"].values())
    assert n_cat2 == len(corpus.pages) - spec.n_rejected_pages
    # every article page carries keywords for a criteria set whose bucket is well defined
    for page in corpus.pages[:n_cat2]:
        words = set(page["content"].split())
        score = sum(all(kw in words for kw in kws) for kws in spec.keywords)
        bucket(score)


def test_dataset_parses_back(tmp_path):
    truth = write_dataset(tmp_path, PlantedPartitionSpec(n=60, k=3, seed=2), SynthCorpusSpec(n_labeled=20, seed=2))
    edges = load_followers(tmp_path / "followers.csv")
    assert len(edges) == truth["graph"]["n_edges"]
    tweets = load_tweets(tmp_path / "tweets.jsonl")
    assert len(tweets) == truth["n_tweets"]
    assert len(load_pages(tmp_path / "pages.jsonl")) == truth["n_pages"]
    assert len(load_labeled_pages(tmp_path / "labels.csv")) == 20
    resolver = FixtureResolver.from_jsonl(tmp_path / "resolver_fixtures.jsonl")
    links, counts = categorize_corpus(tweets, resolver, load_domains())
    for cat, name in zip(LinkCategory, ("cat1", "cat2", "cat3", "cat4")):
        planted = sum(c["category_counts"][name] for c in truth["communities"].values())
        assert counts[cat.name] == planted
    shorts = [u for t in tweets for u in t.urls if u.startswith("https://t.co/")]
    assert shorts and all(resolver.lookup(u) is not None for u in shorts)
    json.loads((tmp_path / "truth.json").read_text())


def test_load_spec_file(tmp_path):
    (tmp_path / "s.toml").write_text("seed = 4\n[graph]\nn = 50\nk = 2\n[corpus]\nn_labeled = 12\n[refine]\nmax_size = 30\n")
    g, c, r = load_synth_spec(tmp_path / "s.toml")
    assert (g.n, g.k, g.seed, c.n_labeled, c.seed) == (50, 2, 4, 12, 4)
    assert r["max_size"] == 30 and r["min_size"] == 3
    g2, c2, _ = load_synth_spec(tmp_path / "s.toml", seed=9)
    assert g2.seed == c2.seed == 9


def test_null_model_has_no_structure():
    from vaxcomm.community import louvain, nmi
    from vaxcomm.graph import build_follower_graph

    scores = []
    for seed in range(3):
        pg = gen_graph(PlantedPartitionSpec(n=200, k=4, p_in=0.05, p_out=0.05, seed=seed))
        g = build_follower_graph(pg.edges, pg.users)
        scores.append(nmi(louvain(g, seed=seed), pg.partition(g.nodes)))
    assert np.mean(scores) < 0.3
