import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaxcomm.ingest import Tweet, WebPage
from vaxcomm.links import (
    FixtureResolver,
    LinkCategory,
    ResolverRecord,
    canonical_url,
    categorize_corpus,
    categorize_links,
    categorize_tweet,
    filter_pages,
    load_domains,
    resolve_url,
)

DOMAINS = load_domains()


def tw(*urls, tid="1"):
    return Tweet(tid, "u", "text", tuple(urls))


@pytest.mark.parametrize("urls,expected", [
    (["https://pubmed.ncbi.nlm.nih.gov/12345"], LinkCategory.PUBMED_DIRECT),
    (["https://www.ncbi.nlm.nih.gov/pmc/articles/PMC1/"], LinkCategory.PUBMED_DIRECT),
    (["https://youtube.com/watch?v=a"], LinkCategory.SOCIAL_MEDIA),
    (["https://m.facebook.com/post/1"], LinkCategory.SOCIAL_MEDIA),
    (["https://www.reddit.com/r/vaccines"], LinkCategory.WEB_PAGE),
    (["https://en.wikipedia.org/wiki/Vaccine"], LinkCategory.WEB_PAGE),
    (["https://www.ncbi.nlm.nih.gov/gene/1"], LinkCategory.WEB_PAGE),
    ([], LinkCategory.NO_URL),
    (["https://news.example.com/a", "https://youtube.com/watch?v=a"], LinkCategory.WEB_PAGE),
    (["https://youtube.com/x", "https://pubmed.ncbi.nlm.nih.gov/1"], LinkCategory.PUBMED_DIRECT),
])
def test_categories(urls, expected):
    assert categorize_tweet(tw(*urls), None, DOMAINS) is expected


def test_lookalike_host_not_matched():
    assert DOMAINS.classify("https://notyoutube.com/x") is LinkCategory.WEB_PAGE


def test_canonical_url():
    assert canonical_url("HTTPS://WWW.Example.com/Path/#frag") == "https://example.com/Path"


def fixture_resolver(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in [
        {"short_url": "https://t.co/x", "expanded_url": "https://news.example.com/story", "links_to_pubmed": True},
        {"short_url": "https://t.co/y", "expanded_url": "https://youtu.be/abc", "links_to_pubmed": False},
    ]) + "\n")
    return FixtureResolver.from_jsonl(path)


def test_resolver_passthrough(tmp_path):
    r = fixture_resolver(tmp_path)
    rec = resolve_url("https://t.co/x", r)
    assert rec.expanded_url == "https://news.example.com/story"
    assert rec.links_to_pubmed and not rec.unknown


def test_resolver_miss():
    rec = resolve_url("https://t.co/zzz", FixtureResolver())
    assert rec == ResolverRecord("https://t.co/zzz", "https://t.co/zzz", False, True)


def test_pubmed_identity_expansion():
    url = "https://pubmed.ncbi.nlm.nih.gov/12345"
    assert resolve_url(url, None).expanded_url == url


def test_categorize_uses_expansion(tmp_path):
    r = fixture_resolver(tmp_path)
    links = categorize_links(tw("https://t.co/x"), r, DOMAINS)
    assert links.category is LinkCategory.WEB_PAGE
    assert links.web_pages == ("https://news.example.com/story",)
    assert links.links_to_pubmed
    assert categorize_tweet(tw("https://t.co/y"), r, DOMAINS) is LinkCategory.SOCIAL_MEDIA


url_pool = st.sampled_from([
    "https://pubmed.ncbi.nlm.nih.gov/9", "https://youtube.com/v", "https://instagram.com/p",
    "https://blog.example.org/a", "https://reddit.com/r/x", "https://t.co/x",
])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(url_pool, max_size=4), max_size=40))
def test_categories_exhaustive_and_pure(url_lists):
    tweets = [tw(*urls, tid=str(i)) for i, urls in enumerate(url_lists)]
    links, counts = categorize_corpus(tweets, None, DOMAINS)
    per_cat = Counter(tl.category for tl in links)
    assert sum(per_cat.values()) == len(tweets)
    assert sum(counts[c.name] for c in LinkCategory) == len(tweets)
    for t, tl in zip(tweets, links):
        assert (tl.category is LinkCategory.NO_URL) == (len(t.urls) == 0)
    assert categorize_corpus(tweets, None, DOMAINS)[0] == links


def page(words, available=True, lang="en", url="https://p.example"):
    content = " ".join(["w"] * words) if available else ""
    return WebPage(url, content, words if available else 0, lang, available)


def test_filter_boundaries():
    report = Counter()
    kept = filter_pages([page(299, url="a"), page(300, url="b"), page(500, available=False, url="c"),
                         page(400, lang="fr", url="d")], report)
    assert [p.url for p in kept] == ["b"]
    assert report == {"too_short": 1, "unavailable": 1, "non_english": 1, "kept": 1}


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 700), max_size=30))
def test_filter_output_word_counts(sizes):
    kept = filter_pages([page(s, url=str(i)) for i, s in enumerate(sizes)])
    assert all(p.word_count >= 300 for p in kept)
    assert len(kept) == sum(s >= 300 for s in sizes)


def test_custom_domain_file(tmp_path):
    path = tmp_path / "d.toml"
    path.write_text('pubmed_hosts = ["example.org/pub"]\nsocial_hosts = ["example.net"]\n')
    cfg = load_domains(path)
    assert cfg.classify("https://example.org/pub/1") is LinkCategory.PUBMED_DIRECT
    assert cfg.classify("https://example.org/other") is LinkCategory.WEB_PAGE
    assert cfg.classify("https://a.example.net/") is LinkCategory.SOCIAL_MEDIA
    (tmp_path / "bad.toml").write_text("pubmed_hosts = []\n")
    with pytest.raises(ValueError):
        load_domains(tmp_path / "bad.toml")
