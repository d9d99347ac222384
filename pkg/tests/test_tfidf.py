import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.feature_extraction.text import TfidfVectorizer

from vaxcomm.credibility import fit_tfidf, tokenize


def test_tokenize():
    assert tokenize("Hello, WORLD! a b_c x2 don't") == ["hello", "world", "x2", "don"]


def test_idf_term_in_every_doc():
    m = fit_tfidf(["vaccine safe", "vaccine risk", "vaccine"])
    assert m.idf[m.vocabulary["vaccine"]] == pytest.approx(1.0)


def test_idf_hand_value():
    m = fit_tfidf(["aa bb", "bb cc"])
    assert m.idf[m.vocabulary["aa"]] == pytest.approx(math.log(1.5) + 1)
    assert m.idf[m.vocabulary["aa"]] == pytest.approx(1.405, abs=1e-3)


def test_empty_document_is_zero_vector():
    m = fit_tfidf(["aa bb", "bb cc"])
    X = m.transform(["", "zz unknown"]).toarray()
    assert np.all(X == 0) and np.isfinite(X).all()


def test_errors():
    with pytest.raises(ValueError):
        fit_tfidf([])
    with pytest.raises(ValueError):
        fit_tfidf(["", "a ! ?"])


def test_vocabulary_dense_and_sorted():
    m = fit_tfidf(["zeta alpha", "beta"])
    assert m.vocabulary == {"alpha": 0, "beta": 1, "zeta": 2}
    assert (m.idf > 0).all()


words = st.sampled_from(["vaccine", "safe", "risk", "study", "trial", "dose", "x", "data", "cdc"])
docs = st.lists(st.lists(words, max_size=12).map(" ".join), min_size=1, max_size=15)


@settings(max_examples=80, deadline=None)
@given(docs)
def test_matches_sklearn_and_norms(corpus):
    if not any(tokenize(d) for d in corpus):
        return
    m = fit_tfidf(corpus)
    ref = TfidfVectorizer(tokenizer=tokenize, lowercase=False, token_pattern=None, smooth_idf=True, norm="l2")
    R = ref.fit_transform(corpus).toarray()
    assert [t for t, _ in sorted(ref.vocabulary_.items(), key=lambda kv: kv[1])] == sorted(m.vocabulary)
    X = m.transform(corpus).toarray()
    assert np.allclose(X, R, atol=1e-12)
    assert np.allclose(m.idf, ref.idf_, atol=1e-12)
    norms = np.linalg.norm(X, axis=1)
    assert np.all((np.abs(norms - 1) < 1e-9) | (norms == 0))


@settings(max_examples=50, deadline=None)
@given(docs)
def test_idf_monotone_in_df(corpus):
    if not any(tokenize(d) for d in corpus):
        return
    m = fit_tfidf(corpus)
    df = {t: sum(t in set(tokenize(d)) for d in corpus) for t in m.vocabulary}
    for a in m.vocabulary:
        for b in m.vocabulary:
            if df[a] <= df[b]:
                assert m.idf[m.vocabulary[a]] >= m.idf[m.vocabulary[b]]
