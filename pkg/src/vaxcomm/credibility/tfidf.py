from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

_SPLIT_RE = re.compile(r"[\W_]+")


def tokenize(text: str) -> list[str]:
    """Lower-case, split on non-alphanumeric runs, drop one-character tokens."""
    return [tok for tok in _SPLIT_RE.split(text.lower()) if len(tok) > 1]


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_count: int

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def transform(self, texts: Iterable[str]) -> sparse.csr_matrix:
        """Raw term counts times idf, each row scaled to unit L2 norm (empty rows stay zero)."""
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for text in texts:
            counts = Counter(t for t in tokenize(text) if t in self.vocabulary)
            for term, c in sorted(counts.items(), key=lambda kv: self.vocabulary[kv[0]]):
                indices.append(self.vocabulary[term])
                data.append(float(c))
            indptr.append(len(indices))
        m = sparse.csr_matrix(
            (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
            shape=(len(indptr) - 1, self.n_features),
        )
        m = m.multiply(self.idf[None, :]).tocsr()
        norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sparse.diags(scale).dot(m).tocsr()


def fit_tfidf(corpus: Sequence[str]) -> TfIdfModel:
    """Vocabulary of every token seen, with smoothed ``idf = ln((1+N)/(1+df)) + 1``.

    Terms are indexed in sorted order so the model does not depend on
    document order.
    """
    if len(corpus) == 0:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    df: Counter = Counter()
    for text in corpus:
        df.update(set(tokenize(text)))
    if not df:
        raise ValueError("cannot fit TF-IDF: every document is empty")
    terms = sorted(df)
    n = len(corpus)
    idf = np.array([np.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in terms])
    return TfIdfModel({t: i for i, t in enumerate(terms)}, idf, n)
