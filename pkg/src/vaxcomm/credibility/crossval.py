from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ..ingest import N_CRITERIA
from .forest import RFConfig, train_rf
from .svm import DegenerateLabelsError, SVMConfig, train_svm
from .tfidf import TfIdfModel, fit_tfidf

logger = logging.getLogger(__name__)

ALGORITHMS = ("svm", "rf")


@dataclass(frozen=True)
class ClassifierConfig:
    svm: SVMConfig = field(default_factory=SVMConfig)
    rf: RFConfig = field(default_factory=RFConfig)
    folds: int = 10
    seed: int = 0


@dataclass(frozen=True)
class ConstantModel:
    """Stand-in when a training set holds a single class for some criterion."""

    value: int

    def predict(self, X) -> np.ndarray:
        return np.full(X.shape[0], self.value, dtype=np.int64)


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle split into ``k`` disjoint folds whose sizes differ by at most one."""
    if n < k:
        raise ValueError(f"need at least {k} examples for {k}-fold cross-validation, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def derived_seed(seed: int, *parts: int) -> int:
    return int(np.random.SeedSequence([seed, *parts]).generate_state(1, dtype=np.uint64)[0])


def fit_criterion(algorithm: str, X, y, config: ClassifierConfig, criterion: int, salt: int = 0):
    """Train one criterion model; single-class data falls back to a constant."""
    try:
        if algorithm == "svm":
            return train_svm(X, y, config.svm)
        rf_cfg = replace(config.rf, seed=derived_seed(config.seed, criterion, salt))
        return train_rf(X, y, rf_cfg)
    except DegenerateLabelsError:
        majority = int(2 * np.sum(y) > len(y))
        logger.warning("criterion c%d (%s): degenerate labels, using constant %d", criterion + 1, algorithm, majority)
        return ConstantModel(majority)


@dataclass
class CVResult:
    accuracy: dict[str, list[float]]
    per_fold: dict[str, np.ndarray]
    fold_sizes: list[int]
    positive_rate: list[float]

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "fold_sizes": self.fold_sizes,
            "positive_rate": self.positive_rate,
        }


FoldHook = Callable[[int, np.ndarray, np.ndarray, TfIdfModel, dict], None]


def cross_validate(texts: Sequence[str], labels, config: ClassifierConfig = ClassifierConfig(),
                   on_fold: FoldHook | None = None) -> CVResult:
    """k-fold CV of both algorithms on every criterion.

    TF-IDF is refit on each training split, so held-out text never reaches
    the vocabulary or idf weights.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = len(texts)
    if labels.shape != (n, N_CRITERIA):
        raise ValueError(f"labels must be shaped ({n}, {N_CRITERIA}), got {labels.shape}")
    folds = kfold_indices(n, config.folds, config.seed)
    per_fold = {a: np.zeros((N_CRITERIA, len(folds))) for a in ALGORITHMS}
    for f, test in enumerate(folds):
        train = np.setdiff1d(np.arange(n), test)
        tfidf = fit_tfidf([texts[i] for i in train])
        X_train = tfidf.transform(texts[i] for i in train)
        X_test = tfidf.transform(texts[i] for i in test)
        models = {}
        for c in range(N_CRITERIA):
            for algo in ALGORITHMS:
                model = fit_criterion(algo, X_train, labels[train, c], config, c, salt=f + 1)
                models[(algo, c)] = model
                per_fold[algo][c, f] = float(np.mean(model.predict(X_test) == labels[test, c]))
        if on_fold is not None:
            on_fold(f, train, test, tfidf, models)
    accuracy = {a: [float(v) for v in per_fold[a].mean(axis=1)] for a in ALGORITHMS}
    return CVResult(
        accuracy=accuracy,
        per_fold=per_fold,
        fold_sizes=[len(f) for f in folds],
        positive_rate=[float(v) for v in labels.mean(axis=0)],
    )
