from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..ingest import CRITERIA_COLUMNS, N_CRITERIA, LabeledPage, WebPage
from ..links import canonical_url
from .crossval import ALGORITHMS, ClassifierConfig, CVResult, cross_validate, fit_criterion
from .tfidf import TfIdfModel, fit_tfidf

logger = logging.getLogger(__name__)


class Bucket(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


def bucket(score: int) -> Bucket:
    """0-2 -> Low, 3-4 -> Medium, 5-7 -> High."""
    if isinstance(score, bool) or int(score) != score or not 0 <= score <= N_CRITERIA:
        raise ValueError(f"credibility score must be an integer in 0..{N_CRITERIA}, got {score!r}")
    if score <= 2:
        return Bucket.LOW
    if score <= 4:
        return Bucket.MEDIUM
    return Bucket.HIGH


@dataclass(frozen=True)
class CredibilityScore:
    per_criterion: tuple[int, ...]

    @property
    def score(self) -> int:
        return sum(self.per_criterion)

    @property
    def bucket(self) -> Bucket:
        return bucket(self.score)


class NotTrainedError(RuntimeError):
    pass


@dataclass
class CredibilityModelSet:
    tfidf: TfIdfModel
    svm_models: list
    rf_models: list
    cv_accuracy: dict[str, list[float]]
    selection: list[str]
    config: ClassifierConfig

    def __post_init__(self):
        if len(self.svm_models) != N_CRITERIA or len(self.rf_models) != N_CRITERIA:
            raise ValueError(f"expected {N_CRITERIA} models per algorithm")

    def selected(self, criterion: int):
        return (self.svm_models if self.selection[criterion] == "svm" else self.rf_models)[criterion]

    def predict_matrix(self, texts: Sequence[str]) -> np.ndarray:
        X = self.tfidf.transform(texts)
        out = np.zeros((X.shape[0], N_CRITERIA), dtype=np.int64)
        for c in range(N_CRITERIA):
            out[:, c] = self.selected(c).predict(X)
        return out


def select_models(cv_accuracy: Mapping[str, Sequence[float]]) -> list[str]:
    """Per criterion, the algorithm with the higher mean CV accuracy; ties go to SVM."""
    return ["rf" if r > s else "svm" for s, r in zip(cv_accuracy["svm"], cv_accuracy["rf"])]


def labeled_texts(labeled: Sequence[LabeledPage], pages: Mapping[str, WebPage]) -> tuple[list[str], np.ndarray, int]:
    """Join expert labels to page contents; labels without content are dropped and counted."""
    texts, rows, missing = [], [], 0
    for lp in labeled:
        page = pages.get(lp.url)
        if page is None or not page.content:
            missing += 1
            continue
        texts.append(page.content)
        rows.append(lp.criteria)
    return texts, np.array(rows, dtype=np.int64).reshape(-1, N_CRITERIA), missing


def fit_model_set(texts: Sequence[str], labels, config: ClassifierConfig = ClassifierConfig(),
                  cv: CVResult | None = None) -> tuple[CredibilityModelSet, CVResult]:
    """Cross-validate, then train all 14 models on the full labelled set."""
    labels = np.asarray(labels, dtype=np.int64)
    if cv is None:
        cv = cross_validate(texts, labels, config)
    tfidf = fit_tfidf(list(texts))
    X = tfidf.transform(texts)
    models = {a: [fit_criterion(a, X, labels[:, c], config, c, salt=0) for c in range(N_CRITERIA)] for a in ALGORITHMS}
    selection = select_models(cv.accuracy)
    for c, algo in enumerate(selection):
        logger.info("criterion c%d: svm=%.3f rf=%.3f -> %s", c + 1, cv.accuracy["svm"][c], cv.accuracy["rf"][c], algo)
    return CredibilityModelSet(tfidf, models["svm"], models["rf"], cv.accuracy, selection, config), cv


def score_pages(pages: Sequence[WebPage], models: CredibilityModelSet | None) -> list[CredibilityScore]:
    if models is None:
        raise NotTrainedError("credibility models have not been trained")
    if not pages:
        return []
    preds = models.predict_matrix([p.content for p in pages])
    return [CredibilityScore(tuple(int(v) for v in row)) for row in preds]


def score_page(page: WebPage, models: CredibilityModelSet | None) -> CredibilityScore:
    return score_pages([page], models)[0]


def write_scores_csv(path, pages: Iterable[WebPage], scores: Iterable[CredibilityScore]) -> None:
    rows = sorted(
        ([canonical_url(p.url), s.score, s.bucket.label, *s.per_criterion] for p, s in zip(pages, scores)),
        key=lambda r: r[0],
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["url", "score", "bucket", *CRITERIA_COLUMNS])
        w.writerows(rows)


def read_scores_csv(path) -> dict[str, CredibilityScore]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            crit = tuple(int(row[c]) for c in CRITERIA_COLUMNS)
            score = CredibilityScore(crit)
            if score.score != int(row["score"]) or score.bucket.label != row["bucket"]:
                raise ValueError(f"{path}: inconsistent score row for {row['url']}")
            out[row["url"]] = score
    return out
