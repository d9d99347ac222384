"""Page credibility: TF-IDF features, 7 criteria x {SVM, RF} classifiers, scoring."""

from .crossval import ClassifierConfig, ConstantModel, CVResult, cross_validate, kfold_indices
from .forest import DecisionTree, RandomForest, RFConfig, train_rf
from .persist import load_models, save_models
from .scoring import (
    Bucket,
    CredibilityModelSet,
    CredibilityScore,
    NotTrainedError,
    bucket,
    fit_model_set,
    labeled_texts,
    read_scores_csv,
    score_page,
    score_pages,
    select_models,
    write_scores_csv,
)
from .svm import DegenerateLabelsError, LinearSVM, SVMConfig, train_svm
from .tfidf import TfIdfModel, fit_tfidf, tokenize

__all__ = [
    "Bucket",
    "CVResult",
    "ClassifierConfig",
    "ConstantModel",
    "CredibilityModelSet",
    "CredibilityScore",
    "DecisionTree",
    "DegenerateLabelsError",
    "LinearSVM",
    "NotTrainedError",
    "RFConfig",
    "RandomForest",
    "SVMConfig",
    "TfIdfModel",
    "bucket",
    "cross_validate",
    "fit_model_set",
    "fit_tfidf",
    "kfold_indices",
    "labeled_texts",
    "load_models",
    "read_scores_csv",
    "save_models",
    "score_page",
    "score_pages",
    "select_models",
    "tokenize",
    "train_rf",
    "train_svm",
    "write_scores_csv",
]
