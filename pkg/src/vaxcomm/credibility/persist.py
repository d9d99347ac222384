"""JSON persistence for a trained :class:`CredibilityModelSet`."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict

import numpy as np

from .crossval import ClassifierConfig, ConstantModel
from .forest import DecisionTree, RandomForest, RFConfig
from .scoring import CredibilityModelSet
from .svm import LinearSVM, SVMConfig
from .tfidf import TfIdfModel

FORMAT = "vaxcomm-credibility-models"
VERSION = 1


def config_hash(config: ClassifierConfig) -> str:
    blob = json.dumps(asdict(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _dump_model(model) -> dict:
    if isinstance(model, ConstantModel):
        return {"kind": "constant", "value": model.value}
    if isinstance(model, LinearSVM):
        return {"kind": "linear", "weights": model.weights.tolist(), "bias": model.bias}
    if isinstance(model, RandomForest):
        return {
            "kind": "forest",
            "n_features": model.n_features,
            "trees": [
                {k: getattr(t, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}
                for t in model.trees
            ],
        }
    raise TypeError(f"cannot serialise {type(model).__name__}")


def _load_model(doc: dict):
    kind = doc["kind"]
    if kind == "constant":
        return ConstantModel(int(doc["value"]))
    if kind == "linear":
        return LinearSVM(np.array(doc["weights"], dtype=np.float64), float(doc["bias"]))
    if kind == "forest":
        trees = tuple(
            DecisionTree(
                np.array(t["feature"], dtype=np.int64),
                np.array(t["threshold"], dtype=np.float64),
                np.array(t["left"], dtype=np.int64),
                np.array(t["right"], dtype=np.int64),
                np.array(t["value"], dtype=np.float64),
            )
            for t in doc["trees"]
        )
        return RandomForest(trees, int(doc["n_features"]))
    raise ValueError(f"unknown model kind {kind!r}")


def save_models(path, models: CredibilityModelSet) -> None:
    terms = sorted(models.tfidf.vocabulary, key=models.tfidf.vocabulary.get)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "config": asdict(models.config),
        "config_hash": config_hash(models.config),
        "tfidf": {"terms": terms, "idf": models.tfidf.idf.tolist(), "doc_count": models.tfidf.doc_count},
        "cv_accuracy": models.cv_accuracy,
        "selection": models.selection,
        "svm": [_dump_model(m) for m in models.svm_models],
        "rf": [_dump_model(m) for m in models.rf_models],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_models(path) -> CredibilityModelSet:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise ValueError(f"{path}: not a {FORMAT} v{VERSION} file")
    cfg = doc["config"]
    config = ClassifierConfig(svm=SVMConfig(**cfg["svm"]), rf=RFConfig(**cfg["rf"]),
                              folds=cfg["folds"], seed=cfg["seed"])
    tf = doc["tfidf"]
    tfidf = TfIdfModel({t: i for i, t in enumerate(tf["terms"])}, np.array(tf["idf"]), int(tf["doc_count"]))
    return CredibilityModelSet(
        tfidf=tfidf,
        svm_models=[_load_model(m) for m in doc["svm"]],
        rf_models=[_load_model(m) for m in doc["rf"]],
        cv_accuracy=doc["cv_accuracy"],
        selection=doc["selection"],
        config=config,
    )
