from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse


class DegenerateLabelsError(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("degenerate labels" + (f": {detail}" if detail else ""))


def check_binary_labels(y) -> np.ndarray:
    y = np.asarray(y).astype(np.int64).ravel()
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0/1")
    pos = int(y.sum())
    if pos < 2 or len(y) - pos < 2:
        raise DegenerateLabelsError(f"{pos} positive / {len(y) - pos} negative, need >= 2 of each")
    return y


@dataclass(frozen=True)
class SVMConfig:
    reg: float = 1e-3
    epochs: int = 1000
    learning_rate: float = 10.0


@dataclass(frozen=True)
class LinearSVM:
    weights: np.ndarray
    bias: float

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X @ self.weights).ravel() + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int64)


def train_svm(X, y, config: SVMConfig = SVMConfig()) -> LinearSVM:
    """L2-regularised hinge loss minimised by full-batch subgradient descent.

    The objective is the *mean* hinge loss, so duplicating every row leaves
    the trajectory unchanged. The bias is not regularised. Step size decays
    as ``learning_rate / sqrt(t)``.
    """
    y01 = check_binary_labels(y)
    ys = np.where(y01 == 1, 1.0, -1.0)
    X = sparse.csr_matrix(X) if sparse.issparse(X) else np.asarray(X, dtype=np.float64)
    n, d = X.shape
    XT = X.T.tocsr() if sparse.issparse(X) else X.T
    w = np.zeros(d)
    b = 0.0
    for t in range(1, config.epochs + 1):
        margin = ys * (np.asarray(X @ w).ravel() + b)
        viol = margin < 1.0
        coef = np.where(viol, ys, 0.0)
        grad_w = config.reg * w - np.asarray(XT @ coef).ravel() / n
        grad_b = -coef.sum() / n
        eta = config.learning_rate / np.sqrt(t)
        w -= eta * grad_w
        b -= eta * grad_b
    return LinearSVM(w, float(b))
