"""CART trees (Gini impurity) and a bagged random forest for binary labels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .svm import check_binary_labels

LEAF = -1
_PREDICT_BATCH = 512


@dataclass(frozen=True)
class RFConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    seed: int = 0


@dataclass(frozen=True)
class DecisionTree:
    """Flat array tree. ``feature[i] == LEAF`` marks a leaf; ``value`` is P(y=1) at the node.

    Samples with ``x[feature] <= threshold`` go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        rows = np.arange(X.shape[0])
        while len(active):
            cur = node[active]
            go_left = X[rows[active], self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.value[self.apply(X)] > 0.5).astype(np.int64)


def gini(y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    p = float(np.mean(y))
    return 2.0 * p * (1.0 - p)


def _best_split(sub: np.ndarray, y: np.ndarray, features: np.ndarray, min_leaf: int):
    """Return ``(feature, threshold)`` minimising weighted Gini, or ``None``.

    Ties resolve to the earliest feature in ``features`` and then the lowest
    threshold.
    """
    n = len(y)
    xs_raw = sub[:, features]
    order = np.argsort(xs_raw, axis=0, kind="stable")
    xs = np.take_along_axis(xs_raw, order, axis=0)
    ys = y[order]
    pos = ys.sum(axis=0)[0]
    left_pos = np.cumsum(ys, axis=0)[:-1].astype(np.float64)
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    right_pos = pos - left_pos
    # n * weighted gini; 2p(1-p) per side
    cost = 2.0 * left_pos * (n_left - left_pos) / n_left + 2.0 * right_pos * (n_right - right_pos) / n_right
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    cost = np.where(valid, cost, np.inf)
    flat = int(np.argmin(cost.T))
    col, row = divmod(flat, n - 1)
    thr = (xs[row, col] + xs[row + 1, col]) / 2.0
    # midpoint may round onto the upper value for adjacent floats
    if thr >= xs[row + 1, col]:
        thr = xs[row, col]
    return int(features[col]), float(thr)


def build_tree(X: np.ndarray, y: np.ndarray, rng: np.random.Generator, max_features: int,
               max_depth: int | None = None, min_leaf: int = 1) -> DecisionTree:
    n_features = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yy = y[idx]
        pos = int(yy.sum())
        if pos == 0 or pos == len(idx) or len(idx) < 2 * min_leaf:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        sub = X[idx]
        perm = rng.permutation(n_features)
        # draw features until max_features non-constant ones are found
        chosen = []
        start = 0
        step = max(4 * max_features, 64)
        while start < n_features and len(chosen) < max_features:
            block = perm[start:start + step]
            col = sub[:, block]
            chosen.extend(block[col.max(axis=0) > col.min(axis=0)].tolist())
            start += step
        if not chosen:
            continue
        split = _best_split(sub, yy, np.array(chosen[:max_features]), min_leaf)
        if split is None:
            continue
        f, thr = split
        go_left = sub[:, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
    )


@dataclass(frozen=True)
class RandomForest:
    trees: tuple[DecisionTree, ...]
    n_features: int

    def votes(self, X) -> np.ndarray:
        n = X.shape[0]
        out = np.zeros(n, dtype=np.int64)
        for start in range(0, n, _PREDICT_BATCH):
            block = X[start:start + _PREDICT_BATCH]
            dense = block.toarray() if sparse.issparse(block) else np.asarray(block, dtype=np.float64)
            for tree in self.trees:
                out[start:start + len(dense)] += tree.predict(dense)
        return out

    def predict(self, X) -> np.ndarray:
        # strict majority; a tied vote predicts 0
        return (2 * self.votes(X) > len(self.trees)).astype(np.int64)


def max_features_for(n_features: int) -> int:
    return max(1, int(np.sqrt(n_features)))


def train_rf(X, y, config: RFConfig = RFConfig()) -> RandomForest:
    """Bootstrap-aggregated CART trees with ``sqrt(n_features)`` candidates per split."""
    y = check_binary_labels(y)
    X = X.toarray() if sparse.issparse(X) else np.asarray(X, dtype=np.float64)
    n, d = X.shape
    mtry = max_features_for(d)
    trees = []
    for child in np.random.SeedSequence(config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, size=n)
        trees.append(build_tree(X[boot], y[boot], rng, mtry, config.max_depth, config.min_leaf))
    return RandomForest(tuple(trees), d)
