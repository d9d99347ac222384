from __future__ import annotations

import numpy as np

from ..graph import FollowerGraph
from .partition import Partition


def modularity(g: FollowerGraph, p: Partition, resolution: float = 1.0) -> float:
    """Weighted Newman modularity.

    ``Q = sum_c [ L_c / m - resolution * (d_c / 2m)^2 ]`` where ``L_c`` is the
    total weight of edges inside ``c`` (a self-loop counted once) and ``d_c``
    the summed node strength (a self-loop counted twice).
    """
    if len(p) != g.n:
        raise ValueError(f"partition covers {len(p)} nodes, graph has {g.n}")
    m = g.total_weight
    if m <= 0:
        raise ValueError("modularity undefined for zero total weight")
    labels = p.labels
    k = p.n_communities
    same = labels[g.u] == labels[g.v]
    internal = np.bincount(labels[g.u][same], weights=g.w[same], minlength=k)
    degree = np.bincount(labels, weights=g.strength, minlength=k)
    return float(internal.sum() / m - resolution * np.sum((degree / (2.0 * m)) ** 2))


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(p1: Partition, p2: Partition) -> float:
    """Normalised mutual information with arithmetic-mean normalisation.

    Two single-block partitions (both entropies zero) score 1.0.
    """
    if len(p1) != len(p2):
        raise ValueError(f"partitions cover different node sets ({len(p1)} vs {len(p2)})")
    n = len(p1)
    if n == 0:
        raise ValueError("empty partitions")
    a, b = p1.labels, p2.labels
    ka, kb = p1.n_communities, p2.n_communities
    table = np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb).astype(float)
    ha = _entropy(table.sum(axis=1), n)
    hb = _entropy(table.sum(axis=0), n)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    nz = table > 0
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    mi = float(np.sum(table[nz] / n * np.log(table[nz] * n / outer[nz])))
    score = mi / ((ha + hb) / 2.0)
    return min(1.0, max(0.0, score))
