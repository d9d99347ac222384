"""Follower network construction.

Each user's outgoing follow edges share a total weight of 1. The directed
graph is then collapsed to an undirected graph whose edge weight is the sum
of both directions.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy import sparse

from .ingest import FollowerEdge

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class DirectedGraph:
    nodes: tuple[str, ...]
    out_edges: dict[str, tuple[tuple[str, float], ...]]

    def out_weight(self, node: str) -> float:
        return sum(w for _, w in self.out_edges.get(node, ()))

    def total_weight(self) -> float:
        return float(sum(w for edges in self.out_edges.values() for _, w in edges))

    def in_degree(self) -> dict[str, int]:
        """Number of followers per user (unweighted in-degree)."""
        deg = dict.fromkeys(self.nodes, 0)
        for edges in self.out_edges.values():
            for target, _ in edges:
                deg[target] += 1
        return deg


def build_directed(edges: Iterable[FollowerEdge]) -> DirectedGraph:
    targets: dict[str, set[str]] = defaultdict(set)
    nodes: set[str] = set()
    for e in edges:
        if e.from_user == e.to_user:
            continue
        targets[e.from_user].add(e.to_user)
        nodes.add(e.from_user)
        nodes.add(e.to_user)
    out = {}
    for src in sorted(targets):
        k = len(targets[src])
        out[src] = tuple((t, 1.0 / k) for t in sorted(targets[src]))
    return DirectedGraph(nodes=tuple(sorted(nodes)), out_edges=out)


class FollowerGraph:
    """Weighted undirected graph over dense integer node indices.

    ``nodes[i]`` is the original user id of index ``i``. Edges are stored once
    with ``u < v``; self-loops (``u == v``) are permitted so that aggregated
    graphs can carry intra-community weight. A self-loop of weight ``w``
    contributes ``2w`` to its node's strength.
    """

    def __init__(self, nodes: Iterable[str], u, v, w):
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.index = {n: i for i, n in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise ValueError("duplicate node ids")
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if len(w) and (w <= 0).any():
            raise ValueError("edge weights must be positive")
        # canonical order + merge duplicate pairs
        n = len(self.nodes)
        if len(w):
            key = lo * max(n, 1) + hi
            order = np.lexsort((hi, lo))
            key, lo, hi, w = key[order], lo[order], hi[order], w[order]
            uniq, start = np.unique(key, return_index=True)
            w = np.add.reduceat(w, start)
            lo, hi = lo[start], hi[start]
        self.u, self.v, self.w = lo, hi, w
        for arr in (self.u, self.v, self.w):
            arr.flags.writeable = False

    @classmethod
    def from_weighted_edges(cls, edges: Iterable[tuple], nodes: Iterable[str] | None = None) -> "FollowerGraph":
        edges = [(str(a), str(b), float(w)) for a, b, w in edges]
        ids = set(nodes or ())
        for a, b, _ in edges:
            ids.add(a)
            ids.add(b)
        ordered = sorted(ids)
        index = {n: i for i, n in enumerate(ordered)}
        return cls(
            ordered,
            [index[a] for a, _, _ in edges],
            [index[b] for _, b, _ in edges],
            [w for _, _, w in edges],
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.w)

    @cached_property
    def total_weight(self) -> float:
        return float(self.w.sum())

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric CSR matrix; diagonal holds ``2w`` for a self-loop of weight ``w``."""
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.concatenate([self.w, self.w])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def strength(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def weight(self, a: str, b: str) -> float:
        i, j = self.index[a], self.index[b]
        if i > j:
            i, j = j, i
        hit = np.flatnonzero((self.u == i) & (self.v == j))
        return float(self.w[hit[0]]) if len(hit) else 0.0

    def edges(self):
        for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            yield self.nodes[a], self.nodes[b], w

    def subgraph(self, members: Iterable[int]) -> "FollowerGraph":
        """Induced subgraph on the given node indices, in ascending index order."""
        members = np.array(sorted(set(members)), dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[members] = np.arange(len(members))
        keep = (local[self.u] >= 0) & (local[self.v] >= 0)
        return FollowerGraph(
            [self.nodes[i] for i in members], local[self.u[keep]], local[self.v[keep]], self.w[keep]
        )

    def with_nodes(self, extra: Iterable[str]) -> "FollowerGraph":
        """Copy with additional isolated nodes; existing indices are remapped by id order."""
        ids = sorted(set(self.nodes) | set(extra))
        index = {n: i for i, n in enumerate(ids)}
        remap = np.array([index[n] for n in self.nodes], dtype=np.int64)
        if not len(remap):
            return FollowerGraph(ids, [], [], [])
        return FollowerGraph(ids, remap[self.u], remap[self.v], self.w)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["u", "v", "w"])
            for a, b, w in self.edges():
                out.writerow([a, b, repr(w)])


def symmetrize(g: DirectedGraph) -> FollowerGraph:
    """Drop edge direction, summing ``w(a->b) + w(b->a)`` per unordered pair."""
    index = {n: i for i, n in enumerate(g.nodes)}
    u, v, w = [], [], []
    for src, edges in g.out_edges.items():
        for dst, wt in edges:
            u.append(index[src])
            v.append(index[dst])
            w.append(wt)
    return FollowerGraph(g.nodes, u, v, w)


def build_follower_graph(edges: Iterable[FollowerEdge], extra_nodes: Iterable[str] = ()) -> FollowerGraph:
    g = symmetrize(build_directed(edges))
    extra = set(extra_nodes) - set(g.nodes)
    return g.with_nodes(extra) if extra else g
