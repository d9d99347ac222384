"""Louvain modularity maximisation (local moves + aggregation).

Node visit order is reshuffled each pass from a seeded generator. A node
moves only when the best target strictly beats staying put; among targets
with equal gain the lowest community id wins.

A single Louvain run can stall in a poor local optimum even on tiny graphs,
so :func:`louvain` performs several independently seeded runs and keeps the
partition with the highest modularity (earliest run on ties).
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from ..graph import FollowerGraph
from .metrics import modularity
from .partition import Partition

logger = logging.getLogger(__name__)

GAIN_EPS = 1e-12
DEFAULT_RESTARTS = 10

# (run, level, pass_no, Q)
PassHook = Callable[[int, int, int, float], None]


class _Level:
    """Working graph for one aggregation level.

    ``nbrs[i]`` maps neighbour -> weight (no self entries); ``loops[i]`` is
    the internal weight folded into node ``i``.
    """

    def __init__(self, nbrs: list[dict[int, float]], loops: list[float]):
        self.nbrs = nbrs
        self.loops = loops
        self.n = len(nbrs)
        self.strength = [sum(nb.values()) + 2.0 * lp for nb, lp in zip(nbrs, loops)]

    @classmethod
    def from_graph(cls, g: FollowerGraph) -> "_Level":
        nbrs: list[dict[int, float]] = [{} for _ in range(g.n)]
        loops = [0.0] * g.n
        for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
            if a == b:
                loops[a] += w
            else:
                nbrs[a][b] = nbrs[a].get(b, 0.0) + w
                nbrs[b][a] = nbrs[b].get(a, 0.0) + w
        return cls(nbrs, loops)

    def modularity(self, comm: list[int], m: float, resolution: float) -> float:
        internal: dict[int, float] = {}
        degree: dict[int, float] = {}
        for i in range(self.n):
            c = comm[i]
            degree[c] = degree.get(c, 0.0) + self.strength[i]
            acc = self.loops[i]
            for j, w in self.nbrs[i].items():
                if j > i and comm[j] == c:
                    acc += w
            internal[c] = internal.get(c, 0.0) + acc
        return sum(internal.values()) / m - resolution * sum((d / (2.0 * m)) ** 2 for d in degree.values())

    def aggregate(self, comm: list[int], k: int) -> "_Level":
        nbrs: list[dict[int, float]] = [{} for _ in range(k)]
        loops = [0.0] * k
        for i in range(self.n):
            ci = comm[i]
            loops[ci] += self.loops[i]
            for j, w in self.nbrs[i].items():
                if j < i:
                    continue
                cj = comm[j]
                if ci == cj:
                    loops[ci] += w
                else:
                    nbrs[ci][cj] = nbrs[ci].get(cj, 0.0) + w
                    nbrs[cj][ci] = nbrs[cj].get(ci, 0.0) + w
        return _Level(nbrs, loops)


def _one_level(level: _Level, m: float, rng: np.random.Generator, resolution: float,
               hook: Callable[[int, int, float], None] | None, level_no: int) -> tuple[list[int], bool]:
    n = level.n
    comm = list(range(n))
    tot = list(level.strength)
    two_m = 2.0 * m
    moved_any = False
    pass_no = 0
    while True:
        moves = 0
        for i in rng.permutation(n).tolist():
            ci = comm[i]
            ki = level.strength[i]
            links: dict[int, float] = {}
            for j, w in level.nbrs[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            stay = links.get(ci, 0.0) - resolution * tot[ci] * ki / two_m
            gains = {c: links[c] - resolution * tot[c] * ki / two_m for c in links if c != ci}
            best_c = ci
            if gains:
                top = max(gains.values())
                if top > stay + GAIN_EPS:
                    best_c = min(c for c, gain in gains.items() if gain >= top - GAIN_EPS)
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moves += 1
        pass_no += 1
        if hook is not None:
            hook(level_no, pass_no, level.modularity(comm, m, resolution))
        if moves == 0:
            break
        moved_any = True
    return comm, moved_any


def _run(g: FollowerGraph, m: float, rng: np.random.Generator, resolution: float,
         hook: Callable[[int, int, float], None] | None) -> np.ndarray:
    level = _Level.from_graph(g)
    node_comm = np.arange(g.n)
    level_no = 0
    while True:
        comm, moved = _one_level(level, m, rng, resolution, hook, level_no)
        if not moved:
            break
        # renumber by first appearance for a deterministic aggregate
        renum: dict[int, int] = {}
        dense = [renum.setdefault(c, len(renum)) for c in comm]
        node_comm = np.asarray(dense, dtype=np.int64)[node_comm]
        if len(renum) == level.n:
            break
        level = level.aggregate(dense, len(renum))
        level_no += 1
        logger.debug("louvain level %d: %d communities", level_no, len(renum))
    return node_comm


def _run_rng(seed: int, run: int) -> np.random.Generator:
    if run == 0:
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence([seed, run]))


def louvain(g: FollowerGraph, seed: int = 0, resolution: float = 1.0,
            on_pass: PassHook | None = None, restarts: int = DEFAULT_RESTARTS) -> Partition:
    """Best of ``restarts`` seeded Louvain runs on ``g`` (top-level partitions).

    ``on_pass(run, level, pass_no, Q)`` is called after every local-moving
    pass with the modularity of the current assignment.
    """
    if g.n == 0:
        raise ValueError("louvain requires a non-empty graph")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m = g.total_weight
    if m <= 0:
        return Partition.singletons(g.n)
    best: Partition | None = None
    best_q = -np.inf
    for run in range(restarts):
        hook = None
        if on_pass is not None:
            def hook(level_no, pass_no, q, run=run):
                on_pass(run, level_no, pass_no, q)
        p = Partition(_run(g, m, _run_rng(seed, run), resolution, hook))
        q = modularity(g, p, resolution)
        if q > best_q + GAIN_EPS:
            best, best_q = p, q
    return best
