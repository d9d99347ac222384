"""Size-constrained refinement of a Louvain partition.

Oversized communities are cut out and re-clustered on their own; small
communities are folded into the neighbour they share the most edge weight
with. The two steps alternate until the assignment stops changing.
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..graph import FollowerGraph
from .louvain import DEFAULT_RESTARTS, louvain
from .metrics import modularity
from .partition import Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RefinementConfig:
    max_size: int = 10_000
    min_size: int = 100
    max_rounds: int = 20
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS

    def __post_init__(self):
        if self.max_size <= 1:
            raise ValueError("max_size must be > 1")
        if not 1 <= self.min_size <= self.max_size:
            raise ValueError("need 1 <= min_size <= max_size")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class RefinementResult:
    partition: Partition
    rounds: int
    fixpoint: bool
    log: list[dict] = field(default_factory=list)


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([abs(int(p)) for p in parts]).generate_state(1, dtype=np.uint64)[0])


def _fallback_chunks(sub: FollowerGraph, members: list[int], max_size: int) -> list[list[int]]:
    # strongest members first; ties by original index
    order = sorted(range(len(members)), key=lambda i: (-sub.strength[i], members[i]))
    n_chunks = math.ceil(len(members) / max_size)
    return [[members[i] for i in chunk] for chunk in np.array_split(np.array(order), n_chunks)]


def _split_group(g: FollowerGraph, members: list[int], cfg: RefinementConfig, seed: int,
                 stats: dict) -> list[list[int]]:
    out: list[list[int]] = []
    stack = [sorted(members)]
    while stack:
        group = stack.pop()
        if len(group) <= cfg.max_size:
            out.append(group)
            continue
        sub = g.subgraph(group)
        pieces = louvain(sub, seed=_derive_seed(seed, len(group), group[0]), restarts=cfg.restarts).groups()
        if len(pieces) == 1:
            stats["fallback"] += 1
            out.extend(_fallback_chunks(sub, group, cfg.max_size))
            continue
        stack.extend([group[i] for i in piece] for piece in reversed(pieces))
    return sorted(out, key=lambda grp: grp[0])


def split_large(g: FollowerGraph, p: Partition, cfg: RefinementConfig, stats: dict | None = None) -> Partition:
    """Re-cluster every community larger than ``cfg.max_size``.

    Pieces that are still oversized are split again; a subgraph on which
    Louvain finds no structure is cut into ``ceil(size / max_size)`` chunks
    ordered by within-community strength.
    """
    stats = stats if stats is not None else defaultdict(int)
    groups = p.groups()
    if all(len(grp) <= cfg.max_size for grp in groups):
        return p
    out = []
    for cid, members in enumerate(groups):
        if len(members) <= cfg.max_size:
            out.append(members)
        else:
            stats["split"] += 1
            out.extend(_split_group(g, members, cfg, _derive_seed(cfg.seed, cid), stats))
    return Partition.from_groups(out, g.n)


def community_weights(g: FollowerGraph, labels: np.ndarray) -> dict[int, dict[int, float]]:
    """Total edge weight between each pair of distinct communities."""
    acc: dict[int, dict[int, float]] = defaultdict(dict)
    lu, lv = labels[g.u], labels[g.v]
    cross = lu != lv
    for a, b, w in zip(lu[cross].tolist(), lv[cross].tolist(), g.w[cross].tolist()):
        acc[a][b] = acc[a].get(b, 0.0) + w
        acc[b][a] = acc[b].get(a, 0.0) + w
    return acc


def merge_small(g: FollowerGraph, p: Partition, cfg: RefinementConfig, stats: dict | None = None) -> Partition:
    """Fold communities smaller than ``cfg.min_size`` into their heaviest neighbour.

    Smallest community first (ties: lowest id). Only neighbours whose merged
    size stays within ``cfg.max_size`` are eligible; among them the largest
    shared weight wins, ties to the lowest id. Communities with no eligible
    neighbour are left alone.
    """
    stats = stats if stats is not None else defaultdict(int)
    size = p.sizes.tolist()
    weights = community_weights(g, p.labels)
    parent = list(range(len(size)))
    heap = [(s, c) for c, s in enumerate(size) if s < cfg.min_size]
    heapq.heapify(heap)
    while heap:
        s, c = heapq.heappop(heap)
        if parent[c] != c or size[c] != s:
            continue  # stale entry
        nbrs = weights.get(c, {})
        options = [(w, d) for d, w in nbrs.items() if size[c] + size[d] <= cfg.max_size]
        if not options:
            stats["stuck"] += 1
            continue
        target = min(options, key=lambda o: (-o[0], o[1]))[1]
        parent[c] = target
        size[target] += size[c]
        size[c] = 0
        tw = weights.setdefault(target, {})
        for d, w in nbrs.items():
            del weights[d][c]
            if d == target:
                continue
            tw[d] = tw.get(d, 0.0) + w
            weights[d][target] = weights[d].get(target, 0.0) + w
        weights.pop(c, None)
        tw.pop(target, None)
        stats["merged"] += 1
        if size[target] < cfg.min_size:
            heapq.heappush(heap, (size[target], target))

    def root(c: int) -> int:
        while parent[c] != c:
            c = parent[c]
        return c

    mapping = np.array([root(c) for c in range(len(parent))], dtype=np.int64)
    return Partition(mapping[p.labels])


def _size_histogram(sizes: np.ndarray) -> dict[str, int]:
    hist: dict[str, int] = {}
    for s in sorted(sizes.tolist()):
        lo = 1 << (int(s).bit_length() - 1)
        key = str(lo) if lo == 1 else f"{lo}-{2 * lo - 1}"
        hist[key] = hist.get(key, 0) + 1
    return hist


def refine(g: FollowerGraph, cfg: RefinementConfig, initial: Partition | None = None) -> RefinementResult:
    """Louvain followed by alternating split/merge rounds until nothing changes."""
    p = initial if initial is not None else louvain(g, seed=cfg.seed, restarts=cfg.restarts)
    log = []
    fixpoint = False
    rounds = 0
    for rounds in range(1, cfg.max_rounds + 1):
        stats: dict = defaultdict(int)
        split = split_large(g, p, cfg, stats)
        merged = merge_small(g, split, cfg, stats)
        record = {
            "round": rounds,
            "n_communities": merged.n_communities,
            "max_size": int(merged.sizes.max()),
            "sizes": _size_histogram(merged.sizes),
            "modularity": modularity(g, merged) if g.total_weight > 0 else None,
            **{k: stats.get(k, 0) for k in ("split", "fallback", "merged", "stuck")},
        }
        log.append(record)
        changed = merged != p
        p = merged
        if not changed:
            fixpoint = True
            break
    if not fixpoint:
        logger.warning("refinement hit max_rounds=%d without reaching a fixpoint", cfg.max_rounds)
    return RefinementResult(partition=p, rounds=rounds, fixpoint=fixpoint, log=log)
