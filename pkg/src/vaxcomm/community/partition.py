from __future__ import annotations

import csv
from typing import Iterable, Mapping

import numpy as np


class Partition:
    """Total assignment of node indices to community ids ``0..k-1``.

    Labels are canonicalised on construction: communities are numbered in
    order of their smallest member index, so two partitions describing the
    same grouping compare equal.
    """

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable[int]):
        raw = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels, dtype=np.int64)
        _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        self.labels = rank[inverse.ravel()]
        self.labels.flags.writeable = False

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        groups = [list(g) for g in groups]
        size = n if n is not None else sum(len(g) for g in groups)
        labels = np.full(size, -1, dtype=np.int64)
        for c, members in enumerate(groups):
            labels[members] = c
        if (labels < 0).any():
            raise ValueError("groups do not cover every node")
        return cls(labels)

    @classmethod
    def from_mapping(cls, nodes: Iterable[str], mapping: Mapping[str, object]) -> "Partition":
        keys = {}
        labels = []
        for node in nodes:
            labels.append(keys.setdefault(mapping[node], len(keys)))
        return cls(labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    def __repr__(self) -> str:
        return f"Partition(n={len(self)}, k={self.n_communities})"

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_communities)

    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_communities)]
        for i, c in enumerate(self.labels.tolist()):
            out[c].append(i)
        return out


def write_partition_csv(path, nodes, p: Partition) -> None:
    rows = sorted(zip(nodes, p.labels.tolist()), key=lambda r: (r[1], r[0]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["user_id", "community_id"])
        out.writerows(rows)


def read_partition_csv(path) -> dict[str, int]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"user_id", "community_id"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected header user_id,community_id")
        return {row["user_id"]: int(row["community_id"]) for row in reader}
