import itertools
import json

import numpy as np
import pytest

from conftest import graph_from
from vaxcomm.community import (
    Partition,
    RefinementConfig,
    louvain,
    merge_small,
    refine,
    split_large,
)
from vaxcomm.community.partition import read_partition_csv, write_partition_csv
from vaxcomm.graph import build_follower_graph
from vaxcomm.synth import PlantedPartitionSpec, gen_graph


def test_config_validation():
    with pytest.raises(ValueError):
        RefinementConfig(max_size=5, min_size=6)
    with pytest.raises(ValueError):
        RefinementConfig(max_rounds=0)


def test_split_identity_when_compliant(two_triangles):
    p = Partition([0, 0, 0, 1, 1, 1])
    assert split_large(two_triangles, p, RefinementConfig(max_size=3, min_size=1)) is p


def test_split_two_triangles(two_triangles):
    out = split_large(two_triangles, Partition([0] * 6), RefinementConfig(max_size=4, min_size=1))
    assert out == Partition([0, 0, 0, 1, 1, 1])


def test_clique_fallback_halves():
    nodes = [f"k{i:02d}" for i in range(12)]
    g = graph_from([(a, b, 1.0) for a, b in itertools.combinations(nodes, 2)])
    stats = {"split": 0, "fallback": 0}
    out = split_large(g, Partition([0] * 12), RefinementConfig(max_size=10, min_size=1), stats)
    assert sorted(out.sizes.tolist()) == [6, 6]
    assert stats["fallback"] == 1


def merge_fixture(b_weight=1.0):
    # A = a1..a4, B = b1..b4 (each internally a chain), small c = {c}
    edges = [("a1", "a2", 5.0), ("a2", "a3", 5.0), ("a3", "a4", 5.0),
             ("b1", "b2", 5.0), ("b2", "b3", 5.0), ("b3", "b4", 5.0),
             ("c", "a1", 3.0), ("c", "b1", b_weight)]
    g = graph_from(edges)
    groups = {"a": [], "b": [], "c": []}
    for i, name in enumerate(g.nodes):
        groups[name[0]].append(i)
    return g, groups


def test_merge_prefers_heavier_neighbour():
    g, groups = merge_fixture()
    p = Partition.from_groups([groups["a"], groups["b"], groups["c"]], g.n)
    out = merge_small(g, p, RefinementConfig(max_size=100, min_size=2))
    assert out == Partition.from_groups([groups["a"] + groups["c"], groups["b"]], g.n)


def test_merge_respects_cap():
    g = graph_from([("s", "a1", 1.0), ("a1", "a2", 1.0), ("a2", "a3", 1.0)])
    idx = g.index
    p = Partition.from_groups([[idx["a1"], idx["a2"], idx["a3"]], [idx["s"]]], g.n)
    stats = {"stuck": 0}
    out = merge_small(g, p, RefinementConfig(max_size=3, min_size=2), stats)
    assert out == p
    assert stats["stuck"] == 1


def test_merge_falls_to_feasible_neighbour():
    # heavier neighbour A would exceed the cap, so c goes to B
    g = graph_from([("a1", "a2", 5.0), ("a2", "a3", 5.0), ("a3", "a4", 5.0), ("b1", "b2", 5.0),
                    ("c", "a1", 3.0), ("c", "b1", 1.0)])
    idx = g.index
    A = [idx[x] for x in ("a1", "a2", "a3", "a4")]
    B = [idx["b1"], idx["b2"]]
    p = Partition.from_groups([A, B, [idx["c"]]], g.n)
    out = merge_small(g, p, RefinementConfig(max_size=4, min_size=2))
    assert out == Partition.from_groups([A, B + [idx["c"]]], g.n)


def test_singleton_absorbed_by_unique_neighbour():
    g = graph_from([("s", "a1", 0.2), ("a1", "a2", 1.0), ("a2", "a3", 1.0)])
    idx = g.index
    p = Partition.from_groups([[idx["a1"], idx["a2"], idx["a3"]], [idx["s"]]], g.n)
    out = merge_small(g, p, RefinementConfig(max_size=10, min_size=2))
    assert out == Partition([0] * 4)


def test_refine_fixpoint_on_compliant(two_triangles):
    res = refine(two_triangles, RefinementConfig(max_size=10, min_size=1))
    assert res.fixpoint and res.rounds == 1
    assert res.partition == louvain(two_triangles)
    assert res.log[0]["modularity"] == pytest.approx(0.5)


def test_refine_caps_giant_block():
    pg = gen_graph(PlantedPartitionSpec(n=300, k=4, p_in=0.3, p_out=0.005, seed=1, sizes=(150, 50, 50, 50)))
    g = build_follower_graph(pg.edges, extra_nodes=pg.users)
    cfg = RefinementConfig(max_size=50, min_size=3, max_rounds=20, seed=1)
    res = refine(g, cfg)
    assert res.partition.sizes.max() <= 50
    assert res.rounds <= 20
    assert len(res.partition) == g.n
    again = refine(g, cfg)
    assert again.partition == res.partition and again.log == res.log
    json.dumps(res.log)


def test_partition_csv_roundtrip(tmp_path):
    nodes = ["b", "a", "c"]
    p = Partition([1, 0, 1])
    write_partition_csv(tmp_path / "p.csv", nodes, p)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "user_id,community_id"
    assert read_partition_csv(tmp_path / "p.csv") == {"b": 0, "c": 0, "a": 1}


def test_partition_canonical_ids():
    assert np.array_equal(Partition([5, 5, 2, 9]).labels, [0, 0, 1, 2])
    assert Partition.from_groups([[2], [0, 1]]) == Partition([0, 0, 1])
    with pytest.raises(ValueError):
        Partition.from_groups([[0]], 2)
