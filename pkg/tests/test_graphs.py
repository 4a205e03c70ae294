import math

import numpy as np
import pytest

from conftest import random_tree_graph
from gibbscode.graphs import (LDGM, LDPC, DegreeDistribution, NodeCapExceeded,
                              build_graph, computational_tree, enumerate_saws,
                              graph_distance, load_graph, neighborhood,
                              sample_ensemble, save_graph)


def path_graph():
    return build_graph(2, 1, [(0, 0), (1, 0)], LDGM)


def four_cycle(kind):
    return build_graph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)], kind)


def repetition3():
    return build_graph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)], LDPC)


def test_build_graph_examples():
    g = path_graph()
    assert [len(a) for a in g.adj_var] == [1, 1]
    assert [len(a) for a in g.adj_chk] == [2]
    g3 = repetition3()
    assert g3.kind == LDPC and g3.n_edges == 4
    assert g3.l_max == 2 and g3.k_max == 2


def test_build_graph_errors():
    with pytest.raises(ValueError):
        build_graph(2, 1, [(0, 0), (0, 0)], LDGM)  # duplicate edge
    with pytest.raises(ValueError):
        build_graph(2, 1, [(2, 0)], LDGM)  # out of range
    with pytest.raises(ValueError):
        build_graph(1, 1, [(0, 0)], "turbo")


def test_adjacency_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_tree_graph(rng, LDPC)
        for v in range(g.n_var):
            for c in g.adj_var[v]:
                assert v in g.adj_chk[c]
        for c in range(g.n_chk):
            for v in g.adj_chk[c]:
                assert c in g.adj_var[v]


def test_sample_ensemble_regular_degrees():
    dd = DegreeDistribution.regular(2, 3)
    g = sample_ensemble(dd, 12, LDPC, 7)
    assert g.n_var == 12 and g.n_chk == 8 and g.n_edges == 24
    assert all(len(a) == 2 for a in g.adj_var)
    assert all(len(a) == 3 for a in g.adj_chk)
    # LDGM orientation: n counts checks
    gg = sample_ensemble(dd, 12, LDGM, 7)
    assert gg.n_chk == 12 and gg.n_var == 18


def test_sample_ensemble_deterministic():
    dd = DegreeDistribution.regular(3, 6)
    g1 = sample_ensemble(dd, 12, LDPC, 41)
    g2 = sample_ensemble(dd, 12, LDPC, 41)
    assert g1.edges() == g2.edges()
    assert sample_ensemble(dd, 12, LDPC, 42).edges() != g1.edges()


def test_sample_ensemble_socket_arithmetic():
    # independent socket count: edges = n_var * var_degree = n_chk * chk_degree
    dd = DegreeDistribution.regular(3, 4)
    g = sample_ensemble(dd, 16, LDPC, 3)
    assert g.n_edges == 16 * 3 == g.n_chk * 4


def test_sample_ensemble_unbalanced():
    dd = DegreeDistribution.regular(2, 3)
    with pytest.raises(ValueError):
        sample_ensemble(dd, 10, LDPC, 0)  # 20 sockets not divisible by 3


def test_sample_ensemble_degree_histogram_mixed():
    dd = DegreeDistribution.from_dicts({2: 2 / 3, 3: 1 / 3}, {2: 1.0})
    g = sample_ensemble(dd, 14, LDGM, 5)
    assert g.n_chk == 14 and all(len(a) == 2 for a in g.adj_chk)
    assert sorted(set(len(a) for a in g.adj_var)) in ([2], [3], [2, 3])
    assert sum(len(a) for a in g.adj_var) == 28


def test_graph_distance():
    g = repetition3()
    assert graph_distance(g, 0, 0) == 0
    assert graph_distance(g, 0, 2) == 2
    g2 = build_graph(2, 2, [(0, 0), (1, 1)], LDPC)
    assert math.isinf(graph_distance(g2, 0, 1))


def test_neighborhood():
    g = repetition3()
    sub, is_tree, boundary, vm, cm = neighborhood(g, ("var", 0), 0)
    assert sub.n_var == 1 and sub.n_chk == 0 and is_tree
    g4 = four_cycle(LDPC)
    sub, is_tree, boundary, vm, cm = neighborhood(g4, ("var", 0), 2)
    assert sub.n_var == 2 and sub.n_chk == 2 and not is_tree
    sub, is_tree, *_ = neighborhood(g, ("var", 1), 4)
    assert is_tree
    with pytest.raises(ValueError):
        neighborhood(g, ("var", 0), 3)


def test_computational_tree_on_tree_matches_neighborhood():
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = random_tree_graph(rng, LDPC)
        d = 4
        ct = computational_tree(g, 0, d)
        sub, is_tree, *_ = neighborhood(g, ("var", 0), d)
        assert is_tree
        assert ct.n_nodes == sub.n_var + sub.n_chk


def test_computational_tree_unrolls_cycles():
    g4 = four_cycle(LDPC)
    ct = computational_tree(g4, 0, 4)
    # the projection is 2-to-1 beyond the cycle length
    assert ct.n_nodes > 4
    counts = {}
    for typ, img in zip(ct.node_type, ct.proj):
        counts[(typ, img)] = counts.get((typ, img), 0) + 1
    assert max(counts.values()) >= 2
    # every tree edge projects to a graph edge
    for k in range(1, ct.n_nodes):
        pk = ct.parent[k]
        v, c = (ct.proj[k], ct.proj[pk]) if ct.node_type[k] == "var" else \
            (ct.proj[pk], ct.proj[k])
        assert c in g4.adj_var[v]
    assert computational_tree(g4, 0, 0).n_nodes == 1


def test_computational_tree_node_cap():
    g4 = four_cycle(LDPC)
    with pytest.raises(NodeCapExceeded):
        computational_tree(g4, 0, 100, node_cap=10)


def test_saw_examples():
    g = path_graph()
    walks = enumerate_saws(g, {0}, {1}, 5)
    assert len(walks) == 1 and walks[0].length == 1
    g4 = four_cycle(LDGM)
    walks = enumerate_saws(g4, {0}, {1}, 5)
    assert len(walks) == 2 and all(w.length == 1 for w in walks)
    trivial = enumerate_saws(g, {0}, {0}, 5)
    assert len(trivial) == 1 and trivial[0].length == 0


def test_saw_invariants():
    rng = np.random.default_rng(2)
    from conftest import random_ldgm_graph
    for _ in range(25):
        g = random_ldgm_graph(rng)
        A = set(int(x) for x in rng.choice(g.n_var, rng.integers(1, 3), replace=False))
        B = set(int(x) for x in rng.choice(g.n_var, rng.integers(1, 3), replace=False))
        K = g.l_max * g.k_max
        prev = 0
        for max_len in range(0, g.n_chk + 1):
            walks = enumerate_saws(g, A, B, max_len)
            assert len(walks) >= prev  # monotone in max_len
            prev = len(walks)
        by_len = {}
        for w in walks:
            by_len[w.length] = by_len.get(w.length, 0) + 1
            # replay the walk against adjacency; verify self-avoidance
            assert len(set(w.vars)) == len(w.vars)
            assert len(set(w.chks)) == len(w.chks)
            assert w.vars[0] in A and w.vars[-1] in B
            assert w.n_vars == w.length + 1
            for m in range(w.length):
                assert w.chks[m] in g.adj_var[w.vars[m]]
                assert w.vars[m + 1] in g.adj_chk[w.chks[m]]
        for L, cnt in by_len.items():
            assert cnt <= len(A) * max(K, 1) ** L


def test_serialization_roundtrip(tmp_path):
    g = repetition3()
    path = tmp_path / "code.txt"
    save_graph(g, path)
    g2 = load_graph(path)
    assert g2.kind == g.kind and g2.edges() == g.edges()
    assert path.read_text().splitlines()[0] == "ldpc 3 2"
