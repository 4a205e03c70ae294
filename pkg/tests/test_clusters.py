import math

import numpy as np
import pytest

from conftest import random_ldgm_graph, tiny_ldpc_no_isolated
from gibbscode.channels import ChannelModel, default_H, sample_llr
from gibbscode.clusters import (BadSet, ClusterTerm, berretti_avg_bound,
                                berretti_identity_residual, berretti_term,
                                dkp_avg_bound, dkp_pointwise_bound,
                                enumerate_clusters, replica_decomposition_residual,
                                replica_g_sums)
from gibbscode.exact import make_instance, spin_product_correlation
from gibbscode.graphs import LDGM, LDPC, build_graph


def test_bad_set():
    g = build_graph(2, 3, [(0, 0), (0, 1), (1, 1), (1, 2)], LDGM)
    inst = make_instance(g, [0.5, -2.0, 0.1])
    assert BadSet.from_instance(inst, 1.0).members == {1}
    assert BadSet.from_instance(inst, 3.0).members == set()


def test_dkp_pointwise_examples():
    g = build_graph(2, 1, [(0, 0), (1, 0)], LDGM)
    inst = make_instance(g, [0.1])
    b, truncated = dkp_pointwise_bound(inst, {0}, {1}, 1.0)
    assert not truncated
    assert b == pytest.approx(2 * (math.exp(0.4) - 1))
    assert abs(spin_product_correlation(inst, {0}, {1})) <= b
    # trivial walk: A = B
    b0, _ = dkp_pointwise_bound(inst, {0}, {0}, 1.0)
    assert b0 == pytest.approx(2.0)
    # everything bad: rho = 1 on every walk
    bb, _ = dkp_pointwise_bound(make_instance(g, [5.0]), {0}, {1}, 1.0)
    assert bb == pytest.approx(2.0)
    # truncation flag
    _, tr = dkp_pointwise_bound(inst, {0}, {1}, 1.0, max_len=0)
    assert tr


def test_dkp_pointwise_dominance_random():
    rng = np.random.default_rng(0)
    for _ in range(150):
        g = random_ldgm_graph(rng)
        inst = make_instance(g, rng.normal(0, 1.2, g.n_chk))
        i, j = rng.choice(g.n_chk, 2, replace=False)
        A, B = set(g.adj_chk[int(i)]), set(g.adj_chk[int(j)])
        H = float(rng.uniform(0.3, 2.0))
        corr = abs(spin_product_correlation(inst, A, B))
        bound, _ = dkp_pointwise_bound(inst, A, B, H)
        assert corr <= bound + 1e-12


def test_dkp_avg_bound():
    ch = ChannelModel("bsc", 0.49)
    # ring of degree-2 checks: K = l_max k_max = 4
    m = 6
    edges = [(v, v) for v in range(m)] + [((v + 1) % m, v) for v in range(m)]
    g = build_graph(m, m, edges, LDGM)
    H = 0.5 * math.log((1 - 0.49) / 0.49)
    b, diverged = dkp_avg_bound(g, ch, {0}, {3}, H)
    assert not diverged
    # mean of the pointwise bound is below the averaged closed form
    rng = np.random.default_rng(1)
    vals = []
    for s in range(1500):
        inst = make_instance(g, sample_llr(ch, m, rng).values)
        vals.append(dkp_pointwise_bound(inst, {0}, {3}, H)[0])
    assert np.mean(vals) <= b * (1 + 1e-6)
    # diverged flag when K delta >= 1
    b2, diverged2 = dkp_avg_bound(g, ch, {0}, {3}, 2.0)
    assert diverged2 and math.isinf(b2)
    # zero-distance closed form
    b3, _ = dkp_avg_bound(g, ch, {0}, {0}, H)
    from gibbscode.channels import delta_high
    kd = 4 * delta_high(ch, H)
    assert b3 == pytest.approx(2.0 / (1 - kd))
    # disconnected sets
    g2 = build_graph(2, 2, [(0, 0), (1, 1)], LDGM)
    assert dkp_avg_bound(g2, ch, {0}, {1}, H)[0] == 0.0


def test_enumerate_clusters_shared_check():
    # i, j adjacent through one shared check
    g = build_graph(2, 1, [(0, 0), (1, 0)], LDPC)
    terms = enumerate_clusters(g, 0, 1)
    assert len(terms) == 1
    term = terms[0]
    assert term.xhat == frozenset({0})
    # Y = {0,1} generates Gamma = {0,1}, {0}, {1}, {}
    assert sorted(map(sorted, term.gammas)) == [[], [0], [0, 1], [1]]
    assert all(w == () for w in term.witnesses)


def test_enumerate_clusters_disconnected():
    g = build_graph(2, 2, [(0, 0), (1, 1)], LDPC)
    assert enumerate_clusters(g, 0, 1) == []


def test_enumerate_clusters_chain_witness():
    # i - c0 - v - c1 - j: the interior witness is the middle variable
    g = build_graph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)], LDPC)
    terms = enumerate_clusters(g, 0, 2)
    assert len(terms) == 1
    term = terms[0]
    assert term.xhat == frozenset({0, 1})
    assert all(w == (1,) for w in term.witnesses)
    # every compatible Gamma must contain the connecting interior node
    assert all(1 in gset for gset in term.gammas)
    # compatibility conditions hold for each stored Gamma
    for gset in term.gammas:
        boundary = set()
        for v in gset:
            boundary.update(g.adj_var[v])
        assert boundary | set(g.adj_var[0]) | set(g.adj_var[2]) == set(term.xhat)


def test_berretti_term_vanishing_cases():
    # non-adjacent bits with all l large: every compatible Gamma is
    # nonempty, so each E_k factor kills the term
    g = build_graph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)], LDPC)
    inst = make_instance(g, [30.0, 30.0, 30.0])
    for term in enumerate_clusters(g, 0, 2):
        K, _, _ = berretti_term(inst, term, 0, 2)
        assert abs(K) < 1e-20


def test_berretti_identity_tiny_corpus():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(30):
        g = tiny_ldpc_no_isolated(rng)
        l = rng.uniform(-2, 2, g.n_var)
        i, j = (int(x) for x in rng.choice(g.n_var, 2, replace=False))
        worst = max(worst, berretti_identity_residual(make_instance(g, l), i, j))
    assert worst < 1e-8


def test_berretti_identity_double_evaluation():
    # two-variable single-check toy: K assembled from the term evaluator
    # must close the identity computed from the dual brackets
    g = build_graph(2, 1, [(0, 0), (1, 0)], LDPC)
    inst = make_instance(g, [0.5, 0.3])
    assert berretti_identity_residual(inst, 0, 1) < 1e-12


def test_berretti_avg_bound():
    cha = ChannelModel("biawgnc", 0.01)
    chain = build_graph(6, 5, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2),
                               (3, 3), (4, 3), (4, 4), (5, 4)], LDPC)
    bounds = []
    for j in (1, 3, 5):
        b, diverged = berretti_avg_bound(chain, cha, 0, j, 0.1)
        assert not diverged
        bounds.append(b)
    assert bounds[0] > bounds[1] > bounds[2]  # geometric decay in distance
    # the assembled 2^{(2+k_max)|X|} K^{|X|} constants force the diverged
    # flag on the BSC even at low noise (Delta ~ eps^{2s} decays too
    # slowly), so the dominance property is testable only on the BIAWGNC
    for eps in (0.3, 0.05):
        _, diverged = berretti_avg_bound(chain, ChannelModel("bsc", eps), 0, 5, 0.1)
        assert diverged
    with pytest.raises(ValueError):
        berretti_avg_bound(chain, cha, 0, 5, 0.7)


def test_berretti_avg_bound_dominates_truth():
    """Averaged truth <= bound whenever the bound converges (BIAWGNC at
    low noise on a small chain code)."""
    cha = ChannelModel("biawgnc", 0.01)
    chain = build_graph(5, 4, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2),
                               (3, 3), (4, 3)], LDPC)
    b, diverged = berretti_avg_bound(chain, cha, 0, 2, 0.1)
    assert not diverged
    rng = np.random.default_rng(3)
    vals = []
    from gibbscode.exact import pair_correlation
    for s in range(2000):
        inst = make_instance(chain, sample_llr(cha, 5, rng).values)
        vals.append(abs(pair_correlation(inst, 0, 2)))
    assert np.mean(vals) <= b


def test_replica_decomposition_and_vanishing():
    rng = np.random.default_rng(4)
    worst_nc = worst_id = 0.0
    for _ in range(25):
        g = random_ldgm_graph(rng)
        inst = make_instance(g, rng.normal(0, 1.0, g.n_chk))
        i, j = rng.choice(g.n_chk, 2, replace=False)
        A, B = set(g.adj_chk[int(i)]), set(g.adj_chk[int(j)])
        H = float(rng.uniform(0.5, 1.5))
        con, noncon = replica_g_sums(inst, A, B, H)
        worst_nc = max(worst_nc, abs(noncon))
        worst_id = max(worst_id, replica_decomposition_residual(inst, A, B, H))
    assert worst_nc < 1e-12   # non-connecting terms vanish identically
    assert worst_id < 1e-10   # the full G-sum reproduces the correlation
