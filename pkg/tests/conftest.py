"""Shared corpora and generators for the test suite."""

import numpy as np
import pytest

from gibbscode.graphs import LDGM, LDPC, build_graph


def random_tree_graph(rng, kind, max_code_bits=15):
    """A uniformly grown bipartite tree Tanner graph: each new node
    attaches to a random existing node of the opposite type."""
    if kind == LDPC:
        n_var = int(rng.integers(2, max_code_bits + 1))
        n_chk = int(rng.integers(1, n_var))
    else:
        n_chk = int(rng.integers(2, max_code_bits + 1))
        n_var = int(rng.integers(1, n_chk + 1))
    order = ["var"] * (n_var - 1) + ["chk"] * (n_chk - 1)
    rng.shuffle(order)
    order = ["chk"] + order  # a check goes first so variables can attach
    # node 0 is variable 0; checks attach to variables and vice versa
    placed_vars, placed_chks = [0], []
    edges = []
    vnext, cnext = 1, 0
    for typ in order:
        if typ == "chk":
            c = cnext
            cnext += 1
            v = int(rng.choice(placed_vars))
            edges.append((v, c))
            placed_chks.append(c)
        else:
            v = vnext
            vnext += 1
            c = int(rng.choice(placed_chks))
            edges.append((v, c))
            placed_vars.append(v)
    return build_graph(n_var, n_chk, edges, kind)


def random_ldpc_graph(rng, n_max=12, m_max=8, deg_lo=2, deg_hi=3):
    """Small random LDPC graph with per-check degrees in [deg_lo, deg_hi]."""
    n = int(rng.integers(3, n_max + 1))
    m = int(rng.integers(1, min(n, m_max) + 1))
    edges = set()
    for c in range(m):
        deg = int(rng.integers(deg_lo, deg_hi + 1))
        for v in rng.choice(n, deg, replace=False):
            edges.add((int(v), c))
    return build_graph(n, m, sorted(edges), LDPC)


def random_ldgm_graph(rng, m_max=6, n_max=8, deg_hi=3):
    """Small random LDGM graph; every check keeps at least one variable."""
    m = int(rng.integers(2, m_max + 1))
    n = int(rng.integers(2, n_max + 1))
    edges = set()
    for c in range(n):
        deg = int(rng.integers(1, min(m, deg_hi) + 1))
        for v in rng.choice(m, deg, replace=False):
            edges.add((int(v), c))
    return build_graph(m, n, sorted(edges), LDGM)


def tiny_ldpc_no_isolated(rng, n_hi=6, m_hi=6):
    """Tiny LDPC instance generator for the dual identity corpus; every
    variable touches at least one check."""
    n = int(rng.integers(2, n_hi + 1))
    m = int(rng.integers(1, m_hi + 1))
    edges = set()
    for c in range(m):
        deg = int(rng.integers(1, min(n, 3) + 1))
        for v in rng.choice(n, deg, replace=False):
            edges.add((int(v), c))
    for v in range(n):
        if not any(e[0] == v for e in edges):
            edges.add((v, int(rng.integers(m))))
    return build_graph(n, m, sorted(edges), LDPC)


# ----- fixed small codes used by the GEXIT oracle suite --------------------

def fixed_code_corpus():
    """Five fixed small codes mixing the two families."""
    rep3 = build_graph(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)], LDPC)
    ldpc5 = build_graph(5, 3, [(0, 0), (1, 0), (2, 0), (2, 1), (3, 1),
                               (3, 2), (4, 2), (0, 2)], LDPC)
    ldpc6 = build_graph(6, 4, [(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (4, 1),
                               (4, 2), (5, 2), (0, 2), (1, 3), (3, 3), (5, 3)], LDPC)
    ldgm_chain = build_graph(3, 5, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2),
                                    (2, 3), (0, 4), (2, 4)], LDGM)
    ldgm_loop = build_graph(4, 7, [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2),
                                   (3, 3), (0, 3), (0, 4), (2, 4), (1, 5), (3, 6)],
                            LDGM)
    return [("ldpc-rep3", rep3), ("ldpc-5", ldpc5), ("ldpc-6", ldpc6),
            ("ldgm-chain", ldgm_chain), ("ldgm-loop", ldgm_loop)]


@pytest.fixture(scope="session")
def small_codes():
    return fixed_code_corpus()
