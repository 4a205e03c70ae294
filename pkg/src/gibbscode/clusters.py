"""Executable cluster expansions: the self-avoiding-walk (DKP) bound for
LDGM correlations and the Berretti expansion for the LDPC dual bracket.

DKP side (LDGM, high noise).  For variable sets A, B and a threshold H,

    |<u_A u_B> - <u_A><u_B>|  <=  2 sum_{w in W_AB} prod_{c in w} rho_c

where W_AB are the self-avoiding walks from A to B, the product runs over
the CHECK nodes of the walk, rho_c = 1 when |l_c| > H ("bad" checks) and
rho_c = e^{4|l_c|} - 1 otherwise.  Averaging over the noise replaces
rho_c by delta(eps, H) and counting walks by K^len (K = l_max k_max)
gives the closed geometric form of dkp_avg_bound.

Berretti side (LDPC dual, low noise).  With two spin replicas on the
dual system,

    <tau_i tau_j>_dual - <tau_i>_dual <tau_j>_dual
        = (1/2) sum_{Xhat} K_ij(Xhat) (Z_dual(Xhat^c) / Z_dual)^2

where Xhat ranges over check clusters of the form boundary(Y) for
hyperedge-connected variable sets Y containing i and j, and K_ij sums
(tau_i^1 - tau_i^2)(tau_j^1 - tau_j^2) prod_{k in Gamma} E_k over the
replica pair restricted to Xhat and over the compatible Gamma, with
E_k = e^{-2 l_k}(tau_k^1 + tau_k^2) + e^{-4 l_k} tau_k^1 tau_k^2.

Compatibility is implemented in the exact form required for the identity
to close: Gamma is compatible with Xhat iff Gamma | {i, j} is
hyperedge-connected and its boundary together with d(i), d(j) equals
Xhat exactly.  (Gamma may contain i or j; Gamma = empty is compatible
precisely when i and j share a check.)  This subsumes the walk condition:
the connecting walk is witnessed and stored with each term.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channels import delta_dual, delta_high
from .duality import DualInstance, dual_bracket, dual_partition
from .exact import partition_function, spin_product_correlation
from .graphs import (LDGM, LDPC, EnumerationCapExceeded, enumerate_saws,
                     graph_distance, same_type_distance)

#: default cap on |Y| = |Gamma| + endpoints during cluster enumeration
CLUSTER_SIZE_CAP = 10

#: replica enumeration refuses above this cluster size (4^size pairs)
REPLICA_CAP = 10


@dataclass(frozen=True)
class BadSet:
    """Code-bit nodes whose |l| exceeds the threshold H."""

    threshold: float
    members: frozenset

    @classmethod
    def from_instance(cls, inst, H):
        l = inst.values
        return cls(H, frozenset(int(i) for i in np.flatnonzero(np.abs(l) > H)))


# ---------------------------------------------------------------------------
# self-avoiding-walk bound
# ---------------------------------------------------------------------------

def dkp_pointwise_bound(inst, A, B, H, max_len=None, cap=10 ** 6):
    """(bound, truncated): 2 sum over walks of prod rho_c for one noise
    realization.  truncated is True when max_len may not exhaust W_AB,
    in which case the value is a lower bound OF the bound."""
    if inst.kind != LDGM:
        raise ValueError("the walk bound applies to LDGM instances")
    g = inst.graph
    exhaustive_len = min(g.n_chk, max(g.n_var - 1, 0))
    if max_len is None:
        max_len = exhaustive_len
    walks = enumerate_saws(g, A, B, max_len, cap=cap)
    l = inst.values
    rho = np.where(np.abs(l) > H, 1.0, np.expm1(4.0 * np.abs(l)))
    total = 0.0
    for w in walks:
        prod = 1.0
        for c in w.chks:
            prod *= rho[c]
        total += prod
    return 2.0 * total, max_len < exhaustive_len


def dkp_avg_bound(g, ch, A, B, H):
    """(bound, diverged): the noise-averaged closed form
    2 |A| |B| (K delta)^dist / (1 - K delta) with K = l_max k_max,
    delta = delta_high(ch, H) and dist the minimal walk length between
    A and B.  diverged is True when K delta >= 1."""
    if g.kind != LDGM:
        raise ValueError("the walk bound applies to LDGM graphs")
    K = g.l_max * g.k_max
    delta = delta_high(ch, H)
    if K * delta >= 1.0:
        return math.inf, True
    dist = same_type_distance(g, "var", list(A), list(B))
    if math.isinf(dist):
        return 0.0, False
    return 2.0 * len(A) * len(B) * (K * delta) ** dist / (1.0 - K * delta), False


# ---------------------------------------------------------------------------
# cluster enumeration for the dual expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterTerm:
    """A check cluster Xhat with its compatible Gamma sets and, for each
    Gamma, the interior variables of a witnessing walk from d(i) to d(j)."""

    xhat: frozenset
    gammas: tuple  # of frozensets of variable ids
    witnesses: tuple  # parallel to gammas: tuples of interior variables


def _var_adjacent(g, v):
    out = set()
    for c in g.adj_var[v]:
        out.update(g.adj_chk[c])
    out.discard(v)
    return out


def _is_var_connected(g, nodes):
    nodes = set(nodes)
    if len(nodes) <= 1:
        return True
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in _var_adjacent(g, v):
            if w in nodes and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == nodes


def _witness_interior(g, nodes, i, j):
    """Interior variables of a shortest i-to-j path inside the variable
    set nodes (empty when i and j share a check)."""
    if set(g.adj_var[i]) & set(g.adj_var[j]):
        return ()
    prev = {i: None}
    frontier = [i]
    while frontier:
        nxt = []
        for v in frontier:
            for w in _var_adjacent(g, v):
                if w in nodes and w not in prev:
                    prev[w] = v
                    nxt.append(w)
                    if w == j:
                        path = []
                        x = prev[j]
                        while x is not None and x != i:
                            path.append(x)
                            x = prev[x]
                        return tuple(reversed(path))
        frontier = nxt
    raise AssertionError("connected set without a connecting path")


def enumerate_clusters(g, i, j, size_cap=CLUSTER_SIZE_CAP, cap=10 ** 6):
    """All cluster terms for the pair (i, j): hyperedge-connected variable
    sets Y containing i and j with |Y| <= size_cap, grouped into check
    clusters Xhat = boundary(Y); each Y contributes the compatible sets
    Gamma = Y minus any subset of {i, j}.  Returns [] when i and j lie in
    different components."""
    if g.kind != LDPC:
        raise ValueError("the dual expansion applies to LDPC graphs")
    if i == j:
        raise ValueError("cluster terms need distinct code bits")
    others = [v for v in range(g.n_var) if v not in (i, j)]
    by_xhat = {}
    count = 0
    for r in range(min(size_cap - 2, len(others)) + 1):
        for extra in itertools.combinations(others, r):
            Y = frozenset(extra) | {i, j}
            if not _is_var_connected(g, Y):
                continue
            count += 1
            if count > cap:
                raise EnumerationCapExceeded(f"more than {cap} connected sets")
            xhat = frozenset(c for v in Y for c in g.adj_var[v])
            by_xhat.setdefault(xhat, []).append(Y)
    terms = []
    for xhat in sorted(by_xhat, key=lambda x: (len(x), sorted(x))):
        gammas, witnesses = [], []
        for Y in by_xhat[xhat]:
            interior = _witness_interior(g, Y, i, j)
            for drop in ((), (i,), (j,), (i, j)):
                gammas.append(Y - frozenset(drop))
                witnesses.append(interior)
        terms.append(ClusterTerm(xhat, tuple(gammas), tuple(witnesses)))
    return terms


def _tau_columns(g, vars_needed, chk_list):
    """tau_k over the 2^len(chk_list) restricted dual configurations for
    each variable k in vars_needed (whose checks must lie in chk_list)."""
    pos = {c: b for b, c in enumerate(chk_list)}
    configs = np.arange(1 << len(chk_list), dtype=np.uint64)
    cols = {}
    for k in vars_needed:
        mask = 0
        for c in g.adj_var[k]:
            mask |= 1 << pos[c]
        bits = (np.bitwise_count(configs & np.uint64(mask)) & np.uint64(1)).astype(np.int8)
        cols[k] = (np.int8(1) - np.int8(2) * bits).astype(float)
    return cols


def reduced_dual_partition(inst, xhat):
    """(sign, log|Z_dual(Xhat^c)|): dual spins on the checks outside Xhat,
    weights over the variables with no neighbor in Xhat."""
    g = inst.graph
    comp = [c for c in range(g.n_chk) if c not in xhat]
    keep = [v for v in range(g.n_var) if not (set(g.adj_var[v]) & xhat)]
    cols = _tau_columns(g, keep, comp)
    W = np.ones(1 << len(comp), dtype=np.longdouble)
    for v in keep:
        W *= np.longdouble(1.0) + np.exp(np.longdouble(-2.0 * inst.values[v])) * cols[v]
    tot = W.sum()
    if tot == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, float(tot)), float(np.log(np.abs(tot)))


def berretti_term(inst, term, i, j):
    """(K_ij(Xhat), sign, log|Z_dual(Xhat^c)|) for one cluster term, by
    exact enumeration of the two replicas restricted to Xhat."""
    g = inst.graph
    if len(term.xhat) > REPLICA_CAP:
        raise EnumerationCapExceeded(
            f"cluster of size {len(term.xhat)} exceeds replica cap {REPLICA_CAP}")
    chk_list = sorted(term.xhat)
    vars_needed = set([i, j]).union(*term.gammas) if term.gammas else {i, j}
    cols = _tau_columns(g, vars_needed, chk_list)
    l = inst.values
    ti, tj = cols[i], cols[j]
    Fi = ti[:, None] - ti[None, :]
    Fj = tj[:, None] - tj[None, :]
    gamma_sum = np.zeros_like(Fi)
    for gamma in term.gammas:
        prod = np.ones_like(Fi)
        for k in gamma:
            e2 = math.exp(-2.0 * l[k])
            tk = cols[k]
            prod *= e2 * (tk[:, None] + tk[None, :]) + e2 * e2 * tk[:, None] * tk[None, :]
        gamma_sum += prod
    K = float((Fi * Fj * gamma_sum).sum())
    zs, zl = reduced_dual_partition(inst, term.xhat)
    return K, zs, zl


def berretti_identity_residual(inst, i, j, size_cap=None, cap=10 ** 6):
    """|dual pair bracket - (1/2) sum_Xhat K_ij (Z_dual(Xhat^c)/Z_dual)^2|
    with the left side from the duality module and the right side from
    exhaustive cluster enumeration; an exact identity on small graphs."""
    g = inst.graph
    if size_cap is None:
        size_cap = g.n_var
    elif size_cap < g.n_var:
        raise ValueError("identity check needs exhaustive enumeration")
    dinst = DualInstance(inst)
    lhs = dual_bracket(dinst, (i, j)) - dual_bracket(dinst, (i,)) * dual_bracket(dinst, (j,))
    _, zlog = dual_partition(dinst)
    rhs = 0.0
    for term in enumerate_clusters(g, i, j, size_cap, cap):
        K, zs, zl = berretti_term(inst, term, i, j)
        if zs != 0.0:
            rhs += 0.5 * K * math.exp(2.0 * (zl - zlog))
    return abs(lhs - rhs)


def berretti_avg_bound(g, ch, i, j, s):
    """(bound, diverged): the assembled noise-averaged bound on
    E|<x_i x_j> - <x_i><x_j>| for an LDPC graph at low noise:

        2^{1-s} E[|sinh 2l|^{-2s}]
            * sqrt( 2^{-2s} sum_{h >= dist(i,j)/2}
                    K^h 2^{(2+k_max) h} Delta^{(h - 2 l_max) * rate} )

    with Delta = delta_dual(ch, s), K = l_max k_max, and rate the weaker
    (larger-valued) of 1/l_max and 1/(2 l_max) exponent conventions.
    diverged is True when the geometric ratio reaches 1."""
    if g.kind != LDPC:
        raise ValueError("the dual bound applies to LDPC graphs")
    if not 0.0 < s < 0.5:
        raise ValueError("s must lie in (0, 1/2)")
    if ch.kind == "bsc":
        e = ch.eps
        prefactor = (2.0 * e * (1.0 - e) / (1.0 - 2.0 * e)) ** (2 * s)
    else:
        prefactor = ch.expectation(lambda l: np.abs(np.sinh(2.0 * l)) ** (-2 * s))
    prefactor *= 2.0 ** (1 - s)
    Delta = delta_dual(ch, s)
    K = g.l_max * g.k_max
    rate = 1.0 / (2.0 * g.l_max) if Delta < 1.0 else 1.0 / g.l_max
    ratio = K * 2.0 ** (2 + g.k_max) * Delta ** rate
    if ratio >= 1.0:
        return math.inf, True
    dist = graph_distance(g, i, j)
    if math.isinf(dist):
        return 0.0, False
    h0 = max(1, math.ceil(dist / 2))
    first = K ** h0 * 2.0 ** ((2 + g.k_max) * h0) * Delta ** ((h0 - 2 * g.l_max) * rate)
    inner = 2.0 ** (-2 * s) * first / (1.0 - ratio)
    return prefactor * math.sqrt(inner), False


# ---------------------------------------------------------------------------
# exhaustive evaluator for the replicated-weight decomposition (test aid)
# ---------------------------------------------------------------------------

def _replica_tables(inst, A, B):
    """Config-pair matrices for the replicated LDGM measure: per-check
    weight factors M_c and the product f_A f_B of replica differences."""
    from .exact import _parity_signs, codebit_table

    g = inst.graph
    X = codebit_table(g).astype(float)  # (configs, n_chk)
    l = inst.values
    configs = np.arange(1 << g.n_var, dtype=np.uint64)
    maskA = maskB = 0
    for a in A:
        maskA |= 1 << a
    for b in B:
        maskB |= 1 << b
    uA = _parity_signs(configs, maskA).astype(float)
    uB = _parity_signs(configs, maskB).astype(float)
    FAB = (uA[:, None] - uA[None, :]) * (uB[:, None] - uB[None, :])
    Ms = [np.exp(l[c] * (X[:, c][:, None] + X[:, c][None, :]) + 2.0 * abs(l[c]))
          for c in range(g.n_chk)]
    return FAB, Ms


def _g_connects(g, G_plus_bad, A, B):
    """Does some walk from A to B use only checks in G_plus_bad?"""
    if set(A) & set(B):
        return True
    reach = set(A)
    stack = list(A)
    while stack:
        v = stack.pop()
        for c in g.adj_var[v]:
            if c not in G_plus_bad:
                continue
            for w in g.adj_chk[c]:
                if w not in reach:
                    if w in B:
                        return True
                    reach.add(w)
                    stack.append(w)
    return False


def replica_g_sums(inst, A, B, H, max_good=12):
    """(connecting_sum, nonconnecting_sum) of the replicated-measure
    decomposition over subsets G of the good checks:

        term(G) = (1/(2 Z'^2)) sum_{u^1, u^2} f_A f_B
                  prod_{c bad} M_c prod_{c in G} (M_c - 1)

    The two sums partition the full expansion, whose total equals the
    exact correlation <u_A u_B> - <u_A><u_B>; terms with G not connecting
    A and B vanish identically.  Exhaustive and test-only (2^good terms)."""
    if inst.kind != LDGM:
        raise ValueError("the replicated decomposition applies to LDGM")
    g = inst.graph
    bad = sorted(BadSet.from_instance(inst, H).members)
    good = [c for c in range(g.n_chk) if c not in bad]
    if len(good) > max_good:
        raise EnumerationCapExceeded(f"{len(good)} good checks exceed cap {max_good}")
    FAB, Ms = _replica_tables(inst, A, B)
    base = np.ones_like(FAB)
    for c in bad:
        base *= Ms[c]
    logzp = partition_function(inst) + float(np.sum(np.abs(inst.values)))
    scale = math.exp(-2.0 * logzp) / 2.0
    con = noncon = 0.0
    bad_set = set(bad)
    for r in range(len(good) + 1):
        for G in itertools.combinations(good, r):
            prod = base.copy()
            for c in G:
                prod *= Ms[c] - 1.0
            val = scale * float((FAB * prod).sum())
            if _g_connects(g, bad_set | set(G), A, B):
                con += val
            else:
                noncon += val
    return con, noncon


def replica_decomposition_residual(inst, A, B, H, max_good=12):
    """|full G-sum - exact correlation|: the decomposition identity."""
    con, noncon = replica_g_sums(inst, A, B, H, max_good)
    return abs((con + noncon) - spin_product_correlation(inst, A, B))
