"""Brute-force-exact evaluation of the posterior Gibbs measures.

LDGM posterior over information bits u in {-1,+1}^m:

    p(u) = (1/Z) prod_i exp(l_i x_i(u)),   x_i(u) = prod_{a in d(i)} u_a

LDPC posterior over code bits x in {-1,+1}^n:

    p(x) = (1/Z) prod_c (1/2)(1 + prod_{i in d(c)} x_i) prod_i exp(l_i x_i)

Everything here enumerates the configuration space directly (LDPC: all
2^n spin configurations with the parity indicators, materialized to the
codeword support), works in the log domain, and relies on numpy's
pairwise summation for reproducible reductions.  This module is the
MAP-side oracle for the BP decoder, the duality layer and the GEXIT
estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import LLRVector
from .graphs import LDGM, LDPC, TannerGraph

#: default cap on brute-force free spins (2^24 ~ 1.7e7 configurations)
BRUTE_FORCE_CAP = 24


class BruteForceCapExceeded(ValueError):
    """The instance has more free spins than the brute-force cap allows."""


@dataclass(frozen=True)
class PosteriorInstance:
    """A Tanner graph plus one half-loglikelihood vector (one entry per
    code bit); the Gibbs measure being decoded."""

    graph: TannerGraph
    llrs: LLRVector

    def __post_init__(self):
        if len(self.llrs) != self.graph.code_bit_count:
            raise ValueError(
                f"llr length {len(self.llrs)} != code bit count {self.graph.code_bit_count}")

    @property
    def kind(self):
        return self.graph.kind

    @property
    def values(self):
        return self.llrs.values

    def with_llrs(self, values):
        return PosteriorInstance(self.graph, LLRVector(np.asarray(values, float)))


def make_instance(graph, values, seed=None):
    return PosteriorInstance(graph, LLRVector(np.asarray(values, float), seed))


def _check_cap(graph, cap):
    if graph.free_spin_count > cap:
        raise BruteForceCapExceeded(
            f"{graph.free_spin_count} free spins exceed cap {cap}")


def _parity_signs(configs, mask):
    """(-1)^{popcount(configs & mask)} as int8."""
    bits = (np.bitwise_count(configs & np.uint64(mask)) & np.uint64(1)).astype(np.int8)
    return np.int8(1) - np.int8(2) * bits


@lru_cache(maxsize=8)
def codebit_table(graph):
    """Code-bit value matrix X over the enumerated support.

    LDGM: X has shape (2^m, n_chk); row u gives x_i(u) for every check.
    LDPC: rows are the codewords (the 2^n enumeration filtered by the
    parity indicators); X[r, i] is spin i of codeword r.
    """
    configs = np.arange(1 << graph.free_spin_count, dtype=np.uint64)
    if graph.kind == LDGM:
        cols = []
        for i in range(graph.n_chk):
            mask = 0
            for a in graph.adj_chk[i]:
                mask |= 1 << a
            cols.append(_parity_signs(configs, mask))
        return np.stack(cols, axis=1) if cols else np.zeros((len(configs), 0), np.int8)
    # LDPC: keep configurations satisfying every check
    valid = np.ones(len(configs), dtype=bool)
    for c in range(graph.n_chk):
        mask = 0
        for i in graph.adj_chk[c]:
            mask |= 1 << i
        valid &= _parity_signs(configs, mask) == 1
    kept = configs[valid]
    cols = [_parity_signs(kept, 1 << i) for i in range(graph.n_var)]
    return np.stack(cols, axis=1) if cols else np.zeros((len(kept), 0), np.int8)


def _log_weights(X, l):
    """X @ l computed column by column (keeps the int8 table unconverted)."""
    logw = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        logw += l[j] * X[:, j]
    return logw


def _posterior(inst, cap):
    _check_cap(inst.graph, cap)
    X = codebit_table(inst.graph)
    logw = _log_weights(X, inst.values)
    m = logw.max()
    w = np.exp(logw - m)
    s = w.sum()
    return X, w / s, m + math.log(s), logw


def partition_function(inst, cap=BRUTE_FORCE_CAP):
    """log Z, computed with a streaming-safe log-sum-exp (Z is a positive
    sum of exponential weights for both code families)."""
    _, _, logz, _ = _posterior(inst, cap)
    return logz


def all_marginals(inst, cap=BRUTE_FORCE_CAP):
    """<x_i> for every code bit i, as one array."""
    X, p, _, _ = _posterior(inst, cap)
    return p @ X


def marginal(inst, i, cap=BRUTE_FORCE_CAP):
    """Posterior mean <x_i> of code bit i (the soft-bit MAP estimate)."""
    X, p, _, _ = _posterior(inst, cap)
    return float(p @ X[:, i])


def extrinsic_marginal(inst, i, cap=BRUTE_FORCE_CAP):
    """<x_i>_0: the marginal recomputed with l_i = 0, other entries
    untouched; the original instance is not modified."""
    X, p, _, _ = _posterior(inst, cap)
    xi = X[:, i].astype(float)
    w0 = p * np.exp(-inst.values[i] * xi)
    return float((w0 @ xi) / w0.sum())


def all_extrinsics(inst, cap=BRUTE_FORCE_CAP):
    """<x_i>_0 for every code bit from a single posterior pass."""
    X, p, _, _ = _posterior(inst, cap)
    out = np.empty(X.shape[1])
    for i in range(X.shape[1]):
        xi = X[:, i].astype(float)
        w0 = p * np.exp(-inst.values[i] * xi)
        out[i] = (w0 @ xi) / w0.sum()
    return out


def pair_correlation(inst, i, j, cap=BRUTE_FORCE_CAP):
    """<x_i x_j> - <x_i><x_j>."""
    if i == j:
        raise ValueError("pair correlation needs distinct code bits")
    X, p, _, _ = _posterior(inst, cap)
    xi = X[:, i].astype(float)
    xj = X[:, j].astype(float)
    return float(p @ (xi * xj) - (p @ xi) * (p @ xj))


def correlations_with_root(inst, i, cap=BRUTE_FORCE_CAP):
    """<x_i x_j> - <x_i><x_j> for all j at once (j = i slot holds the
    variance 1 - <x_i>^2); used by the correlation-decay experiments."""
    X, p, _, _ = _posterior(inst, cap)
    means = p @ X
    xi = X[:, i].astype(float)
    joint = (p * xi) @ X
    return joint - means[i] * means


def spin_product_correlation(inst, A, B, cap=BRUTE_FORCE_CAP):
    """<u_A u_B> - <u_A><u_B> for variable sets A, B of an LDGM instance,
    where u_S is the product of the spins in S; the quantity bounded by
    the self-avoiding-walk expansion."""
    if inst.kind != LDGM:
        raise ValueError("spin products are an LDGM notion")
    _check_cap(inst.graph, cap)
    X = codebit_table(inst.graph)
    logw = _log_weights(X, inst.values)
    w = np.exp(logw - logw.max())
    p = w / w.sum()
    configs = np.arange(1 << inst.graph.free_spin_count, dtype=np.uint64)
    maskA = maskB = 0
    for a in A:
        maskA |= 1 << a
    for b in B:
        maskB |= 1 << b
    uA = _parity_signs(configs, maskA).astype(float)
    uB = _parity_signs(configs, maskB).astype(float)
    return float(p @ (uA * uB) - (p @ uA) * (p @ uB))


def conditional_entropy(inst, cap=BRUTE_FORCE_CAP):
    """Gibbs entropy of the posterior in nats per CODE BIT:
    -(1/n) sum_config p ln p, evaluated in the log domain."""
    X, p, logz, logw = _posterior(inst, cap)
    # S = -sum p ln p = ln Z - sum_config p * logw
    S = logz - float(p @ logw)
    return S / inst.graph.code_bit_count
