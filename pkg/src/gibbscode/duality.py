"""MacWilliams/Poisson duality for LDPC instances.

The dual view rereads the same Tanner graph as an LDGM system: dual
information bits u_a sit on the former check nodes and dual code bits
tau_i = prod_{a in d(i)} u_a on the former variable nodes.  The signed
dual partition function is

    Z_dual = sum_{u in {-1,+1}^m} prod_i (1 + e^{-2 l_i} tau_i)

and satisfies the extended MacWilliams identity

    Z = 2^{-m} e^{sum_j l_j} Z_dual.

The u-sum visits each dual codeword 2^{m-rank(H)} times, so the 2^{-m}
normalization equals |C_dual|^{-1} = 2^{-rank(H)} exactly when the parity
matrix has full row rank (no redundant checks) and is the exact
normalization in general.

Differentiating the log of the identity in the l's gives the correlation
maps checked by duality_residuals:

    <x_i>              = 1/tanh(2 l_i) - <tau_i>_dual / sinh(2 l_i)
    <x_i x_j> - <x_i><x_j> = (<tau_i tau_j>_dual - <tau_i>_dual <tau_j>_dual)
                             / (sinh(2 l_i) sinh(2 l_j))

The dual bracket is signed (weights are negative for l_i < 0 and
tau_i = -1), so everything is evaluated in sign/log-magnitude form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import BRUTE_FORCE_CAP, BruteForceCapExceeded, all_marginals, pair_correlation
from .graphs import LDPC

#: |Z_dual| below this triggers the resolve-via-primal fallback
Z_DUAL_FLOOR = 1e-12

#: |sinh 2l| floor under which the residual identities are skipped
SINH_FLOOR = 1e-3


class DualDegenerate(ArithmeticError):
    """|Z_dual| fell below the floor; ratios must be resolved via the
    primal formulas (the primal Z is strictly positive)."""


@dataclass(frozen=True)
class Gf2Matrix:
    """Parity-check rows over GF(2), each row a python int bitmask."""

    rows: tuple
    n_cols: int

    @classmethod
    def from_graph(cls, g):
        rows = []
        for c in range(g.n_chk):
            mask = 0
            for v in g.adj_chk[c]:
                mask |= 1 << v
            rows.append(mask)
        return cls(tuple(rows), g.n_var)


def gf2_rank(mat):
    """Rank over GF(2) by bitmask elimination."""
    rows = [r for r in mat.rows if r]
    rank = 0
    while rows:
        pivot = rows.pop()
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
        rows = [r for r in rows if r]
    return rank


@dataclass(frozen=True)
class DualInstance:
    """An LDPC posterior together with its dual-LDGM reading."""

    base: object  # PosteriorInstance with kind LDPC

    def __post_init__(self):
        if self.base.kind != LDPC:
            raise ValueError("duality is defined for LDPC instances")

    @property
    def graph(self):
        return self.base.graph

    @property
    def values(self):
        return self.base.values


@lru_cache(maxsize=32)
def _tau_table(graph):
    """tau_i(u) for every dual configuration u (rows) and variable i
    (columns), as int8 signs; u enumerates {-1,+1}^{n_chk}."""
    configs = np.arange(1 << graph.n_chk, dtype=np.uint64)
    cols = []
    for i in range(graph.n_var):
        mask = 0
        for a in graph.adj_var[i]:
            mask |= 1 << a
        bits = (np.bitwise_count(configs & np.uint64(mask)) & np.uint64(1)).astype(np.int8)
        cols.append(np.int8(1) - np.int8(2) * bits)
    return (np.stack(cols, axis=1) if cols
            else np.zeros((len(configs), 0), np.int8))


def _config_weights(dinst, cap):
    """Per-configuration signed weight prod_i (1 + e^{-2l_i} tau_i), in
    extended precision (the signed sum cancels heavily on some draws)."""
    g = dinst.graph
    if g.n_chk > cap:
        raise BruteForceCapExceeded(f"{g.n_chk} dual spins exceed cap {cap}")
    T = _tau_table(g)
    l = dinst.values
    W = np.ones(T.shape[0], dtype=np.longdouble)
    for i in range(g.n_var):
        fac = np.longdouble(1.0) + np.exp(np.longdouble(-2.0) * np.longdouble(l[i])) \
            * T[:, i].astype(np.longdouble)
        W *= fac
    return T, W


def _signed_log(total):
    if total == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, float(total)), float(np.log(np.abs(total)))


def dual_partition(dinst, cap=BRUTE_FORCE_CAP):
    """(sign, log|Z_dual|) by exact enumeration over the dual spins."""
    _, W = _config_weights(dinst, cap)
    return _signed_log(W.sum())


def dual_bracket(dinst, S, cap=BRUTE_FORCE_CAP):
    """<prod_{i in S} tau_i>_dual, a signed ratio (not a probability)."""
    T, W = _config_weights(dinst, cap)
    z = W.sum()
    zs, zl = _signed_log(z)
    if zs == 0.0 or zl < math.log(Z_DUAL_FLOOR):
        raise DualDegenerate("dual partition function below floor; resolve via primal")
    extra = np.ones(T.shape[0], dtype=np.longdouble)
    for i in S:
        extra *= T[:, i]
    return float((W @ extra) / z)


def dual_bracket_via_primal(dinst, S, cap=BRUTE_FORCE_CAP):
    """Invert the correlation maps to express dual brackets through the
    (always well-conditioned) primal marginals; |S| in {1, 2} only."""
    S = tuple(S)
    l = dinst.values
    marg = all_marginals(dinst.base, cap)
    if len(S) == 1:
        i = S[0]
        return math.cosh(2 * l[i]) - math.sinh(2 * l[i]) * marg[i]
    if len(S) == 2:
        i, j = S
        ti = math.cosh(2 * l[i]) - math.sinh(2 * l[i]) * marg[i]
        tj = math.cosh(2 * l[j]) - math.sinh(2 * l[j]) * marg[j]
        corr = pair_correlation(dinst.base, i, j, cap)
        return corr * math.sinh(2 * l[i]) * math.sinh(2 * l[j]) + ti * tj
    raise ValueError("primal fallback covers singletons and pairs only")


def macwilliams_log_residual(dinst, cap=BRUTE_FORCE_CAP):
    """Relative residual |Z - 2^{-m} e^{sum l} Z_dual| / Z computed in the
    log domain; the acceptance identity.  The 2^{-m} normalization equals
    |C_dual|^{-1} whenever the parity matrix has full row rank."""
    from .exact import partition_function

    logz = partition_function(dinst.base, cap)
    zs, zl = dual_partition(dinst, cap)
    log_rhs_mag = zl + float(np.sum(dinst.values)) - dinst.graph.n_chk * math.log(2.0)
    if zs <= 0.0:
        return math.inf  # Z is positive; a nonpositive dual side is maximal error
    return abs(math.expm1(log_rhs_mag - logz))


def duality_residuals(dinst, i, j, cap=BRUTE_FORCE_CAP, sinh_floor=SINH_FLOOR):
    """(r1, r2): absolute residuals of the first- and second-derivative
    correlation maps at code bits i and j, primal side from the exact
    Gibbs module.  A residual is returned as nan when its |sinh 2l| floor
    is violated (the identity has a removable singularity at l = 0)."""
    l = dinst.values
    marg = all_marginals(dinst.base, cap)
    si, sj = math.sinh(2 * l[i]), math.sinh(2 * l[j])
    r1 = r2 = math.nan
    if abs(si) > sinh_floor:
        try:
            ti = dual_bracket(dinst, (i,), cap)
        except DualDegenerate:
            ti = dual_bracket_via_primal(dinst, (i,), cap)
        r1 = abs(marg[i] - (1.0 / math.tanh(2 * l[i]) - ti / si))
    if abs(si) > sinh_floor and abs(sj) > sinh_floor:
        try:
            ti = dual_bracket(dinst, (i,), cap)
            tj = dual_bracket(dinst, (j,), cap)
            tij = dual_bracket(dinst, (i, j), cap)
        except DualDegenerate:
            ti = dual_bracket_via_primal(dinst, (i,), cap)
            tj = dual_bracket_via_primal(dinst, (j,), cap)
            tij = dual_bracket_via_primal(dinst, (i, j), cap)
        primal = pair_correlation(dinst.base, i, j, cap)
        r2 = abs(primal - (tij - ti * tj) / (si * sj))
    return r1, r2
