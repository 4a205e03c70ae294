"""Sum-product message passing for both code families, on the original
graph and on computational trees.

Flooding schedule, zero message initialization.  One full iteration moves
information two edge hops, so d iterations on the graph reproduce the
exact Gibbs marginal on the depth-2d computational tree with the natural
boundary conditions: LDPC leaves keep their channel observations, LDGM
leaf checks (whose variable children were truncated) marginalize to
constants and drop out.

Message rules (messages are half-loglikelihoods of +1 vs -1):

  LDPC:  v2c = l_i + sum of other c2v;   c2v = atanh(prod other tanh v2c)
  LDGM:  v2c = sum of other c2v;         c2v = atanh(tanh l_c * prod other tanh v2c)

Messages saturate at L_SAT = 30 nats; check products of magnitude one
(forced bits) map straight to the saturation bound.

Code-bit outputs: LDPC marginal tanh(l_i + sum c2v); LDGM check i forms
P = prod tanh(v2c into i) and combines with its own observation through
(tanh l_i + P) / (1 + P tanh l_i).  Extrinsic estimates drop the own-l
term (LDPC) or return P (LDGM); messages elsewhere keep their l's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import L_SAT
from .graphs import LDGM, LDPC


def _saturated_atanh(prod):
    """atanh with output saturation at L_SAT.  Representable |t| < 1 maps
    below 18.8 nats; products that round to exactly +-1 (forced bits) go
    to the full +-L_SAT, so hard-decision chains stay sharp instead of
    eroding through repeated input clamps."""
    with np.errstate(divide="ignore"):
        out = np.arctanh(prod)
    return np.clip(out, -L_SAT, L_SAT)


@dataclass
class MessageState:
    """Per-edge messages after some number of flooding iterations."""

    v2c: np.ndarray
    c2v: np.ndarray
    iteration: int


@lru_cache(maxsize=32)
def _edge_index(graph):
    evar, echk = [], []
    for v in range(graph.n_var):
        for c in graph.adj_var[v]:
            evar.append(v)
            echk.append(c)
    return np.array(evar, dtype=np.intp), np.array(echk, dtype=np.intp)


def _excl_products(vals, groups, n_groups, extra_log=None, extra_sign=None,
                   extra_zero=None):
    """For factors vals[e] grouped by groups[e], the product over each
    group excluding e itself; optional per-group extra factors (given as
    log-magnitude, sign in {+1,-1}, and an exact-zero flag) are always
    included.  Exact zeros are handled by counting."""
    nz = vals != 0.0
    logs = np.zeros_like(vals)
    np.log(np.abs(vals), out=logs, where=nz)
    logsum = np.bincount(groups, weights=np.where(nz, logs, 0.0), minlength=n_groups)
    negcount = np.bincount(groups, weights=(vals < 0).astype(float), minlength=n_groups)
    zerocount = np.bincount(groups, weights=(~nz).astype(float), minlength=n_groups)
    if extra_log is not None:
        logsum = logsum + np.where(extra_zero, 0.0, extra_log)
        negcount = negcount + (extra_sign < 0)
        zerocount = zerocount + extra_zero
    others_zero = zerocount[groups] - (~nz)
    mag = np.exp(logsum[groups] - np.where(nz, logs, 0.0))
    signs = np.where((negcount[groups] - (vals < 0)) % 2 == 0, 1.0, -1.0)
    return np.where(others_zero > 0, 0.0, signs * mag)


def _run_messages(inst, d):
    """d flooding iterations from zero messages; returns MessageState."""
    state = MessageState(np.zeros(inst.graph.n_edges), np.zeros(inst.graph.n_edges), 0)
    return _run_messages_from(inst, state, d)


def _codebit_estimates(inst, state, extrinsic):
    g = inst.graph
    evar, echk = _edge_index(g)
    l = inst.values
    if g.kind == LDPC:
        tot = np.bincount(evar, weights=state.c2v, minlength=g.n_var)
        field = tot if extrinsic else l + tot
        return np.tanh(np.clip(field, -L_SAT, L_SAT))
    # LDGM: product of incoming v2c tanh's per check, empty product = 1
    t = np.tanh(state.v2c)
    nz = t != 0.0
    logs = np.where(nz, np.log(np.abs(np.where(nz, t, 1.0))), 0.0)
    logsum = np.bincount(echk, weights=logs, minlength=g.n_chk)
    negcount = np.bincount(echk, weights=(t < 0).astype(float), minlength=g.n_chk)
    zerocount = np.bincount(echk, weights=(~nz).astype(float), minlength=g.n_chk)
    P = np.where(zerocount > 0, 0.0,
                 np.where(negcount % 2 == 0, 1.0, -1.0) * np.exp(logsum))
    if extrinsic:
        return P
    tl = np.tanh(l)
    return (tl + P) / (1.0 + P * tl)


def bp_run(inst, d, return_state=False):
    """Flooding sum-product for d full iterations from zero messages;
    returns the per-code-bit marginal estimates."""
    if d < 0:
        raise ValueError("iteration count must be >= 0")
    state = _run_messages(inst, d)
    est = _codebit_estimates(inst, state, extrinsic=False)
    return (est, state) if return_state else est


def bp_all_extrinsics(inst, d):
    """Extrinsic BP estimates <x_i>_{0,d} for every code bit."""
    state = _run_messages(inst, d)
    return _codebit_estimates(inst, state, extrinsic=True)


def bp_extrinsic(inst, i, d):
    """Extrinsic BP estimate at code bit i: own observation removed at the
    root only (cycles still carry l_i into the messages)."""
    return float(bp_all_extrinsics(inst, d)[i])


def bp_checkpoint_extrinsics(inst, depths):
    """Extrinsic estimates at several iteration depths from one message
    run (shared noise; used by the iteration-vs-blocklength experiment)."""
    depths = sorted(set(depths))
    out = {}
    g = inst.graph
    state = MessageState(np.zeros(g.n_edges), np.zeros(g.n_edges), 0)
    last = 0
    for d in depths:
        extra = _run_messages_from(inst, state, d - last)
        state, last = extra, d
        out[d] = _codebit_estimates(inst, state, extrinsic=True)
    return out


def _run_messages_from(inst, state, extra_iters):
    """Continue flooding from an existing MessageState."""
    g = inst.graph
    evar, echk = _edge_index(g)
    l = inst.values
    v2c, c2v = state.v2c.copy(), state.c2v.copy()
    for _ in range(extra_iters):
        if g.kind == LDPC:
            tot = np.bincount(evar, weights=c2v, minlength=g.n_var)
            v2c = l[evar] + tot[evar] - c2v
            np.clip(v2c, -L_SAT, L_SAT, out=v2c)
            t = np.tanh(v2c)
            prod = _excl_products(t, echk, g.n_chk)
        else:
            t = np.tanh(v2c)
            tl = np.tanh(l)
            prod = _excl_products(t, echk, g.n_chk,
                                  extra_log=np.log(np.abs(np.where(tl == 0, 1.0, tl))),
                                  extra_sign=np.where(tl < 0, -1.0, 1.0),
                                  extra_zero=(tl == 0.0))
        c2v = _saturated_atanh(prod)
        if g.kind == LDGM:
            tot = np.bincount(evar, weights=c2v, minlength=g.n_var)
            v2c = tot[evar] - c2v
            np.clip(v2c, -L_SAT, L_SAT, out=v2c)
    return MessageState(v2c, c2v, state.iteration + extra_iters)


# ---------------------------------------------------------------------------
# exact Gibbs computation on computational trees
# ---------------------------------------------------------------------------

def tree_decode(ct, inst, pair_nodes=(), depth=None):
    """Exact Gibbs marginal at the root of a computational tree, with
    likelihoods pulled back through the projection (hence correlated
    across tree nodes), plus optional root-to-node covariances.

    pair_nodes are TREE node ids of code-bit type; the return value is
    (root_marginal, {k: <x_root x_k> - <x_root><x_k>}).  depth trims the
    tree to a smaller even depth without rebuilding it.
    """
    d = ct.depth if depth is None else depth
    if d % 2 != 0 or d < 0 or d > ct.depth:
        raise ValueError("depth must be even and within the built tree")
    code_type = "chk" if inst.kind == LDGM else "var"
    for k in pair_nodes:
        if k == 0 or ct.node_type[k] != code_type or ct.node_depth[k] > d:
            raise ValueError(
                f"pair node {k} must be a non-root code-bit node within depth {d}")
    logZ0, val0 = _tree_eval(ct, inst, frozenset(), d)
    logZr, valr = _tree_eval(ct, inst, frozenset([0]), d)
    root_mean = valr / val0 * math.exp(logZr - logZ0)
    corrs = {}
    for k in pair_nodes:
        logZk, valk = _tree_eval(ct, inst, frozenset([k]), d)
        logZrk, valrk = _tree_eval(ct, inst, frozenset([0, k]), d)
        mk = valk / val0 * math.exp(logZk - logZ0)
        mrk = valrk / val0 * math.exp(logZrk - logZ0)
        corrs[k] = mrk - root_mean * mk
    return root_mean, corrs


def _tree_eval(ct, inst, inserts, d):
    """Sum over tree spin configurations of the Gibbs weight times the
    product of inserted code-bit observables.  Returns (logscale, value)
    with |value| <= 1: the sum equals value * exp(logscale).

    Messages are pairs over the node's spin (LDGM: info-bit spin at var
    nodes; check factors carry observations).  Checks whose variable
    children were truncated get one aggregate phantom spin summed
    uniformly, which reproduces the zero-initialized BP boundary."""
    g, l = inst.graph, inst.values
    kind = inst.kind
    order = sorted((k for k in range(ct.n_nodes) if ct.node_depth[k] <= d),
                   key=lambda k: -ct.node_depth[k])
    msg = {}
    logscale = 0.0

    def kids(k):
        return [c for c in ct.children[k] if ct.node_depth[c] <= d]

    for k in order:
        typ, img = ct.node_type[k], ct.proj[k]
        ch = kids(k)
        if kind == LDGM:
            if typ == "var":
                up, down = 1.0, 1.0  # components for u = +1 / -1
                for c in ch:
                    up *= msg[c][0]
                    down *= msg[c][1]
                vec = (up, down)
            else:
                # combine var children into distribution of their product
                qp, qm = 1.0, 0.0
                for c in ch:
                    qp, qm = qp * msg[c][0] + qm * msg[c][1], qp * msg[c][1] + qm * msg[c][0]
                deg = len(g.adj_chk[img])
                present = len(ch) + (0 if ct.parent[k] == -1 else 1)
                phantom = deg > present
                lc = l[img]
                ins = k in inserts
                if ct.parent[k] == -1:
                    vec = (_ldgm_check_total(qp, qm, 1.0, lc, phantom, ins), 0.0)
                else:
                    vec = (_ldgm_check_total(qp, qm, 1.0, lc, phantom, ins),
                           _ldgm_check_total(qp, qm, -1.0, lc, phantom, ins))
        else:
            if typ == "var":
                lv = l[img]
                up, down = math.exp(min(lv, L_SAT)), math.exp(max(-lv, -L_SAT))
                for c in ch:
                    up *= msg[c][0]
                    down *= msg[c][1]
                if k in inserts:
                    down = -down
                vec = (up, down)
            else:
                qp, qm = 1.0, 0.0
                for c in ch:
                    qp, qm = qp * msg[c][0] + qm * msg[c][1], qp * msg[c][1] + qm * msg[c][0]
                if ct.parent[k] == -1:
                    vec = (qp, 0.0)  # unreachable: LDPC roots are variables
                else:
                    vec = (qp, qm)  # parity: parent +1 needs product +1
        m = max(abs(vec[0]), abs(vec[1]))
        if m == 0.0:
            return logscale, 0.0
        logscale += math.log(m)
        msg[k] = (vec[0] / m, vec[1] / m)

    root = msg[0]
    if kind == LDGM:
        return logscale, root[0]
    return logscale, root[0] + root[1]


def _ldgm_check_total(qp, qm, u_par, lc, phantom, insert):
    """Sum over the product spin (and the phantom spin when truncated) of
    e^{lc * sigma} [* sigma if inserted], where sigma = u_par * pi * s."""
    tot = 0.0
    for pi, q in ((1.0, qp), (-1.0, qm)):
        if q == 0.0:
            continue
        ss = (1.0, -1.0) if phantom else (1.0,)
        for s in ss:
            sigma = u_par * pi * s
            w = math.exp(lc * sigma)
            if insert:
                w *= sigma
            tot += q * w
    return tot
