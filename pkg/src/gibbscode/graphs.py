"""Bipartite Tanner graphs for LDGM and LDPC codes.

Conventions:

  * LDGM: code bits sit on the CHECK nodes (x_i = product of the adjacent
    information-bit spins); variables are information bits and carry no
    channel observation.
  * LDPC: code bits sit on the VARIABLE nodes, subject to one parity
    constraint per check.
  * Depth arguments for neighborhoods / computational trees count EDGE
    hops and must be even (so the boundary has the same node type as the
    root).  graph_distance between two code bits counts same-type hops,
    i.e. edge distance divided by two.

Graphs are immutable after construction (tuple adjacency) and hashable,
so derived tables can be cached on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LDGM = "ldgm"
LDPC = "ldpc"

#: default cap on computational-tree nodes
TREE_NODE_CAP = 10 ** 6

#: default cap on enumerated self-avoiding walks
SAW_ENUM_CAP = 10 ** 6


class NodeCapExceeded(ValueError):
    """Computational-tree unrolling exceeded the configured node cap."""


class EnumerationCapExceeded(ValueError):
    """A combinatorial enumeration grew past its configured cap."""


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite variable/check adjacency with a code-kind tag."""

    kind: str
    n_var: int
    n_chk: int
    adj_var: tuple  # adj_var[v] = tuple of incident check ids
    adj_chk: tuple  # adj_chk[c] = tuple of incident variable ids

    def __post_init__(self):
        if self.kind not in (LDGM, LDPC):
            raise ValueError(f"unknown code kind {self.kind!r}")

    @property
    def l_max(self):
        """Largest variable-node degree (0 on a graph with no variables)."""
        return max((len(a) for a in self.adj_var), default=0)

    @property
    def k_max(self):
        return max((len(a) for a in self.adj_chk), default=0)

    @property
    def n_edges(self):
        return sum(len(a) for a in self.adj_var)

    # ----- code-bit view --------------------------------------------------

    @property
    def code_bit_count(self):
        """Number of code bits: checks for LDGM, variables for LDPC."""
        return self.n_chk if self.kind == LDGM else self.n_var

    @property
    def free_spin_count(self):
        """Spins enumerated by brute force: info bits (vars) for LDGM,
        code bits (vars) for LDPC.  Both live on variable nodes."""
        return self.n_var

    def code_bit_neighbors(self, i):
        """Variable neighbors of code bit i (LDGM: vars of check i;
        LDPC: not meaningful, raises)."""
        if self.kind != LDGM:
            raise ValueError("code_bit_neighbors is an LDGM notion")
        return self.adj_chk[i]

    def edges(self):
        return [(v, c) for v in range(self.n_var) for c in self.adj_var[v]]


def build_graph(n_var, n_chk, edges, kind):
    """Construct a TannerGraph from an explicit (var, chk) edge list.

    Rejects out-of-range indices and duplicate edges (a parallel edge
    would cancel mod 2 and silently change the code).
    """
    adj_var = [[] for _ in range(n_var)]
    adj_chk = [[] for _ in range(n_chk)]
    seen = set()
    for v, c in edges:
        if not (0 <= v < n_var and 0 <= c < n_chk):
            raise ValueError(f"edge ({v},{c}) out of range")
        if (v, c) in seen:
            raise ValueError(f"duplicate edge ({v},{c})")
        seen.add((v, c))
        adj_var[v].append(c)
        adj_chk[c].append(v)
    return TannerGraph(kind, n_var, n_chk,
                       tuple(tuple(a) for a in adj_var),
                       tuple(tuple(a) for a in adj_chk))


@dataclass(frozen=True)
class DegreeDistribution:
    """Node-perspective degree distributions Lambda (variables) and P
    (checks), stored as {degree: probability} maps."""

    var_coeffs: tuple  # ((degree, prob), ...)
    chk_coeffs: tuple

    def __post_init__(self):
        for coeffs, name in ((self.var_coeffs, "var"), (self.chk_coeffs, "chk")):
            probs = [p for _, p in coeffs]
            if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError(f"{name} coefficients must be a probability vector")
            if any(d < 1 for d, _ in coeffs):
                raise ValueError("degrees start at 1")

    @classmethod
    def regular(cls, var_degree, chk_degree):
        return cls(((var_degree, 1.0),), ((chk_degree, 1.0),))

    @classmethod
    def from_dicts(cls, var_coeffs, chk_coeffs):
        return cls(tuple(sorted(var_coeffs.items())), tuple(sorted(chk_coeffs.items())))

    @property
    def lambda_prime(self):
        """Lambda'(1) = mean variable degree."""
        return sum(d * p for d, p in self.var_coeffs)

    @property
    def p_prime(self):
        """P'(1) = mean check degree."""
        return sum(d * p for d, p in self.chk_coeffs)

    def edge_perspective(self, side):
        """(degrees, probs) with prob proportional to degree * node prob."""
        coeffs = self.var_coeffs if side == "var" else self.chk_coeffs
        degs = np.array([d for d, _ in coeffs])
        w = np.array([d * p for d, p in coeffs])
        return degs, w / w.sum()

    def node_perspective(self, side):
        coeffs = self.var_coeffs if side == "var" else self.chk_coeffs
        return (np.array([d for d, _ in coeffs]),
                np.array([p for _, p in coeffs]))


def sample_ensemble(dd, n, kind, seed, max_retries=1000):
    """Sample a simple bipartite graph from the configuration model.

    n is the number of CODE BITS (checks for LDGM, variables for LDPC);
    the other side's node count is inferred from the mean degrees so that
    socket counts balance.  Degrees are drawn per node, repaired by
    resampling until the two socket sums match (up to max_retries), and
    the uniform socket pairing is rejected until it is parallel-edge free.
    Deterministic given seed.
    """
    rng = np.random.default_rng(seed)
    if kind == LDGM:
        n_chk = n
        n_var = dd.p_prime * n / dd.lambda_prime
    else:
        n_var = n
        n_chk = dd.lambda_prime * n / dd.p_prime
    if abs(n_var - round(n_var)) > 1e-9 or abs(n_chk - round(n_chk)) > 1e-9:
        raise ValueError(
            f"mean degrees ({dd.lambda_prime:g}, {dd.p_prime:g}) do not balance at n={n}")
    n_var, n_chk = int(round(n_var)), int(round(n_chk))

    vdeg_vals, vdeg_p = dd.node_perspective("var")
    cdeg_vals, cdeg_p = dd.node_perspective("chk")
    for _ in range(max_retries):
        vdegs = rng.choice(vdeg_vals, size=n_var, p=vdeg_p)
        cdegs = rng.choice(cdeg_vals, size=n_chk, p=cdeg_p)
        if vdegs.sum() == cdegs.sum():
            break
    else:
        raise RuntimeError("could not balance socket counts; retry cap exceeded")

    var_sockets = np.repeat(np.arange(n_var), vdegs).tolist()
    pairing = np.repeat(np.arange(n_chk), cdegs)[rng.permutation(vdegs.sum())].tolist()
    # repair parallel edges by random socket swaps
    for _ in range(max_retries):
        seen = set()
        dups = []
        for pos, edge in enumerate(zip(var_sockets, pairing)):
            if edge in seen:
                dups.append(pos)
            else:
                seen.add(edge)
        if not dups:
            return build_graph(n_var, n_chk,
                               sorted(zip(var_sockets, pairing)), kind)
        for pos in dups:
            q = int(rng.integers(len(pairing)))
            pairing[pos], pairing[q] = pairing[q], pairing[pos]
    raise RuntimeError("could not avoid parallel edges; retry cap exceeded")


# ---------------------------------------------------------------------------
# distances and neighborhoods
# ---------------------------------------------------------------------------

def _neighbors(g, node):
    """Neighbors of a (type, index) node."""
    typ, idx = node
    if typ == "var":
        return [("chk", c) for c in g.adj_var[idx]]
    return [("var", v) for v in g.adj_chk[idx]]


def code_bit_node(g, i):
    return ("chk", i) if g.kind == LDGM else ("var", i)


def graph_distance(g, i, j):
    """Same-type hop count between code bits i and j (edge distance / 2);
    math.inf when disconnected."""
    typ = "chk" if g.kind == LDGM else "var"
    return same_type_distance(g, typ, [i], [j])


def same_type_distance(g, typ, sources, targets):
    """BFS distance in same-type hops from a source set to a target set
    (both of node type typ); 0 when the sets intersect, inf if unreachable."""
    targets = set(targets)
    if targets & set(sources):
        return 0
    frontier = set(sources)
    seen = set(frontier)
    dist = 0
    adj_self = g.adj_var if typ == "var" else g.adj_chk
    adj_other = g.adj_chk if typ == "var" else g.adj_var
    while frontier:
        dist += 1
        nxt = set()
        for x in frontier:
            for m in adj_self[x]:
                for y in adj_other[m]:
                    if y not in seen:
                        seen.add(y)
                        nxt.add(y)
        if nxt & targets:
            return dist
        frontier = nxt
    return math.inf


def neighborhood(g, node, d):
    """Ball of edge-radius d (even) around node = (type, index).

    Returns (subgraph, is_tree, boundary, var_map, chk_map) where the maps
    send original node ids to subgraph ids and boundary lists the
    subgraph's nodes at edge distance exactly d, as (type, original id).
    """
    if d % 2 != 0 or d < 0:
        raise ValueError("depth must be even and >= 0")
    dist = {node: 0}
    frontier = [node]
    while frontier:
        nxt = []
        for x in frontier:
            if dist[x] == d:
                continue
            for y in _neighbors(g, x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    vars_in = sorted(i for (t, i) in dist if t == "var")
    chks_in = sorted(i for (t, i) in dist if t == "chk")
    var_map = {v: k for k, v in enumerate(vars_in)}
    chk_map = {c: k for k, c in enumerate(chks_in)}
    edges = [(var_map[v], chk_map[c])
             for v in vars_in for c in g.adj_var[v] if ("chk", c) in dist]
    sub = build_graph(len(vars_in), len(chks_in), edges, g.kind)
    # the induced ball is connected, so tree-ness is an edge count check
    is_tree = sub.n_edges == sub.n_var + sub.n_chk - 1
    boundary = [x for x, dd_ in dist.items() if dd_ == d]
    return sub, is_tree, boundary, var_map, chk_map


# ---------------------------------------------------------------------------
# computational trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComputationalTree:
    """Depth-d truncation of the universal cover rooted at a code bit.

    Flat arrays indexed by tree-node id (root = 0): parent (-1 at the
    root), depth in edge hops, proj = original graph index, node_type
    ("var"/"chk"), children tuples.  missing[k] counts graph neighbors of
    proj[k] that were truncated away (nonzero only at depth >= d-0 for
    leaves and used for boundary conventions).
    """

    graph: TannerGraph
    root_graph_node: int
    depth: int
    parent: tuple
    children: tuple
    node_depth: tuple
    proj: tuple
    node_type: tuple
    missing: tuple

    @property
    def n_nodes(self):
        return len(self.parent)


def computational_tree(g, i, d, node_cap=TREE_NODE_CAP):
    """Unroll the universal covering tree of depth d (edge hops, even)
    rooted at code bit i.  Fails with NodeCapExceeded when the tree grows
    past node_cap."""
    if d % 2 != 0 or d < 0:
        raise ValueError("depth must be even and >= 0")
    root_type = "chk" if g.kind == LDGM else "var"
    parent = [-1]
    children = [[]]
    node_depth = [0]
    proj = [i]
    node_type = [root_type]
    missing = [0]
    frontier = [0]
    while frontier:
        nxt = []
        for k in frontier:
            if node_depth[k] == d:
                # truncated: every neighbor except the parent is missing
                deg = len(g.adj_chk[proj[k]] if node_type[k] == "chk" else g.adj_var[proj[k]])
                missing[k] = deg - (0 if parent[k] == -1 else 1)
                continue
            typ, idx = node_type[k], proj[k]
            nbrs = g.adj_chk[idx] if typ == "chk" else g.adj_var[idx]
            par_img = proj[parent[k]] if parent[k] != -1 else None
            skipped_parent = False
            for nb in nbrs:
                if not skipped_parent and par_img is not None and nb == par_img:
                    skipped_parent = True  # one copy of the parent edge only
                    continue
                kid = len(parent)
                if kid >= node_cap:
                    raise NodeCapExceeded(f"tree exceeds {node_cap} nodes")
                parent.append(k)
                children.append([])
                node_depth.append(node_depth[k] + 1)
                proj.append(nb)
                node_type.append("var" if typ == "chk" else "chk")
                missing.append(0)
                children[k].append(kid)
                nxt.append(kid)
        frontier = nxt
    return ComputationalTree(g, i, d, tuple(parent),
                             tuple(tuple(c) for c in children),
                             tuple(node_depth), tuple(proj), tuple(node_type),
                             tuple(missing))


# ---------------------------------------------------------------------------
# self-avoiding walks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelfAvoidingWalk:
    """Alternating variable/check walk v_1 c_1 v_2 ... c_L v_{L+1} with no
    repeated node.  length counts the check nodes traversed; the trivial
    walk (single variable, no checks) has length 0."""

    vars: tuple
    chks: tuple

    @property
    def length(self):
        return len(self.chks)

    @property
    def n_vars(self):
        return len(self.vars)


def enumerate_saws(g, A, B, max_len, cap=SAW_ENUM_CAP):
    """All self-avoiding walks from the variable set A to the variable set
    B with at most max_len check nodes.

    Interior variables avoid A and B entirely (strict endpoint-set
    self-avoidance): a walk ends the moment it reaches B, and may not pass
    through another A node.  When A and B intersect, each shared variable
    contributes one trivial length-0 walk.
    """
    A, B = set(A), set(B)
    for v in A | B:
        if not 0 <= v < g.n_var:
            raise ValueError(f"variable {v} out of range")
    walks = []
    for a in sorted(A & B):
        walks.append(SelfAvoidingWalk((a,), ()))

    def extend(vpath, cpath):
        if len(walks) > cap:
            raise EnumerationCapExceeded(f"more than {cap} walks")
        if len(cpath) == max_len:
            return
        v = vpath[-1]
        for c in g.adj_var[v]:
            if c in cpath:
                continue
            for w in g.adj_chk[c]:
                if w in vpath or (w in A and w not in B):
                    continue
                if w in B:
                    walks.append(SelfAvoidingWalk(vpath + (w,), cpath + (c,)))
                else:
                    extend(vpath + (w,), cpath + (c,))

    for a in sorted(A):
        extend((a,), ())
    return walks


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def save_graph(g, path):
    """Line-oriented text format: header 'kind n_var n_chk', one 'v c'
    edge per line."""
    with open(path, "w") as fh:
        fh.write(f"{g.kind} {g.n_var} {g.n_chk}\n")
        for v, c in g.edges():
            fh.write(f"{v} {c}\n")


def load_graph(path):
    with open(path) as fh:
        kind, n_var, n_chk = fh.readline().split()
        edges = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            v, c = line.split()
            edges.append((int(v), int(c)))
    return build_graph(int(n_var), int(n_chk), edges, kind)
