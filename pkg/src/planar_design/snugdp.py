"""Exact augmentation by dynamic programming over a nice tree decomposition
of the graph with every snug path contracted to a node."""

import itertools
from fractions import Fraction

from .cap import is_feasible
from .cuts import FlowNetwork, min_cut_value
from .errors import DesignError, INFEASIBLE, INVALID_DECOMPOSITION
from .graph import id_key
from .model import Solution
from .snug import find_snug_structure, interval_cover, minimalize_cap
from .treedec import FORGET, INTRODUCE, JOIN, LEAF, make_nice, tree_decomposition, validate_nice


class _Nodes:
    """Snug paths and leftover vertices as the nodes of the contracted graph."""

    def __init__(self, inst, structure):
        G = inst.base
        self.G = G
        self.k = inst.k
        self.idx = G.index
        self.members = {}
        self.shores = {}  # node -> list of internal shore masks, shore m at position m-1
        self.outer = {}  # node -> mask of S_0 for path nodes
        self.node_of = {}
        for p in structure.paths:
            rep = min(p.vertices, key=id_key)
            self.members[rep] = list(p.vertices)
            self.shores[rep] = list(p.masks[1:-1])
            self.outer[rep] = p.masks[0]
        for v in G.vertices:
            if v not in structure.snug:
                self.members[v] = [v]
                self.shores[v] = []
        for rep, vs in self.members.items():
            for v in vs:
                self.node_of[v] = rep
        self.mask = {rep: sum(1 << self.idx[v] for v in vs) for rep, vs in self.members.items()}
        self.position = {v: i for vs in self.members.values() for i, v in enumerate(vs)}
        self.W = {}
        for rep, m in self.outer.items():
            nodes = {self.node_of[v] for i, v in enumerate(G.vertices) if m >> i & 1}
            if sum(self.mask[x] for x in nodes) != m:
                raise AssertionError(f"outer shore of path {rep!r} splits a node")
            self.W[rep] = frozenset(nodes)

    def nodes(self):
        return sorted(self.members, key=id_key)

    def node_pairs(self, links):
        pairs = set()
        for u, v in self.G.edges.values():
            a, b = self.node_of[u], self.node_of[v]
            if a != b:
                pairs.add((a, b) if id_key(a) <= id_key(b) else (b, a))
        for _, u, v in links:
            a, b = self.node_of[u], self.node_of[v]
            if a != b:
                pairs.add((a, b) if id_key(a) <= id_key(b) else (b, a))
        return sorted(pairs, key=lambda t: (id_key(t[0]), id_key(t[1])))


def snug_treewidth(inst):
    """Heuristic width of (G + L)/P_chain for a minimalized copy of the instance."""
    m, _ = minimalize_cap(inst)
    if m.base.n <= 1:
        return 0
    structure = find_snug_structure(m.base, m.root, m.k)
    nodes = _Nodes(m, structure)
    width, _, _ = tree_decomposition(nodes.nodes(), nodes.node_pairs(m.links))
    return width


def _subsets(b):
    return range(1, 1 << b)


def snugtw_dp(inst, nice_td=None, check=True):
    """Optimum link set for a k-WCAP instance via the snug-treewidth DP."""
    k = inst.k
    m, _ = minimalize_cap(inst)
    G = m.base
    links = [l for l in m.links if l[1] != l[2]]
    ends_all = dict(G.edges)
    for lid, u, v in links:
        ends_all[lid] = (u, v)
    if not is_feasible(G, links, k):
        raise DesignError(INFEASIBLE, f"G + L is not {k + 1}-edge-connected")
    if G.n <= 1 or min_cut_value(G) > k:
        return Solution(frozenset(), Fraction(0), {"bags": 0})
    structure = find_snug_structure(G, m.root, k)
    nodes = _Nodes(m, structure)
    pairs = nodes.node_pairs(links)
    root_node = nodes.node_of[m.root]
    if nice_td is None:
        nice_td = make_nice(nodes.nodes(), pairs, root_node)
    else:
        validate_nice(nice_td, nodes.nodes(), pairs, root_node)
    runner = _Runner(nodes, links, m.costs, k, nice_td, check)
    chosen, cost = runner.run()
    return Solution(frozenset(chosen), cost, {"width": nice_td.width, "bags": len(nice_td.bags),
                                              "states": runner.max_states})


class _Runner:
    def __init__(self, nodes, links, costs, k, td, check):
        self.N = nodes
        self.k = k
        self.td = td
        self.check = check
        self.costs = costs
        self.G = nodes.G
        idx = nodes.idx
        self.link_ends = {l: (1 << idx[u], 1 << idx[v]) for l, u, v in links}
        self.link_nodes = {l: (nodes.node_of[u], nodes.node_of[v]) for l, u, v in links}
        self.edge_ends = [(1 << idx[u], 1 << idx[v]) for u, v in self.G.edges.values()]
        self.edge_pairs = [(idx[u], idx[v], 1) for u, v in self.G.edges.values()]
        self.max_states = 0
        self._pi_cache = {}

    # per-bag geometry ---------------------------------------------------------

    def _prepare(self):
        td = self.td
        self.below = {}
        self.order = td.postorder()
        subtree = {}
        for i in self.order:
            b = td.bags[i]
            s = set(b.bag)
            for c in b.children:
                s |= subtree[c]
            subtree[i] = s
            self.below[i] = frozenset(s - b.bag)
        self.down_mask = {i: sum((self.N.mask[x] for x in self.below[i]), 0) for i in self.order}

    def _down_edges(self, i):
        d = self.down_mask[i]
        return [p for p, (a, b) in zip(self.edge_pairs, self.edge_ends) if (a | b) & d]

    # state helpers ---------------------------------------------------------------

    def _crosses(self, lid, mask):
        a, b = self.link_ends[lid]
        return bool(mask & a) != bool(mask & b)

    def _coverage(self, node, F):
        bits = 0
        for m, shore in enumerate(self.N.shores[node]):
            if any(self._crosses(l, shore) for l in F):
                bits |= 1 << m
        return bits

    def _pi(self, i, bag, F):
        key = (i, F)
        hit = self._pi_cache.get(key)
        if hit is not None:
            return hit
        idx = self.N.idx
        pairs = list(self._down_edge_cache[i])
        for l in F:
            u, v = self.link_ends[l]
            pairs.append((u.bit_length() - 1, v.bit_length() - 1, 1))
        net = FlowNetwork(self.G.n, pairs)
        masks = [self.N.mask[x] for x in bag]
        full = (1 << len(bag)) - 1
        out = []
        for Z in _subsets(len(bag)):
            if Z == full:
                out.append(0)
                continue
            src = sum(masks[t] for t in range(len(bag)) if Z >> t & 1)
            snk = sum(masks[t] for t in range(len(bag)) if not Z >> t & 1)
            value, _ = net.max_flow(src, snk, limit=self.k + 1)
            out.append(min(value, self.k + 1))
        res = tuple(out)
        self._pi_cache[key] = res
        return res

    @staticmethod
    def _better(a, b):
        return b is None or (a[0], a[1]) < (b[0], b[1])

    def _store(self, table, Q, pi, F):
        cost = sum((self.costs[l] for l in F), Fraction(0))
        ids = tuple(sorted((id_key(l) for l in F)))
        entry = (cost, ids, F)
        key = (Q, pi)
        if self._better(entry, table.get(key)):
            table[key] = entry

    # transitions -------------------------------------------------------------------

    def run(self):
        self._prepare()
        self._down_edge_cache = {i: self._down_edges(i) for i in self.order}
        tables = {}
        for i in self.order:
            b = self.td.bags[i]
            if b.kind == LEAF:
                t = {((0,), (0,)): (Fraction(0), (), frozenset())}
            elif b.kind == INTRODUCE:
                t = self._introduce(i, tables[b.children[0]], b.children[0])
            elif b.kind == FORGET:
                t = self._forget(i, tables[b.children[0]], b.children[0])
            elif b.kind == JOIN:
                t = self._join(i, tables[b.children[0]], tables[b.children[1]])
            else:
                raise DesignError(INVALID_DECOMPOSITION, f"unknown bag kind {b.kind}")
            for c in b.children:
                tables.pop(c, None)
            tables[i] = t
            self.max_states = max(self.max_states, len(t))
        root = tables[self.td.root]
        if not root:
            raise DesignError(INFEASIBLE, "no link set covers every k-cut")
        best = min(root.values(), key=lambda e: (e[0], e[1]))
        return sorted(best[2], key=id_key), best[0]

    def _sorted_bag(self, i):
        return sorted(self.td.bags[i].bag, key=id_key)

    def _introduce(self, i, child, j):
        w = self.td.bags[i].node
        bag = self._sorted_bag(i)
        old = self._sorted_bag(j)
        pos_old = {x: t for t, x in enumerate(old)}
        full_w = (1 << len(self.N.shores[w])) - 1
        down_edges_j = [(a, b) for a, b in self.edge_ends if (a | b) & self.down_mask[j]]
        threshold = None
        meet = 0
        if w in self.N.W:
            outer = self.N.outer[w]
            threshold = sum(1 for a, b in down_edges_j if bool(outer & a) != bool(outer & b))
            meet = sum(1 << pos_old[x] for x in self.N.W[w] if x in pos_old)
        out = {}
        for (Q, pi, ), (cost, ids, F) in child.items():
            if full_w and meet and pi[meet - 1] > threshold:
                qw = full_w
            else:
                qw = 0
            if self.check and full_w and qw != self._coverage(w, F):
                raise AssertionError(f"introduce criterion disagrees with direct coverage at node {w!r}")
            Qn = tuple(qw if x == w else Q[pos_old[x]] for x in bag)
            pin = []
            for Z in _subsets(len(bag)):
                Zold = 0
                has_w = False
                for t, x in enumerate(bag):
                    if Z >> t & 1:
                        if x == w:
                            has_w = True
                        else:
                            Zold |= 1 << pos_old[x]
                pin.append(0 if Zold == 0 else pi[Zold - 1])
            key = (Qn, tuple(pin))
            entry = (cost, ids, F)
            if self._better(entry, out.get(key)):
                out[key] = entry
        return out

    def _join(self, i, left, right):
        out = {}
        cap = self.k + 1
        b = len(self.td.bags[i].bag)
        full = (1 << b) - 1
        for (Q1, p1), (c1, _, F1) in left.items():
            for (Q2, p2), (c2, _, F2) in right.items():
                Q = tuple(a | c for a, c in zip(Q1, Q2))
                pi = tuple(0 if Z == full else min(cap, p1[Z - 1] + p2[Z - 1]) for Z in _subsets(b))
                F = F1 | F2
                self._store(out, Q, pi, F)
        return out

    def _pair_options(self, w, u, cand):
        """Cheapest link set of size <= 2 for every reachable (nonempty,
        coverage on w, coverage on u) outcome."""
        best = {(False, 0, 0): (Fraction(0), (), frozenset())}
        for size in (1, 2):
            for combo in itertools.combinations(cand, size):
                F = frozenset(combo)
                key = (True, self._coverage(w, F), self._coverage(u, F))
                cost = sum((self.costs[l] for l in F), Fraction(0))
                entry = (cost, tuple(sorted(id_key(l) for l in F)), F)
                if self._better(entry, best.get(key)):
                    best[key] = entry
        return [e[2] for e in best.values()]

    def _forget(self, i, child, j):
        w = self.td.bags[i].node
        bag = self._sorted_bag(i)
        old = self._sorted_bag(j)
        pos_old = {x: t for t, x in enumerate(old)}
        wmask = self.N.mask[w]
        bag_mask = sum(self.N.mask[x] for x in bag)
        per_u = []
        intra = []
        for l, (a, b) in self.link_nodes.items():
            if a == w and b == w:
                pa, pb = sorted((self.N.position[self.G.vertices[self.link_ends[l][0].bit_length() - 1]],
                                 self.N.position[self.G.vertices[self.link_ends[l][1].bit_length() - 1]]))
                if pa < pb:
                    intra.append((l, pa + 1, pb, self.costs[l]))
        for u in bag:
            cand = sorted((l for l, (a, b) in self.link_nodes.items() if {a, b} == {w, u}), key=id_key)
            per_u.append(self._pair_options(w, u, cand))
        e_w_bag = sum(1 for a, b in self.edge_ends if (a & wmask and b & bag_mask) or (b & wmask and a & bag_mask))
        t_w = len(self.N.shores[w])
        full_w = (1 << t_w) - 1
        required = w in self.N.W and self.N.W[w] <= self.below[j]
        w_alone = 1 << pos_old[w]
        interval_memo = {}
        out = {}
        for (Q, pi), (cost, ids, F) in child.items():
            base_cov = Q[pos_old[w]]
            for combo in itertools.product(*per_u):
                N1 = frozenset().union(*combo) if combo else frozenset()
                if pi[w_alone - 1] + e_w_bag + len(N1) < self.k + 1:
                    continue
                cov = base_cov | self._coverage(w, N1)
                options = [frozenset()]
                if cov != full_w:
                    missing = full_w & ~cov
                    lo = (missing & -missing).bit_length()
                    hi = missing.bit_length()
                    if missing != ((1 << hi) - 1) ^ ((1 << (lo - 1)) - 1):
                        raise AssertionError("uncovered internal shores are not an interval")
                    if (lo, hi) not in interval_memo:
                        cover = interval_cover(lo, hi, intra)
                        interval_memo[(lo, hi)] = None if cover is None else frozenset(cover)
                    middle = interval_memo[(lo, hi)]
                    options = [] if required else [frozenset()]
                    if middle is not None:
                        options.append(middle)
                for N2 in options:
                    Fn = F | N1 | N2
                    Qn = tuple(Q[pos_old[x]] | self._coverage(x, N1 | N2) for x in bag)
                    pin = self._pi(i, bag, Fn)
                    self._store(out, Qn, pin, Fn)
        return out
