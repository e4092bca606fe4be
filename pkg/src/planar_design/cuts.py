"""Cut machinery: capped unit-capacity max-flow, global min cut, enumeration
of all minimum cuts, Gomory-Hu trees and connected-cut enumeration."""

from collections import deque
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import DesignError, MIN_CUT_MISMATCH, ORACLE_TOO_LARGE
from .graph import id_key


class FlowNetwork:
    """Undirected capacitated graph on vertex indices 0..n-1.

    Parallel edges are aggregated into capacities. Vertex sets are passed as
    Python int bitmasks.
    """

    def __init__(self, n, pairs):
        self.n = n
        self.cap = [dict() for _ in range(n)]
        for i, j, w in pairs:
            if i == j:
                continue
            self.cap[i][j] = self.cap[i].get(j, 0) + w
            self.cap[j][i] = self.cap[j].get(i, 0) + w

    @classmethod
    def from_graph(cls, G, extra_edges=()):
        idx = G.index
        pairs = [(idx[u], idx[v], 1) for u, v in G.edges.values()]
        pairs.extend((idx[u], idx[v], 1) for u, v in extra_edges)
        return cls(G.n, pairs)

    def max_flow(self, sources, sinks, limit=None):
        """Return (flow value, residual capacities); stops once ``limit`` is reached."""
        res = [dict(d) for d in self.cap]
        n = self.n
        flow = 0
        while limit is None or flow < limit:
            parent = [-2] * n
            queue = deque()
            for i in range(n):
                if sources >> i & 1:
                    parent[i] = -1
                    queue.append(i)
            hit = -1
            while queue and hit < 0:
                x = queue.popleft()
                for y, c in res[x].items():
                    if c > 0 and parent[y] == -2:
                        parent[y] = x
                        if sinks >> y & 1:
                            hit = y
                            break
                        queue.append(y)
            if hit < 0:
                break
            bottleneck = None
            y = hit
            while parent[y] != -1:
                x = parent[y]
                c = res[x][y]
                bottleneck = c if bottleneck is None else min(bottleneck, c)
                y = x
            if limit is not None:
                bottleneck = min(bottleneck, limit - flow)
            y = hit
            while parent[y] != -1:
                x = parent[y]
                res[x][y] -= bottleneck
                res[y][x] += bottleneck
                y = x
            flow += bottleneck
        return flow, res

    def reachable_from(self, res, sources):
        seen = sources
        queue = deque(i for i in range(self.n) if sources >> i & 1)
        while queue:
            x = queue.popleft()
            for y, c in res[x].items():
                if c > 0 and not seen >> y & 1:
                    seen |= 1 << y
                    queue.append(y)
        return seen

    def reaching(self, res, sinks):
        seen = sinks
        queue = deque(i for i in range(self.n) if sinks >> i & 1)
        while queue:
            y = queue.popleft()
            for x in self.cap[y]:
                if res[x][y] > 0 and not seen >> x & 1:
                    seen |= 1 << x
                    queue.append(x)
        return seen

    def min_cut(self, sources, sinks, limit=None):
        """Flow value and the source side (bitmask) of a minimum cut."""
        value, res = self.max_flow(sources, sinks, limit)
        return value, self.reachable_from(res, sources)


def mask_to_set(mask, vertices):
    return frozenset(v for i, v in enumerate(vertices) if mask >> i & 1)


def set_to_mask(vertex_set, index):
    m = 0
    for v in vertex_set:
        m |= 1 << index[v]
    return m


def default_root(G):
    return min(G.vertices, key=id_key)


def min_cut_value(G):
    """Global minimum cut counting parallel edges (0 if disconnected)."""
    if G.n < 2:
        return 0
    if not G.is_connected():
        return 0
    net = FlowNetwork.from_graph(G)
    bound = min(G.degree(v) for v in G.vertices)
    best = bound
    for j in range(1, G.n):
        value, _ = net.max_flow(1, 1 << j, limit=best)
        best = min(best, value)
        if best == 0:
            break
    return best


def is_k_edge_connected(G, k):
    if G.n < 2:
        return True
    if not G.is_connected():
        return k <= 0
    net = FlowNetwork.from_graph(G)
    for j in range(1, G.n):
        value, _ = net.max_flow(1, 1 << j, limit=k)
        if value < k:
            return False
    return True


def stoer_wagner_value(G):
    """Global min cut through networkx (used as an independent cross-check)."""
    if G.n < 2 or not G.is_connected():
        return 0
    value, _ = nx.stoer_wagner(G.to_weighted_graph())
    return value


def enumerate_k_cuts(G, k, root=None, check=True):
    """All minimum cuts of a graph whose minimum cut is exactly ``k``, each as
    the shore avoiding ``root``.

    For the vertex order v1 = root, v2, ..., cuts are partitioned by the first
    vertex outside the root side. Each class is enumerated by branching on the
    side of one undecided vertex, forcing everything outside the span between
    the smallest and largest minimum cut after every flow computation.
    """
    if root is None:
        root = default_root(G)
    if check:
        value = min_cut_value(G)
        if value != k:
            raise DesignError(MIN_CUT_MISMATCH, f"minimum cut is {value}, expected {k}")
    masks = k_cut_masks(G, k, root)
    return [mask_to_set(m, G.vertices) for m in sorted(masks)]


def k_cut_masks(G, k, root, net=None):
    if net is None:
        net = FlowNetwork.from_graph(G)
    n = G.n
    full = (1 << n) - 1
    r = G.index[root]
    order = [r] + [i for i in range(n) if i != r]
    found = set()
    prefix = 0
    for pos in range(1, n):
        prefix |= 1 << order[pos - 1]
        stack = [(prefix, 1 << order[pos])]
        while stack:
            A, B = stack.pop()
            value, res = net.max_flow(A, B, limit=k + 1)
            if value > k:
                continue
            A2 = A | net.reachable_from(res, A)
            B2 = B | (full & net.reaching(res, B))
            free = full & ~(A2 | B2)
            if not free:
                found.add(B2)
                continue
            pick = free & -free
            stack.append((A2, B2 | pick))
            stack.append((A2 | pick, B2))
    return found


@dataclass
class GomoryHuTree:
    edges: list

    def path_min(self, u, v):
        g = nx.Graph()
        for a, b, w in self.edges:
            g.add_edge(a, b, weight=w)
        path = nx.shortest_path(g, u, v)
        return min(g[a][b]["weight"] for a, b in zip(path, path[1:]))


def gomory_hu(G):
    g = G.to_weighted_graph()
    tree = nx.gomory_hu_tree(g, capacity="weight")
    edges = sorted(((u, v, d["weight"]) if id_key(u) <= id_key(v) else (v, u, d["weight"])
                    for u, v, d in tree.edges(data=True)), key=lambda t: (id_key(t[0]), id_key(t[1])))
    return GomoryHuTree(edges)


def _connected_masks(sets, adjacency, n):
    """Vectorized test whether each bitmask in ``sets`` induces a connected subgraph."""
    reach = sets & (~sets + np.uint64(1))
    active = np.ones(len(sets), dtype=bool)
    while active.any():
        cur = reach[active]
        grow = cur.copy()
        for v in range(n):
            has = ((cur >> np.uint64(v)) & np.uint64(1)).astype(bool)
            if has.any():
                grow[has] |= adjacency[v]
        grow &= sets[active]
        changed = grow != cur
        idx = np.flatnonzero(active)
        reach[idx] = grow
        active[idx[~changed]] = False
    return reach == sets


def connected_cut_masks(G, root=None, limit=20):
    """Bitmasks (over G.vertices order) of all connected cuts, as root-avoiding shores."""
    n = G.n
    if n > limit or n > 63:
        raise DesignError(ORACLE_TOO_LARGE, f"{n} vertices exceeds the oracle bound {limit}")
    if root is None:
        root = default_root(G)
    if n < 2:
        return np.zeros(0, dtype=np.uint64)
    r = G.index[root]
    adjacency = np.zeros(n, dtype=np.uint64)
    for u, v in G.edges.values():
        i, j = G.index[u], G.index[v]
        adjacency[i] |= np.uint64(1 << j)
        adjacency[j] |= np.uint64(1 << i)
    others = [i for i in range(n) if i != r]
    t = np.arange(1, 1 << (n - 1), dtype=np.uint64)
    sets = np.zeros(len(t), dtype=np.uint64)
    for bit, vi in enumerate(others):
        sets |= ((t >> np.uint64(bit)) & np.uint64(1)) << np.uint64(vi)
    full = np.uint64((1 << n) - 1)
    ok = _connected_masks(sets, adjacency, n)
    sets = sets[ok]
    ok = _connected_masks(full & ~sets, adjacency, n)
    return sets[ok]


def enumerate_connected_cuts(G, root=None, limit=20):
    masks = connected_cut_masks(G, root, limit)
    return [mask_to_set(int(m), G.vertices) for m in masks]
