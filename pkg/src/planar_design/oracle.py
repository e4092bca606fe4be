"""Brute-force reference solvers.

Nothing here imports the solver modules: cut families are enumerated by
independent code (vertex-subset enumeration or edge-removal with bridge
finding) so that the pipeline and the oracles can disagree when one of them
is wrong.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from .errors import DesignError, INFEASIBLE, ORACLE_TOO_LARGE


@dataclass
class OracleSolution:
    chosen: frozenset
    cost: Fraction


def _vertex_order(G):
    return list(G.vertices)


def _root(G):
    ints = [v for v in G.vertices if isinstance(v, int) and not isinstance(v, bool)]
    if ints:
        return min(ints)
    return min(G.vertices, key=str)


def _bit_connected(mask, adj):
    if mask == 0:
        return False
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        i = low.bit_length() - 1
        new = adj[i] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def _adjacency(n, pairs):
    adj = [0] * n
    for i, j in pairs:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return adj


def connected_vertex_cuts(n, pairs, root_index, allowed=None):
    """All S (bitmask over 0..n-1, restricted to ``allowed``) avoiding the root
    with both S and allowed∖S inducing connected subgraphs."""
    if allowed is None:
        allowed = (1 << n) - 1
    adj = _adjacency(n, pairs)
    members = [i for i in range(n) if allowed >> i & 1 and i != root_index]
    out = []
    for t in range(1, 1 << len(members)):
        S = 0
        for b, i in enumerate(members):
            if t >> b & 1:
                S |= 1 << i
        if _bit_connected(S, adj) and _bit_connected(allowed & ~S, adj):
            out.append(S)
    return out


def edge_connectivity(G):
    if G.n < 2:
        return 0
    g = nx.MultiGraph()
    g.add_nodes_from(G.vertices)
    g.add_edges_from(G.edges.values())
    if not nx.is_connected(g):
        return 0
    simple = nx.Graph()
    simple.add_nodes_from(G.vertices)
    for u, v in G.edges.values():
        w = simple[u][v]["capacity"] + 1 if simple.has_edge(u, v) else 1
        simple.add_edge(u, v, capacity=w)
    best = None
    nodes = list(G.vertices)
    s = nodes[0]
    for t in nodes[1:]:
        val = nx.maximum_flow_value(simple, s, t, capacity="capacity")
        best = val if best is None else min(best, val)
    return best


def _fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _integer_costs(costs):
    fr = [_fraction(c) for c in costs]
    denom = 1
    for f in fr:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    return [int(f * denom) for f in fr], denom


# edge subsets -----------------------------------------------------------


def _edge_cut_masks(G, eids, vertex_masks):
    idx = {v: i for i, v in enumerate(G.vertices)}
    ends = [(idx[G.edges[e][0]], idx[G.edges[e][1]]) for e in eids]
    out = []
    for S in vertex_masks:
        m = 0
        for j, (a, b) in enumerate(ends):
            if (S >> a & 1) != (S >> b & 1):
                m |= 1 << j
        out.append(m)
    return out


def _popcounts(masks, F):
    arr = np.array(masks, dtype=np.uint64) if len(masks) else np.zeros(0, dtype=np.uint64)
    return np.bitwise_count(arr & np.uint64(F))


def _monotone_search(eids, costs, feasible, k_degree, ends, n, limit):
    """Cheapest feasible edge subset for a monotone feasibility predicate.

    Depth-first over deletions in a fixed order; every feasible subset is
    reachable, and a degree lower bound prunes branches.
    """
    m = len(eids)
    if m > 64:
        raise DesignError(ORACLE_TOO_LARGE, f"{m} edges exceeds the oracle bound")
    int_costs, _ = _integer_costs(costs)
    order = sorted(range(m), key=lambda j: (-int_costs[j], j))
    full = (1 << m) - 1
    if not feasible(full):
        raise DesignError(INFEASIBLE, "the full edge set is not feasible")
    incident = [[] for _ in range(n)]
    for j, (a, b) in enumerate(ends):
        incident[a].append(j)
        incident[b].append(j)
    best = [sum(int_costs), full]
    nodes = [0]

    def cost_of(F):
        return sum(int_costs[j] for j in range(m) if F >> j & 1)

    def lower_bound(F, pos):
        removable = 0
        for j in order[pos:]:
            if F >> j & 1:
                removable |= 1 << j
        fixed = F & ~removable
        total2 = 2 * cost_of(fixed)
        for v in range(n):
            have = sum(1 for j in incident[v] if fixed >> j & 1)
            need = k_degree - have
            if need > 0:
                opts = sorted(int_costs[j] for j in incident[v] if removable >> j & 1)
                total2 += sum(opts[:need])
        return (total2 + 1) // 2

    def dfs(F, pos, cost):
        nodes[0] += 1
        if nodes[0] > limit:
            raise DesignError(ORACLE_TOO_LARGE, "search node limit exceeded")
        if cost < best[0] or (cost == best[0] and F < best[1]):
            best[0], best[1] = cost, F
        if lower_bound(F, pos) > best[0]:
            return
        for p in range(pos, m):
            j = order[p]
            G2 = F & ~(1 << j)
            if feasible(G2):
                dfs(G2, p + 1, cost - int_costs[j])

    dfs(full, 0, sum(int_costs))
    F = best[1]
    return frozenset(eids[j] for j in range(m) if F >> j & 1)


def brute_wecss(G, c, k, max_edges=48, node_limit=5_000_000, vertex_limit=16):
    if G.n > vertex_limit:
        raise DesignError(ORACLE_TOO_LARGE, f"{G.n} vertices exceeds the oracle bound")
    eids = list(G.edges)
    if len(eids) > max_edges:
        raise DesignError(ORACLE_TOO_LARGE, f"{len(eids)} edges exceeds the oracle bound")
    idx = {v: i for i, v in enumerate(G.vertices)}
    pairs = [(idx[u], idx[v]) for u, v in G.edges.values()]
    cuts = connected_vertex_cuts(G.n, pairs, idx[_root(G)])
    masks = _edge_cut_masks(G, eids, cuts)
    arr = np.array(masks, dtype=np.uint64) if masks else np.zeros(0, dtype=np.uint64)

    def feasible(F):
        if len(arr) == 0:
            return G.n <= 1
        return bool((np.bitwise_count(arr & np.uint64(F)) >= k).all())

    if G.n >= 2 and not all(G.degree(v) > 0 for v in G.vertices):
        raise DesignError(INFEASIBLE, "isolated vertex")
    chosen = _monotone_search(eids, [c[e] for e in eids], feasible, k, pairs, G.n, node_limit)
    return OracleSolution(chosen, sum((_fraction(c[e]) for e in chosen), Fraction(0)))


def _vertex_cut_requirements(G, k):
    """Edge masks that a k-vertex-connected spanning subgraph must hit: for
    every X with |X| < k, every connected cut of G - X."""
    eids = list(G.edges)
    n = G.n
    idx = {v: i for i, v in enumerate(G.vertices)}
    pairs_by_edge = [(idx[G.edges[e][0]], idx[G.edges[e][1]]) for e in eids]
    masks = set()
    full = (1 << n) - 1
    for size in range(0, k):
        for X in itertools.combinations(range(n), size):
            xm = sum(1 << x for x in X)
            allowed = full & ~xm
            rest = [i for i in range(n) if allowed >> i & 1]
            if len(rest) < 2:
                continue
            pairs = [(a, b) for a, b in pairs_by_edge if allowed >> a & 1 and allowed >> b & 1]
            for S in connected_vertex_cuts(n, pairs, rest[0], allowed):
                m = 0
                for j, (a, b) in enumerate(pairs_by_edge):
                    if allowed >> a & 1 and allowed >> b & 1 and (S >> a & 1) != (S >> b & 1):
                        m |= 1 << j
                masks.add(m)
    return sorted(masks)


def brute_wvcss(G, c, k, max_edges=48, node_limit=5_000_000, vertex_limit=13):
    if G.n > vertex_limit:
        raise DesignError(ORACLE_TOO_LARGE, f"{G.n} vertices exceeds the oracle bound")
    eids = list(G.edges)
    if len(eids) > max_edges:
        raise DesignError(ORACLE_TOO_LARGE, f"{len(eids)} edges exceeds the oracle bound")
    if G.n < k + 1:
        raise DesignError(INFEASIBLE, "too few vertices")
    masks = _vertex_cut_requirements(G, k)
    arr = np.array(masks, dtype=np.uint64) if masks else np.zeros(0, dtype=np.uint64)
    idx = {v: i for i, v in enumerate(G.vertices)}
    pairs = [(idx[u], idx[v]) for u, v in G.edges.values()]

    def feasible(F):
        return bool(((arr & np.uint64(F)) != 0).all())

    chosen = _monotone_search(eids, [c[e] for e in eids], feasible, k, pairs, G.n, node_limit)
    return OracleSolution(chosen, sum((_fraction(c[e]) for e in chosen), Fraction(0)))


# vertex connectivity ------------------------------------------------------


def _components_without(n, adj, removed):
    allowed = ((1 << n) - 1) & ~removed
    return _bit_connected(allowed, adj)


def vertex_connectivity_by_deletion(G):
    """Smallest X whose deletion disconnects G (or n-1 for complete graphs)."""
    n = G.n
    idx = {v: i for i, v in enumerate(G.vertices)}
    adj = _adjacency(n, [(idx[u], idx[v]) for u, v in G.edges.values()])
    for size in range(0, n - 1):
        for X in itertools.combinations(range(n), size):
            xm = sum(1 << x for x in X)
            if not _components_without(n, adj, xm):
                return size
    return max(n - 1, 0)


def vertex_connectivity_by_neighbourhoods(G):
    """Largest k with |Γ(S)| ≥ min(k, |V∖S|) for every connected cut S."""
    n = G.n
    idx = {v: i for i, v in enumerate(G.vertices)}
    pairs = [(idx[u], idx[v]) for u, v in G.edges.values()]
    adj = _adjacency(n, pairs)
    if n <= 1:
        return 0
    if not _bit_connected((1 << n) - 1, adj):
        return 0
    best = n - 1
    full = (1 << n) - 1
    for S in connected_vertex_cuts(n, pairs, 0):
        for side in (S, full & ~S):
            gamma = 0
            for i in range(n):
                if side >> i & 1:
                    gamma |= adj[i]
            gamma &= ~side
            g = bin(gamma).count("1")
            rest = bin(full & ~side).count("1")
            if g < rest:
                best = min(best, g)
    return best


def vertex_connectivity(G, enumeration_limit=14):
    if G.n <= enumeration_limit:
        a = vertex_connectivity_by_deletion(G)
        if G.n <= 12:
            b = vertex_connectivity_by_neighbourhoods(G)
            assert a == b, (a, b)
        return a
    g = nx.Graph()
    g.add_nodes_from(G.vertices)
    g.add_edges_from(G.edges.values())
    return nx.node_connectivity(g)


# augmentation -------------------------------------------------------------


def _bridges(n, ends, alive_mask):
    """Indices of bridges among the alive edges (iterative low-link DFS)."""
    adj = [[] for _ in range(n)]
    for j, (a, b) in enumerate(ends):
        if alive_mask >> j & 1:
            adj[a].append((b, j))
            adj[b].append((a, j))
    disc = [-1] * n
    low = [0] * n
    out = []
    timer = 0
    for s in range(n):
        if disc[s] != -1:
            continue
        disc[s] = low[s] = timer
        timer += 1
        stack = [(s, -1, iter(adj[s]))]
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for w, j in it:
                if j == pe:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, j, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] > disc[u]:
                        out.append(pe)
    return out


def _side_avoiding_root(n, ends, alive_mask, root):
    adj = [[] for _ in range(n)]
    for j, (a, b) in enumerate(ends):
        if alive_mask >> j & 1:
            adj[a].append(b)
            adj[b].append(a)
    seen = {root}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(i for i in range(n) if i not in seen)


def k_cut_shores(G, k):
    """All vertex sets S avoiding the root with exactly k crossing edges, for a
    graph with edge connectivity k. Small graphs enumerate vertex subsets;
    larger ones remove k-1 edges in increasing index order and collect the
    bridges of what remains."""
    n = G.n
    idx = {v: i for i, v in enumerate(G.vertices)}
    eids = list(G.edges)
    ends = [(idx[G.edges[e][0]], idx[G.edges[e][1]]) for e in eids]
    root = idx[_root(G)]
    shores = set()
    if n <= 16:
        pairs = ends
        full = (1 << n) - 1
        for S in connected_vertex_cuts(n, pairs, root):
            crossing = sum(1 for a, b in ends if (S >> a & 1) != (S >> b & 1))
            if crossing == k:
                shores.add(frozenset(i for i in range(n) if S >> i & 1))
        return [frozenset(G.vertices[i] for i in s) for s in shores]
    full = (1 << len(eids)) - 1
    for removed in itertools.combinations(range(len(eids)), k - 1):
        alive = full
        for j in removed:
            alive &= ~(1 << j)
        for b in _bridges(n, ends, alive):
            if removed and b < removed[-1]:
                continue
            side = _side_avoiding_root(n, ends, alive & ~(1 << b), root)
            if side:
                shores.add(side)
    return [frozenset(G.vertices[i] for i in s) for s in shores]


def _cover_search(cut_masks, int_costs, node_limit):
    """Exact weighted hitting set by branch and bound."""
    L = len(int_costs)
    best = [sum(int_costs) + 1, None]
    nodes = [0]

    def packing_bound(uncovered, excluded):
        used = 0
        lb = 0
        for m in sorted(uncovered, key=lambda x: bin(x & ~excluded).count("1")):
            avail = m & ~excluded
            if avail == 0:
                return None
            if avail & used:
                continue
            used |= avail
            lb += min(int_costs[j] for j in range(L) if avail >> j & 1)
        return lb

    def dfs(chosen, cost, uncovered, excluded):
        nodes[0] += 1
        if nodes[0] > node_limit:
            raise DesignError(ORACLE_TOO_LARGE, "search node limit exceeded")
        if not uncovered:
            if cost < best[0] or (cost == best[0] and chosen < best[1]):
                best[0], best[1] = cost, chosen
            return
        lb = packing_bound(uncovered, excluded)
        if lb is None or cost + lb > best[0]:
            return
        target = min(uncovered, key=lambda x: (bin(x & ~excluded).count("1"), x))
        avail = target & ~excluded
        options = sorted((j for j in range(L) if avail >> j & 1), key=lambda j: (int_costs[j], j))
        ex = excluded
        for j in options:
            bit = 1 << j
            dfs(chosen | bit, cost + int_costs[j], [m for m in uncovered if not m & bit], ex)
            ex |= bit

    dfs(0, 0, list(set(cut_masks)), 0)
    return best[1]


def brute_wcap(G, links, c, k, limit=22, search=False, node_limit=2_000_000):
    """Cheapest link set making G + F (k+1)-edge-connected.

    ``links`` is a list of (id, u, v). Link subsets are enumerated when there
    are at most ``limit`` links; with ``search=True`` larger link sets are
    handled by exact branch and bound over the same cut family.
    """
    lam = edge_connectivity(G)
    if lam < k:
        raise DesignError(INFEASIBLE, f"base graph has edge connectivity {lam} < {k}")
    if lam > k:
        return OracleSolution(frozenset(), Fraction(0))
    shores = k_cut_shores(G, k)
    lids = [l[0] for l in links]
    cut_masks = []
    for S in shores:
        m = 0
        for j, (_, u, v) in enumerate(links):
            if (u in S) != (v in S):
                m |= 1 << j
        if m == 0:
            raise DesignError(INFEASIBLE, "a minimum cut is crossed by no link")
        cut_masks.append(m)
    int_costs, denom = _integer_costs([c[l] for l in lids])
    L = len(lids)
    if L <= limit:
        F = _enumerate_subsets(cut_masks, int_costs)
    elif search:
        F = _cover_search(cut_masks, int_costs, node_limit)
    else:
        raise DesignError(ORACLE_TOO_LARGE, f"{L} links exceeds the oracle bound {limit}")
    chosen = frozenset(lids[j] for j in range(L) if F >> j & 1)
    return OracleSolution(chosen, sum((_fraction(c[l]) for l in chosen), Fraction(0)))


def _enumerate_subsets(cut_masks, int_costs):
    L = len(int_costs)
    best_cost, best_mask = None, None
    chunk_bits = min(L, 20)
    high = L - chunk_bits
    low = np.arange(1 << chunk_bits, dtype=np.uint64)
    low_cost = np.zeros(len(low), dtype=np.int64)
    for j in range(chunk_bits):
        low_cost += ((low >> np.uint64(j)) & np.uint64(1)).astype(np.int64) * int_costs[j]
    for h in range(1 << high):
        base = np.uint64(h << chunk_bits)
        subsets = low | base
        ok = np.ones(len(low), dtype=bool)
        for m in cut_masks:
            ok &= (subsets & np.uint64(m)) != 0
        if not ok.any():
            continue
        extra = sum(int_costs[chunk_bits + j] for j in range(high) if h >> j & 1)
        costs = np.where(ok, low_cost + extra, np.iinfo(np.int64).max)
        best_here = costs.min()
        pos = int(np.flatnonzero(costs == best_here)[0])
        if best_cost is None or best_here < best_cost:
            best_cost, best_mask = int(best_here), int(subsets[pos])
    if best_mask is None:
        raise DesignError(INFEASIBLE, "no feasible link subset")
    return best_mask
