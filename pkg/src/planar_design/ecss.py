"""Approximation schemes for minimum-cost k-edge- and k-vertex-connected
spanning subgraphs of planar graphs, with exact piece solvers."""

import itertools
import time
from fractions import Fraction

import networkx as nx

from .cuts import FlowNetwork, is_k_edge_connected, min_cut_value
from .errors import (DesignError, INFEASIBLE, INVALID_EPSILON, K_TOO_LARGE,
                     PIECE_INFEASIBLE)
from .graph import id_key
from .milp import solve_covering
from .model import Solution, WecssInstance, to_fraction
from .safe_cover import build_safe_cover, vertex_safe_contract


def check_epsilon(eps):
    eps = to_fraction(eps)
    if not (0 < eps <= 1):
        raise DesignError(INVALID_EPSILON, f"epsilon must lie in (0, 1], got {eps}")
    return eps


def _keep_cheapest_parallel(inst, per_pair):
    groups = {}
    for e, (u, v) in inst.graph.edges.items():
        key = (u, v) if id_key(u) <= id_key(v) else (v, u)
        groups.setdefault(key, []).append(e)
    keep = set()
    for es in groups.values():
        es.sort(key=lambda e: (inst.costs[e], id_key(e)))
        keep.update(es[:per_pair])
    graph = inst.graph.restrict(keep)
    return WecssInstance(graph, {e: inst.costs[e] for e in keep}, inst.k, inst.root, dict(inst.meta))


def preprocess_wecss(inst):
    """Drop every edge that is not among the k cheapest between its endpoints."""
    if not is_k_edge_connected(inst.graph, inst.k):
        raise DesignError(INFEASIBLE, f"graph is not {inst.k}-edge-connected")
    return _keep_cheapest_parallel(inst, inst.k)


def vertex_connectivity_at_least(graph, k):
    if graph.n < k + 1:
        return False
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from(graph.edges.values())
    if not nx.is_connected(g):
        return k <= 0
    return nx.node_connectivity(g) >= k


def preprocess_wvcss(inst):
    if inst.k > 5:
        raise DesignError(K_TOO_LARGE, "a planar graph is at most 5-vertex-connected")
    simple = _keep_cheapest_parallel(inst, 1)
    if not vertex_connectivity_at_least(simple.graph, inst.k):
        raise DesignError(INFEASIBLE, f"graph is not {inst.k}-vertex-connected")
    return simple


def _total(costs, chosen):
    return sum((costs[e] for e in chosen), Fraction(0))


# exact solvers --------------------------------------------------------------


def _edge_cut_separation(graph, eids, chosen, k):
    """Violated cut constraints for the current selection: for every vertex v,
    a minimum root-v cut of value < k in (V, chosen)."""
    idx = graph.index
    net = FlowNetwork(graph.n, [(idx[graph.edges[e][0]], idx[graph.edges[e][1]], 1) for e in chosen])
    full = (1 << graph.n) - 1
    sides = set()
    for j in range(1, graph.n):
        value, res = net.max_flow(1, 1 << j, limit=k)
        if value < k:
            src = net.reachable_from(res, 1)
            sides.add(full & ~src)
            sides.add(net.reaching(res, 1 << j))
    rows = []
    pos = {e: i for i, e in enumerate(eids)}
    for S in sides:
        cols = [pos[e] for e in eids
                if (S >> idx[graph.edges[e][0]] & 1) != (S >> idx[graph.edges[e][1]] & 1)]
        rows.append((cols, k))
    return rows


def exact_wecss(graph, costs, k, method="milp"):
    """Minimum-cost k-edge-connected spanning subgraph of ``graph``."""
    if graph.n <= 1:
        return Solution(frozenset(), Fraction(0), {"min_cut": None})
    if not is_k_edge_connected(graph, k):
        raise DesignError(INFEASIBLE, f"piece is not {k}-edge-connected")
    if method == "bnb":
        chosen = _wecss_branch_and_bound(graph, costs, k)
    else:
        chosen = _wecss_milp(graph, costs, k)
    return Solution(frozenset(chosen), _total(costs, chosen), {"min_cut": min_cut_value(graph.restrict(chosen))})


def _wecss_milp(graph, costs, k):
    eids = list(graph.edges)
    pos = {e: i for i, e in enumerate(eids)}
    rows = [([pos[e] for e in graph.incident(v)], k) for v in graph.vertices]
    fixed = [pos[e] for e in eids if costs[e] == 0]
    cvec = [costs[e] for e in eids]
    while True:
        picked = solve_covering(cvec, rows, fixed_one=fixed)
        chosen = [eids[j] for j in sorted(picked)]
        new_rows = _edge_cut_separation(graph, eids, chosen, k)
        if not new_rows:
            return chosen
        rows.extend(new_rows)


def _wecss_branch_and_bound(graph, costs, k):
    """Branch over edge inclusion. Lower bound: for each vertex the cheapest
    half-costs completing its degree to k; pruning: the graph of all
    non-excluded edges must stay k-edge-connected."""
    eids = sorted(graph.edges, key=lambda e: (-costs[e], id_key(e)))
    best = [None, None]

    def lower_bound(included, undecided):
        total = Fraction(0)
        for v in graph.vertices:
            inc = [costs[e] for e in graph.incident(v) if e in included]
            need = k - len(inc)
            total += sum(inc, Fraction(0))
            if need > 0:
                opts = sorted(costs[e] for e in graph.incident(v) if e in undecided)
                if len(opts) < need:
                    return None
                total += sum(opts[:need], Fraction(0))
        return total / 2

    def rec(i, included, excluded):
        undecided = set(eids[i:])
        lb = lower_bound(included, undecided)
        if lb is None or (best[0] is not None and lb >= best[0]):
            return
        if is_k_edge_connected(graph.restrict(included), k):
            cost = _total(costs, included)
            if best[0] is None or cost < best[0]:
                best[0], best[1] = cost, set(included)
            return
        if i == len(eids):
            return
        e = eids[i]
        upper = set(graph.edges) - excluded - {e}
        if costs[e] != 0 and is_k_edge_connected(graph.restrict(upper), k):
            rec(i + 1, included, excluded | {e})
        rec(i + 1, included | {e}, excluded)

    rec(0, set(), set())
    if best[1] is None:
        raise DesignError(INFEASIBLE, "no k-edge-connected spanning subgraph")
    return sorted(best[1], key=id_key)


def _components(vertices, adjacency, removed):
    seen = set(removed)
    comps = []
    for s in vertices:
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _vertex_cut_separation(graph, eids, chosen, k):
    adjacency = {v: set() for v in graph.vertices}
    for e in chosen:
        u, v = graph.edges[e]
        adjacency[u].add(v)
        adjacency[v].add(u)
    pos = {e: i for i, e in enumerate(eids)}
    rows = []
    seen = set()
    for size in range(0, k):
        for X in itertools.combinations(graph.vertices, size):
            comps = _components(graph.vertices, adjacency, X)
            if len(comps) <= 1:
                continue
            Xs = set(X)
            for comp in comps:
                cols = tuple(pos[e] for e in eids
                             if graph.edges[e][0] not in Xs and graph.edges[e][1] not in Xs
                             and (graph.edges[e][0] in comp) != (graph.edges[e][1] in comp))
                if cols not in seen:
                    seen.add(cols)
                    rows.append((list(cols), 1))
    return rows


def exact_wvcss(graph, costs, k):
    """Minimum-cost k-vertex-connected spanning subgraph (simple input)."""
    if not vertex_connectivity_at_least(graph, k):
        raise DesignError(INFEASIBLE, f"piece is not {k}-vertex-connected")
    eids = list(graph.edges)
    pos = {e: i for i, e in enumerate(eids)}
    rows = [([pos[e] for e in graph.incident(v)], k) for v in graph.vertices]
    fixed = [pos[e] for e in eids if costs[e] == 0]
    cvec = [costs[e] for e in eids]
    while True:
        picked = solve_covering(cvec, rows, fixed_one=fixed)
        chosen = [eids[j] for j in sorted(picked)]
        new_rows = _vertex_cut_separation(graph, eids, chosen, k)
        if not new_rows:
            return Solution(frozenset(chosen), _total(costs, chosen), {"vertex_connected": True})
        rows.extend(new_rows)


def exact_wecss_piece(piece, c_i, k, method="milp"):
    return exact_wecss(piece.graph, c_i, k, method)


# gluing -----------------------------------------------------------------------


def glue(piece_solutions, E_U, G=None, k=None, vertex=False):
    """F = E_U ∪ ⋃ (F_i ∩ E[U_i]). ``piece_solutions`` holds (U_i, F_i) pairs."""
    F = set(E_U)
    for U_i, F_i in piece_solutions:
        for e in F_i:
            if G is not None and e in G.edges:
                u, v = G.edges[e]
                if u in U_i and v in U_i:
                    F.add(e)
            elif G is None:
                F.add(e)
    if G is not None and k is not None:
        sub = G.restrict(F)
        ok = vertex_connectivity_at_least(sub, k) if vertex else is_k_edge_connected(sub, k)
        if not ok:
            raise DesignError(PIECE_INFEASIBLE, "glued solution violates the connectivity requirement")
    return F


# approximation schemes ------------------------------------------------------------


def _delta_for(eps, ratio, delta):
    if delta is not None:
        return to_fraction(delta)
    return eps / (6 * ratio)


def ptas_wecss(inst, eps, delta=None, method="milp"):
    eps = check_epsilon(eps)
    start = time.perf_counter()
    pre = preprocess_wecss(inst)
    G, c, k = pre.graph, pre.costs, pre.k
    ratio = pre.delta_ratio
    d = _delta_for(eps, ratio, delta)
    cover, pieces = build_safe_cover(G, c, {}, d, k, root=pre.root)
    piece_stats = []
    results = []
    for piece in pieces:
        t0 = time.perf_counter()
        c_i = piece.costs(c)
        sol = exact_wecss(piece.graph, c_i, k, method)
        if sol.certificate.get("min_cut") is not None and sol.certificate["min_cut"] < k:
            raise DesignError(PIECE_INFEASIBLE, f"piece {piece.index} solution is infeasible")
        results.append((piece.vertex_set, sol.chosen))
        piece_stats.append({"i": cover.original_indices[piece.index], "n": piece.graph.n, "m": piece.graph.m,
                            "width_bound": 3 * (cover.betas[piece.index] - cover.alphas[piece.index]) + 5,
                            "millis": round(1000 * (time.perf_counter() - t0), 3)})
    F = glue(results, cover.E_U, G, k)
    cost = _total(c, F)
    c_E = _total(c, G.edges)
    c_EU = _total(c, cover.E_U)
    stats = {
        "delta": d, "M": cover.M, "offset": cover.offset, "pieces": len(cover.sets),
        "c_E_U": c_EU, "c_E": c_E, "cost_ratio": ratio, "piece_stats": piece_stats,
        "cover_bound_ok": c_EU <= d * c_E,
        "millis": round(1000 * (time.perf_counter() - start), 3),
    }
    return Solution(frozenset(F), cost, {"min_cut": min_cut_value(G.restrict(F))}, stats)


def ptas_wvcss(inst, eps, delta=None):
    eps = check_epsilon(eps)
    start = time.perf_counter()
    pre = preprocess_wvcss(inst)
    G, c, k = pre.graph, pre.costs, pre.k
    ratio = pre.delta_ratio
    d = _delta_for(eps, ratio, delta)
    cover, _ = build_safe_cover(G, c, {}, d, k, root=pre.root, build_pieces=False)
    results = []
    piece_stats = []
    for i, U_i in enumerate(cover.sets):
        t0 = time.perf_counter()
        outside = set(G.vertices) - U_i
        if outside:
            piece = vertex_safe_contract(G, set(G.edges), outside, k)
            graph = piece.graph
            c_i = {e: (Fraction(0) if e not in piece.kept_edges or e in cover.E_U else c[e]) for e in graph.edges}
        else:
            graph = G
            c_i = {e: (Fraction(0) if e in cover.E_U else c[e]) for e in graph.edges}
        sol = exact_wvcss(graph, c_i, k)
        results.append((U_i, sol.chosen))
        piece_stats.append({"i": cover.original_indices[i], "n": graph.n, "m": graph.m,
                            "millis": round(1000 * (time.perf_counter() - t0), 3)})
    F = glue(results, cover.E_U, G, k, vertex=True)
    cost = _total(c, F)
    c_EU = _total(c, cover.E_U)
    c_E = _total(c, G.edges)
    stats = {"delta": d, "M": cover.M, "offset": cover.offset, "pieces": len(cover.sets),
             "c_E_U": c_EU, "c_E": c_E, "cost_ratio": ratio, "piece_stats": piece_stats,
             "cover_bound_ok": c_EU <= d * c_E,
             "millis": round(1000 * (time.perf_counter() - start), 3)}
    return Solution(frozenset(F), cost, {"vertex_connected": vertex_connectivity_at_least(G.restrict(F), k)}, stats)
