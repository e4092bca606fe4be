"""Connectivity augmentation: exact solver, augmentation-safe covers and the
approximation scheme built on snug-path contraction."""

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .cuts import FlowNetwork, k_cut_masks, min_cut_value
from .ecss import check_epsilon
from .errors import DesignError, INFEASIBLE, NOT_K_CONNECTED, PIECE_INFEASIBLE
from .graph import PlanarMultigraph, contract_edges, id_key
from .milp import solve_covering
from .model import CapInstance, Solution, to_fraction
from .safe_cover import build_safe_cover, derive_overlap
from .snug import (_cap_from_joint, contract_snug_paths, cover_path_links, find_snug_structure,
                   minimalize_cap, select_circ_snug, snug_links, thin_links)


def _total(costs, ids):
    return sum((costs[x] for x in ids), Fraction(0))


def with_links(inst, links):
    """Same instance restricted to the given links."""
    links = [tuple(l) for l in links]
    keep = {l[0] for l in links}
    rotation = None
    if inst.joint_rotation is not None:
        dropped = set(inst.link_ids) - keep
        rotation = {v: [e for e in order if e not in dropped] for v, order in inst.joint_rotation.items()}
    costs = {e: c for e, c in inst.costs.items() if e in keep or e in inst.base.edges}
    return CapInstance(inst.base, links, costs, inst.k, inst.root, rotation, dict(inst.meta))


def is_feasible(G, links, k):
    """True if G plus the given (id, u, v) links is (k+1)-edge-connected."""
    if G.n < 2:
        return True
    net = FlowNetwork.from_graph(G, [(u, v) for _, u, v in links])
    for j in range(1, G.n):
        value, _ = net.max_flow(1, 1 << j, limit=k + 1)
        if value < k + 1:
            return False
    return True


def augmented_min_cut(G, links):
    extra = dict(G.edges)
    for lid, u, v in links:
        extra[lid] = (u, v)
    return min_cut_value(PlanarMultigraph(G.vertices, extra))


# exact solver ---------------------------------------------------------------------


def exact_wcap(G, links, costs, k, root=None):
    """Cheapest link set covering every k-cut of G, as a 0/1 covering program."""
    links = [tuple(l) for l in links]
    if G.n < 2:
        return Solution(frozenset(), Fraction(0))
    value = min_cut_value(G)
    if value < k:
        raise DesignError(NOT_K_CONNECTED, f"base graph has minimum cut {value} < {k}")
    if value > k:
        return Solution(frozenset(), Fraction(0), {"cuts": 0})
    if root is None:
        root = min(G.vertices, key=id_key)
    masks = sorted(k_cut_masks(G, k, root))
    usable = [l for l in links if l[1] != l[2]]
    ends = [(1 << G.index[u], 1 << G.index[v]) for _, u, v in usable]
    rows = []
    for m in masks:
        cols = [j for j, (a, b) in enumerate(ends) if bool(m & a) != bool(m & b)]
        if not cols:
            raise DesignError(INFEASIBLE, "some k-cut is crossed by no link")
        rows.append((cols, 1))
    picked = solve_covering([costs[l[0]] for l in usable], rows)
    chosen = frozenset(usable[j][0] for j in picked)
    return Solution(chosen, _total(costs, chosen), {"cuts": len(masks)})


# augmentation-safe covers -----------------------------------------------------------


@dataclass
class AugSafeCover:
    sets: list
    V_U: frozenset
    F_U: frozenset
    well_separated: bool = False
    stats: dict = field(default_factory=dict)


def make_aug_cover(G, links, sets, well_separated=False):
    sets = [frozenset(s) for s in sets]
    count = {}
    for s in sets:
        for v in s:
            count[v] = count.get(v, 0) + 1
    V_U = frozenset(v for v, t in count.items() if t >= 2)
    F_U = frozenset(l for l, u, v in links if u in V_U or v in V_U)
    return AugSafeCover(sets, V_U, F_U, well_separated)


def verify_aug_safe(cover, G, links, k, root=None, witness=False):
    """Every k-cut S is either confined to one set (all crossing edges and
    links inside it) or crossed by a link incident to the overlap V_U."""
    if root is None:
        root = min(G.vertices, key=id_key)
    links = [tuple(l) for l in links if l[1] != l[2]]
    F_U = {l for l, u, v in links if u in cover.V_U or v in cover.V_U}
    pairs = [(e, u, v) for e, (u, v) in G.edges.items()] + links
    idx = G.index
    verts = G.vertices
    for m in sorted(k_cut_masks(G, k, root)):
        crossing = [(e, u, v) for e, u, v in pairs if bool(m >> idx[u] & 1) != bool(m >> idx[v] & 1)]
        if any(e in F_U for e, _, _ in crossing):
            continue
        if any(all(u in s and v in s for _, u, v in crossing) for s in cover.sets):
            continue
        if witness:
            return False, frozenset(v for i, v in enumerate(verts) if m >> i & 1)
        return False
    return (True, None) if witness else True


def lift_cover(sets, cmap):
    """Pre-image of every set under a contraction map."""
    return [frozenset(cmap.preimage(s)) for s in sets]


def contract_cover(sets, cmap):
    """Image of every set under a contraction map."""
    return [frozenset(cmap.image(s)) for s in sets]


# path classification -----------------------------------------------------------------


def classify_paths(structure, cover_sets, contracted, cmap, lifted_sets, tilde_links):
    """Split snug paths into Q1 (contracted vertex in or next to the overlap),
    Q3 (every shore crossed by an overlap link of L~) and case 2 (the rest)."""
    V_prime, _ = derive_overlap(contracted.joint_graph(), cover_sets)
    H = contracted.joint_graph()
    near = set(V_prime)
    for e, (u, v) in H.edges.items():
        if u in V_prime:
            near.add(v)
        if v in V_prime:
            near.add(u)
    V_star = frozenset(cmap.preimage(V_prime))
    overlap_links = [(l, u, v) for l, u, v in tilde_links if u in V_star or v in V_star]
    idx = structure.graph.index
    q1, q3, case2 = [], [], []
    for p in structure.paths:
        u_p = cmap.vertex_map[p.vertices[0]]
        if u_p in near:
            q1.append(p)
            continue
        if all(any(bool(m >> idx[u] & 1) != bool(m >> idx[v] & 1) for _, u, v in overlap_links) for m in p.masks):
            q3.append(p)
            continue
        case2.append(p)
    return q1, case2, q3


def _case2_holds(structure, path, lifted_sets, G, links):
    """Case 2: one lifted set holds the contracted path and every edge or link
    crossing its shores."""
    idx = structure.graph.index
    pairs = [(u, v) for u, v in G.edges.values()] + [(u, v) for _, u, v in links]
    homes = [s for s in lifted_sets if path.vertices[0] in s]
    if len(homes) != 1:
        return False
    home = homes[0]
    for m in path.masks:
        for u, v in pairs:
            if bool(m >> idx[u] & 1) != bool(m >> idx[v] & 1) and not (u in home and v in home):
                return False
    return True


# the approximation scheme ---------------------------------------------------------------


def wcap_delta(eps, ratio):
    return to_fraction(eps) ** 2 / (6 * 345 * to_fraction(ratio) ** 2)


def _piece_instance(inst_q, U):
    """Contract every edge and link with both ends outside U."""
    H = inst_q.joint_graph()
    outside = [e for e, (u, v) in H.edges.items() if u not in U and v not in U]
    P, cmap = contract_edges(H, outside)
    return _cap_from_joint(inst_q, P, cmap), cmap


def ptas_wcap(inst, eps, delta=None, lam=None, piece_solver=None):
    """(1+eps)-approximate augmentation; returns a Solution over original link ids."""
    eps = check_epsilon(eps)
    start = time.perf_counter()
    k = inst.k
    if not is_feasible(inst.base, inst.links, k):
        raise DesignError(INFEASIBLE, f"G + L is not {k + 1}-edge-connected")
    ratio = inst.delta_ratio
    lam = eps / 3 if lam is None else to_fraction(lam)
    d = wcap_delta(eps, ratio) if delta is None else to_fraction(delta)
    solve = piece_solver or (lambda p: exact_wcap(p.base, p.links, p.costs, p.k, p.root))

    base_inst, _ = minimalize_cap(inst)
    G = base_inst.base
    structure = find_snug_structure(G, base_inst.root, k)
    costs = base_inst.costs

    # (1) thinning, (2) path covers
    L_bar = thin_links(base_inst, structure, lam)
    L_P = {i: cover_path_links(structure, p, L_bar, costs) for i, p in enumerate(structure.paths)}
    L_snug = snug_links(structure, L_bar)
    snug_ids = {l[0] for l in L_snug}
    circ = set(select_circ_snug(structure, L_bar, costs))
    L_tilde = [l for l in L_bar if l[0] not in snug_ids or l[0] in circ]

    # (3)-(4) cover of (G + L~)/P_chain with path weights
    tilde_inst = with_links(base_inst, L_tilde)
    contracted, cmap = contract_snug_paths(tilde_inst, structure)
    Hc = contracted.joint_graph()
    w = {cmap.vertex_map[p.vertices[0]]: _total(costs, L_P[i]) for i, p in enumerate(structure.paths)}
    c_joint = {e: (costs[e] if e in contracted.link_ends else Fraction(0)) for e in Hc.edges}
    cover, _ = build_safe_cover(Hc, c_joint, w, d, k + 1, root=contracted.root, build_pieces=False)
    lifted = lift_cover(cover.sets, cmap)

    # (5) classification, (6) L**
    q1, case2, q3 = classify_paths(structure, cover.sets, contracted, cmap, lifted, L_tilde)
    Q = q1 + q3
    q_index = {id(p) for p in Q}
    V_star = frozenset(cmap.preimage(cover.V_U))
    L_tilde_U = {l for l, u, v in L_tilde if u in V_star or v in V_star}
    L_ss = set(L_tilde_U)
    for i, p in enumerate(structure.paths):
        if id(p) in q_index and p in q1:
            L_ss |= set(L_P[i])

    # (7) L*
    in_q = {}
    for p in structure.paths:
        for v in p.vertices:
            in_q[v] = id(p) in q_index
    L_star_ids = {l[0] for l in L_tilde}
    for lid, u, v in L_snug:
        pu, pv = structure.path_of[u], structure.path_of[v]
        if pu == pv:
            if not in_q[u]:
                L_star_ids.add(lid)
        elif not (in_q[u] and in_q[v]):
            L_star_ids.add(lid)
    L_star = [l for l in L_bar if l[0] in L_star_ids]

    # (8) pieces of (G, L*)/Q
    star_inst = with_links(base_inst, L_star)
    inst_q, qmap = contract_snug_paths(star_inst, structure, Q)
    piece_sets = contract_cover(lifted, qmap)
    F = set(L_ss)
    piece_stats = []
    for i, U in enumerate(piece_sets):
        t0 = time.perf_counter()
        piece, _ = _piece_instance(inst_q, U)
        sol = solve(piece)
        F |= set(sol.chosen)
        piece_stats.append({"i": cover.original_indices[i], "n": piece.base.n, "m": piece.base.m,
                            "links": len(piece.links), "cost": sol.cost,
                            "millis": round(1000 * (time.perf_counter() - t0), 3)})

    # (9) assemble and certify on the input instance
    ends = inst.link_ends
    chosen = [(l, *ends[l]) for l in sorted(F, key=id_key)]
    if not is_feasible(inst.base, chosen, k):
        raise DesignError(PIECE_INFEASIBLE, "assembled link set leaves a k-cut uncovered")
    cost = _total(inst.costs, F)
    stats = {
        "eps": eps, "lambda": lam, "delta": d, "cost_ratio": ratio,
        "n_minimal": G.n, "links": len(inst.links), "L_bar": len(L_bar), "L_snug": len(L_snug),
        "L_circ_snug": len(circ), "L_tilde": len(L_tilde), "L_star": len(L_star),
        "snug_paths": len(structure.paths), "Q1": len(q1), "Q3": len(q3), "case2": len(case2),
        "c_L_double_star": _total(costs, L_ss), "c_L_bar_minus_snug": _total(costs, [l[0] for l in L_bar if l[0] not in snug_ids]),
        "c_L_P_sum": sum((_total(costs, s) for s in L_P.values()), Fraction(0)),
        "c_L_circ_snug": _total(costs, circ),
        "M": cover.M, "offset": cover.offset, "pieces": len(piece_sets), "piece_stats": piece_stats,
        "millis": round(1000 * (time.perf_counter() - start), 3),
    }
    cert = {"min_cut": augmented_min_cut(inst.base, chosen)}
    return Solution(frozenset(F), cost, cert, stats)
