"""Snug vertices, snug paths and the link reductions built on them."""

from dataclasses import dataclass, field
from fractions import Fraction

from .cuts import FlowNetwork, is_k_edge_connected, k_cut_masks, min_cut_value
from .errors import DesignError, INFEASIBLE, NOT_K_CONNECTED, NOT_MINIMAL
from .graph import PlanarMultigraph, contract_edges, id_key
from .model import CapInstance


@dataclass
class SnugPath:
    vertices: list  # u_0..u_t in chain order
    shores: list  # vertex sets S_0..S_{t+1}, strictly nested, all avoiding the root
    masks: list  # the same shores as bitmasks over G.vertices

    @property
    def internal_shores(self):
        return self.shores[1:-1]


@dataclass
class SnugStructure:
    root: object
    k: int
    graph: PlanarMultigraph
    cut_masks: list
    snug: set
    shore_masks: dict  # v -> (S1 mask, S2 mask)
    arcs: list
    paths: list
    path_of: dict = field(default_factory=dict)

    def shores(self, v):
        s1, s2 = self.shore_masks[v]
        return self._set(s1), self._set(s2)

    def _set(self, mask):
        return frozenset(v for i, v in enumerate(self.graph.vertices) if mask >> i & 1)

    @property
    def n_k(self):
        return sum(1 for v in self.graph.vertices if self.graph.degree(v) == self.k)

    def to_json(self):
        key = lambda s: sorted(s, key=id_key)
        return {
            "root": self.root,
            "k": self.k,
            "snug": key(self.snug),
            "arcs": [list(a) for a in self.arcs],
            "paths": [{"vertices": list(p.vertices), "shores": [key(s) for s in p.shores]} for p in self.paths],
        }


def _edge_masks(G):
    return {e: (1 << G.index[u], 1 << G.index[v]) for e, (u, v) in G.edges.items()}


def _crosses(mask, bu, bv):
    return bool(mask & bu) != bool(mask & bv)


def find_snug_structure(G, r, k, masks=None):
    """Snug vertices, their unique shores, the chain graph and its paths."""
    if min_cut_value(G) < k:
        raise DesignError(NOT_K_CONNECTED, f"graph is not {k}-edge-connected")
    if masks is None:
        masks = k_cut_masks(G, k, r)
    masks = sorted(masks)
    mask_set = set(masks)
    for e, (bu, bv) in _edge_masks(G).items():
        if not any(_crosses(m, bu, bv) for m in masks):
            raise DesignError(NOT_MINIMAL, f"edge {e!r} lies in no {k}-cut")
    verts = G.vertices
    pairs = {}
    for S in masks:
        rest = S
        while rest:
            bit = rest & -rest
            rest ^= bit
            if S ^ bit in mask_set:
                v = verts[bit.bit_length() - 1]
                if G.degree(v) >= k + 1:
                    pairs.setdefault(v, []).append((S ^ bit, S))
    shore_masks = {}
    for v, found in pairs.items():
        if len(found) != 1:
            raise AssertionError(f"snug vertex {v!r} has {len(found)} shore pairs")
        shore_masks[v] = found[0]
    snug = set(shore_masks)
    by_inner = {s1: v for v, (s1, _) in shore_masks.items()}
    succ, arcs = {}, []
    for u in sorted(snug, key=id_key):
        v = by_inner.get(shore_masks[u][1])
        if v is not None:
            succ[u] = v
            arcs.append((u, v))
    has_pred = set(succ.values())
    paths, path_of = [], {}
    for u in sorted(snug, key=id_key):
        if u in has_pred:
            continue
        seq = [u]
        while seq[-1] in succ:
            seq.append(succ[seq[-1]])
        shores = [shore_masks[seq[0]][0]] + [shore_masks[x][1] for x in seq]
        path = SnugPath(seq, [], shores)
        path_of.update({x: len(paths) for x in seq})
        paths.append(path)
    if len(path_of) != len(snug):
        raise AssertionError("chain graph contains a directed cycle")
    struct = SnugStructure(r, k, G, masks, snug, shore_masks, arcs, paths, path_of)
    for p in paths:
        p.shores = [struct._set(m) for m in p.masks]
    return struct


def minimalize(G, k, r=None):
    """Contract every edge that lies in no k-cut."""
    if min_cut_value(G) < k:
        raise DesignError(NOT_K_CONNECTED, f"graph is not {k}-edge-connected")
    if r is None:
        r = min(G.vertices, key=id_key)
    masks = k_cut_masks(G, k, r)
    loose = [e for e, (bu, bv) in _edge_masks(G).items() if not any(_crosses(m, bu, bv) for m in masks)]
    return contract_edges(G, loose)


def _cap_from_joint(inst, H, cmap):
    link_ids = set(inst.link_ids)
    base_edges = {e: uv for e, uv in H.edges.items() if e not in link_ids}
    links = [(l, *H.edges[l]) for l in inst.link_ids if l in H.edges]
    rotation = None
    if H.rotation is not None:
        base_rot = {v: [e for e in H.rotation[v] if e not in link_ids] for v in H.vertices}
        base = PlanarMultigraph(H.vertices, base_edges, base_rot)
        rotation = H.rotation
    else:
        base = PlanarMultigraph(H.vertices, base_edges)
    root = cmap.vertex_map[inst.root]
    costs = {e: inst.costs[e] for e in list(base_edges) + [l[0] for l in links] if e in inst.costs}
    return CapInstance(base, links, costs, inst.k, root, rotation, dict(inst.meta))


def minimalize_cap(inst):
    """Minimalize the base graph of a CAP instance, carrying links along."""
    G = inst.base
    k = inst.k
    if min_cut_value(G) < k:
        raise DesignError(NOT_K_CONNECTED, f"base graph is not {k}-edge-connected")
    masks = k_cut_masks(G, k, inst.root)
    loose = [e for e, (bu, bv) in _edge_masks(G).items() if not any(_crosses(m, bu, bv) for m in masks)]
    H, cmap = contract_edges(inst.joint_graph(), loose)
    return _cap_from_joint(inst, H, cmap), cmap


def contract_snug_paths(inst, structure, Q=None):
    """Contract the snug paths in Q (default: all) to single vertices; links
    that become loops are dropped."""
    paths = structure.paths if Q is None else Q
    G = inst.base
    chosen = []
    for p in paths:
        for a, b in zip(p.vertices, p.vertices[1:]):
            e = next((e for e in G.incident(a) if G.other(e, a) == b), None)
            if e is None:
                raise AssertionError(f"chain arc ({a!r}, {b!r}) is not an edge")
            chosen.append(e)
    H, cmap = contract_edges(inst.joint_graph(), chosen)
    return _cap_from_joint(inst, H, cmap), cmap


# link reductions ----------------------------------------------------------------


def cost_classes(costs, lam):
    """Class index of every cost: class i holds [c_min (1+lam)^i, c_min (1+lam)^(i+1))."""
    lam = Fraction(str(lam)) if isinstance(lam, float) else Fraction(lam)
    values = list(costs.values())
    cmin = min(values)
    cmax = max(values)
    bounds = [cmin]
    while bounds[-1] * (1 + lam) <= cmax:
        bounds.append(bounds[-1] * (1 + lam))
    out = {}
    for l, c in costs.items():
        i = 0
        while i + 1 < len(bounds) and bounds[i + 1] <= c:
            i += 1
        out[l] = i
    return out, len(bounds)


def _vertex_side(structure, path, v):
    """'in' when v lies in S_0, 'out' when v lies outside S_{t+1}, else the
    position of v on the path."""
    bit = 1 << structure.graph.index[v]
    if path.masks[0] & bit:
        return "in"
    if not path.masks[-1] & bit:
        return "out"
    return path.vertices.index(v)


def thin_links(inst, structure, lam):
    """Reduced link set keeping all snug-snug links, one cheapest link per
    non-snug pair and, per cost class, the deepest-reaching link from each
    non-snug vertex into each snug path."""
    links = [l for l in inst.links if l[1] != l[2]]
    if not links:
        return []
    costs = {l[0]: inst.costs[l[0]] for l in links}
    cls, _ = cost_classes(costs, lam)
    snug = structure.snug
    keep = set()
    best_pair = {}
    best_reach = {}
    for lid, u, v in links:
        c = costs[lid]
        if u in snug and v in snug:
            keep.add(lid)
            continue
        if u not in snug and v not in snug:
            key = (u, v) if id_key(u) <= id_key(v) else (v, u)
            cand = (c, id_key(lid), lid)
            if key not in best_pair or cand < best_pair[key]:
                best_pair[key] = cand
            continue
        s, x = (u, v) if u in snug else (v, u)
        pi = structure.path_of[s]
        path = structure.paths[pi]
        side = _vertex_side(structure, path, x)
        i = path.vertices.index(s)
        if side == "in":
            depth = -i
        elif side == "out":
            depth = i
        else:
            raise AssertionError(f"non-snug vertex {x!r} lies between shores of a snug path")
        key = (x, pi, cls[lid])
        cand = (depth, c, id_key(lid), lid)
        if key not in best_reach or cand < best_reach[key]:
            best_reach[key] = cand
    keep |= {t[-1] for t in best_pair.values()}
    keep |= {t[-1] for t in best_reach.values()}
    out = [l for l in links if l[0] in keep]
    if not _feasible(inst.base, out, inst.k):
        raise DesignError(INFEASIBLE, "thinned link set is not feasible")
    return out


def _feasible(G, links, k):
    net = FlowNetwork.from_graph(G, [(u, v) for _, u, v in links])
    for j in range(1, G.n):
        value, _ = net.max_flow(1, 1 << j, limit=k + 1)
        if value < k + 1:
            return False
    return True


def interval_cover(lo, hi, intervals):
    """Cheapest set of intervals (id, start, end, cost) covering lo..hi; ties by
    lexicographically smallest id tuple. Returns None if impossible."""
    if lo > hi:
        return []
    best = {hi + 1: (Fraction(0), ())}
    for p in range(hi, lo - 1, -1):
        cand = None
        for lid, s, e, c in intervals:
            if s <= p <= e:
                tail = best.get(min(e, hi) + 1)
                if tail is None:
                    continue
                ids = tuple(sorted((lid,) + tail[1], key=id_key))
                option = (c + tail[0], tuple(id_key(x) for x in ids), ids)
                if cand is None or option[:2] < cand[:2]:
                    cand = option
        if cand is not None:
            best[p] = (cand[0], cand[2])
    res = best.get(lo)
    return None if res is None else list(res[1])


def cover_path_links(structure, path, links, costs):
    """L_P: the link reaching furthest out of S_0, the link reaching deepest in
    from outside S_{t+1}, and a cheapest cover of the remaining shores by links
    with both ends on P."""
    t = len(path.vertices) - 1
    idx = structure.graph.index
    pos = {v: i for i, v in enumerate(path.vertices)}

    def reach(v):
        """Smallest shore index j with v in S_j, or t+2 if v lies outside S_{t+1}."""
        bit = 1 << idx[v]
        for j, m in enumerate(path.masks):
            if m & bit:
                return j
        return t + 2

    a_best = b_best = None
    internal = []
    for lid, u, v in links:
        if u == v:
            continue
        ru, rv = reach(u), reach(v)
        c = costs[lid]
        for x, y, rx, ry in ((u, v, ru, rv), (v, u, rv, ru)):
            if rx == 0 and ry >= 1:
                a = ry - 1  # largest i with y outside S_i
                cand = (-a, c, id_key(lid), lid, a)
                if a_best is None or cand < a_best:
                    a_best = cand
            if rx == t + 2 and ry <= t + 1:
                b = ry  # smallest i with y inside S_i
                cand = (b, c, id_key(lid), lid, b)
                if b_best is None or cand < b_best:
                    b_best = cand
        if u in pos and v in pos:
            i, j = sorted((pos[u], pos[v]))
            if i < j:
                internal.append((lid, i + 1, j, c))
    if a_best is None or b_best is None:
        raise DesignError(INFEASIBLE, f"an outer shore of the snug path at {path.vertices[0]!r} is uncoverable")
    a, b = a_best[-1], b_best[-1]
    chosen = {a_best[3], b_best[3]}
    middle = interval_cover(a + 1, b - 1, internal)
    if middle is None:
        raise DesignError(INFEASIBLE, f"shores of the snug path at {path.vertices[0]!r} are uncoverable")
    chosen |= set(middle)
    return sorted(chosen, key=id_key)


def select_circ_snug(structure, links, costs):
    """One cheapest link per unordered pair of distinct snug paths."""
    best = {}
    for lid, u, v in links:
        if u in structure.snug and v in structure.snug:
            p, q = structure.path_of[u], structure.path_of[v]
            if p == q:
                continue
            key = (min(p, q), max(p, q))
            cand = (costs[lid], id_key(lid), lid)
            if key not in best or cand < best[key]:
                best[key] = cand
    return sorted((t[-1] for t in best.values()), key=id_key)


def snug_links(structure, links):
    return [l for l in links if l[1] in structure.snug and l[2] in structure.snug]


def covers_path(structure, path, link_ends, chosen):
    """True if every shore of ``path`` is crossed by a chosen link."""
    idx = structure.graph.index
    for m in path.masks:
        if not any(bool(m >> idx[link_ends[l][0]] & 1) != bool(m >> idx[link_ends[l][1]] & 1) for l in chosen):
            return False
    return True
