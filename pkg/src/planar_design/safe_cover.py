"""Ring decompositions of the vertex-face graph and construction of k-safe covers."""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cuts import connected_cut_masks, default_root
from .errors import DesignError, INVALID_DELTA, U_NOT_PROPER
from .graph import PlanarMultigraph, contract_edges, id_key, vertex_face_graph


@dataclass
class RingDecomposition:
    root: object
    k: int
    rings: dict
    ring_of: dict

    @property
    def max_ring(self):
        return max(self.rings) if self.rings else -1


def ring_decomposition(G, r, k):
    """Group vertices by D_G distance from r into rings of width k: v lies in
    ring j iff its distance is in [2kj, 2k(j+1))."""
    dg = vertex_face_graph(G, r)
    ring_of = {v: d // (2 * k) for v, d in dg.vertex_dist.items()}
    rings = {}
    for v in G.vertices:
        rings.setdefault(ring_of[v], set()).add(v)
    return RingDecomposition(r, k, {j: frozenset(s) for j, s in sorted(rings.items())}, ring_of)


def _as_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def offset_value(G, ring_of, w, c, M, a):
    """w(W_a ∪ Γ(W_a)) + c(edges incident to W_a) for the ring class a mod M."""
    W = {v for v, j in ring_of.items() if j % M == a}
    if not W:
        return Fraction(0)
    closed = set(W)
    cost = Fraction(0)
    for e, (u, v) in G.edges.items():
        if u in W or v in W:
            cost += _as_fraction(c.get(e, 0))
            closed.add(u)
            closed.add(v)
    return cost + sum((_as_fraction(w.get(v, 0)) for v in closed), Fraction(0))


def choose_offset(G, rings, w, c, M):
    """Smallest a in 0..M-1 minimizing offset_value. Offsets beyond the last
    ring select no vertex and cost nothing, so only the first max_ring+2
    classes need evaluating."""
    best_a, best = None, None
    for a in range(min(M, rings.max_ring + 2)):
        value = offset_value(G, rings.ring_of, w, c, M, a)
        if best is None or value < best:
            best_a, best = a, value
    return best_a, best


@dataclass
class Cover:
    sets: list
    alphas: list
    betas: list
    original_indices: list
    offset: int
    M: int
    k: int
    V_U: frozenset
    E_U: frozenset
    ring_width: int = 0
    stats: dict = field(default_factory=dict)

    def multiplicity(self, v):
        return sum(1 for s in self.sets if v in s)

    def to_json(self):
        return {
            "offset": self.offset,
            "M": self.M,
            "pieces": [
                {"i": idx, "alpha": a, "beta": b, "vertices": sorted(s, key=id_key)}
                for idx, a, b, s in zip(self.original_indices, self.alphas, self.betas, self.sets)
            ],
        }


@dataclass
class PieceGraph:
    index: int
    graph: PlanarMultigraph
    cmap: object
    zero_edges: frozenset
    vertex_set: frozenset

    def costs(self, c):
        return {e: (Fraction(0) if e in self.zero_edges else _as_fraction(c[e])) for e in self.graph.edges}


def derive_overlap(G, sets):
    count = {}
    for s in sets:
        for v in s:
            count[v] = count.get(v, 0) + 1
    V_U = frozenset(v for v, t in count.items() if t >= 2)
    E_U = frozenset(e for e, (u, v) in G.edges.items() if u in V_U or v in V_U)
    return V_U, E_U


def make_cover(G, sets, k, offset=0, M=1, alphas=None, betas=None, original_indices=None):
    """Wrap an arbitrary vertex-set family as a Cover (used for hand-built covers)."""
    sets = [frozenset(s) for s in sets]
    V_U, E_U = derive_overlap(G, sets)
    n = len(sets)
    return Cover(sets, alphas or [0] * n, betas or [0] * n, original_indices or list(range(n)),
                 offset, M, k, V_U, E_U, ring_width=k)


def block_length(delta):
    delta = _as_fraction(delta)
    if not (0 < delta < 1):
        raise DesignError(INVALID_DELTA, f"delta must lie in (0, 1), got {delta}")
    return math.ceil(Fraction(3) / delta)


def build_safe_cover(G, c, w, delta, k, root=None, build_pieces=True):
    """k-vertex-safe cover of G with cost bound delta*(w(V)+c(E)) and the piece
    graphs G/E[V∖U_i]."""
    M = block_length(delta)
    if root is None:
        root = default_root(G)
    rings = ring_decomposition(G, root, k)
    a_star, value = choose_offset(G, rings, w, c, M)
    last = rings.max_ring
    raw = [(0, list(range(0, a_star + 1)), 0, k * (a_star + 1))]
    i = 1
    while a_star + (i - 1) * M <= last:
        lo, hi = a_star + (i - 1) * M, a_star + i * M
        raw.append((i, list(range(lo, hi + 1)), k * lo, k * (hi + 1)))
        i += 1
    sets, alphas, betas, indices = [], [], [], []
    for idx, ring_ids, alpha, beta in raw:
        s = frozenset(v for j in ring_ids for v in rings.rings.get(j, ()))
        if s:
            sets.append(s)
            alphas.append(alpha)
            betas.append(beta)
            indices.append(idx)
    V_U, E_U = derive_overlap(G, sets)
    cover = Cover(sets, alphas, betas, indices, a_star, M, k, V_U, E_U, ring_width=k)
    cover.stats = {"offset_value": value, "rings": last + 1, "pieces": len(sets)}
    pieces = [piece_graph(G, cover, i) for i in range(len(sets))] if build_pieces else []
    return cover, pieces


def piece_graph(G, cover, i):
    U = cover.sets[i]
    outside = [e for e, (u, v) in G.edges.items() if u not in U and v not in U]
    H, cmap = contract_edges(G, outside)
    zero = frozenset(e for e in H.edges if e in cover.E_U or not (G.edges[e][0] in U and G.edges[e][1] in U))
    return PieceGraph(i, H, cmap, zero, U)


def cover_cost(G, cover, c, w):
    gamma = set()
    for u, v in G.edges.values():
        if u in cover.V_U and v not in cover.V_U:
            gamma.add(v)
        if v in cover.V_U and u not in cover.V_U:
            gamma.add(u)
    closed = set(cover.V_U) | gamma
    return (sum((_as_fraction(c.get(e, 0)) for e in cover.E_U), Fraction(0))
            + sum((_as_fraction(w.get(v, 0)) for v in closed), Fraction(0)))


def is_well_separated(G, cover, extra_edges=()):
    sets = cover.sets
    pairs = list(G.edges.values()) + list(extra_edges)
    for i in range(len(sets)):
        for j in range(len(sets)):
            if i == j:
                continue
            only_i = sets[i] - sets[j]
            only_j = sets[j] - sets[i]
            for u, v in pairs:
                if (u in only_i and v in only_j) or (v in only_i and u in only_j):
                    return False
    return True


def piece_width_bound(cover, i):
    return 3 * (cover.betas[i] - cover.alphas[i]) + 5


def _cut_crossing_matrix(G, masks):
    iu = np.array([G.index[u] for u, _ in G.edges.values()], dtype=np.uint64)
    iv = np.array([G.index[v] for _, v in G.edges.values()], dtype=np.uint64)
    one = np.uint64(1)
    a = (masks[:, None] >> iu[None, :]) & one
    b = (masks[:, None] >> iv[None, :]) & one
    return a != b


def _inside_masks(G, cover):
    eids = list(G.edges)
    inside = np.zeros((len(cover.sets), len(eids)), dtype=bool)
    for i, s in enumerate(cover.sets):
        for j, e in enumerate(eids):
            u, v = G.edges[e]
            inside[i, j] = u in s and v in s
    return inside


def _some_piece_contains(crossing, inside):
    ok = np.zeros(crossing.shape[0], dtype=bool)
    for row in inside:
        ok |= ~(crossing & ~row[None, :]).any(axis=1)
    return ok


def verify_edge_safe(cover, G, k, limit=20, witness=False):
    masks = connected_cut_masks(G, limit=limit)
    if len(masks) == 0:
        return (True, None) if witness else True
    crossing = _cut_crossing_matrix(G, masks)
    in_eu = np.array([e in cover.E_U for e in G.edges], dtype=bool)
    heavy = (crossing & in_eu[None, :]).sum(axis=1) >= k
    ok = heavy | _some_piece_contains(crossing, _inside_masks(G, cover))
    return _result(ok, masks, G, witness)


def verify_vertex_safe(cover, G, k, limit=20, witness=False):
    masks = connected_cut_masks(G, limit=limit)
    if len(masks) == 0:
        return (True, None) if witness else True
    n = G.n
    eu_nbrs = np.zeros(n, dtype=np.uint64)
    for e in cover.E_U:
        u, v = G.edges[e]
        i, j = G.index[u], G.index[v]
        eu_nbrs[i] |= np.uint64(1 << j)
        eu_nbrs[j] |= np.uint64(1 << i)
    gamma = np.zeros(len(masks), dtype=np.int64)
    one = np.uint64(1)
    for x in range(n):
        outside = ((masks >> np.uint64(x)) & one) == 0
        touches = (masks & eu_nbrs[x]) != 0
        gamma += (outside & touches)
    crossing = _cut_crossing_matrix(G, masks)
    ok = (gamma >= k) | _some_piece_contains(crossing, _inside_masks(G, cover))
    return _result(ok, masks, G, witness)


def _result(ok, masks, G, witness):
    good = bool(ok.all())
    if not witness:
        return good
    if good:
        return True, None
    bad = int(masks[np.flatnonzero(~ok)[0]])
    return False, frozenset(v for i, v in enumerate(G.vertices) if bad >> i & 1)


@dataclass
class VertexSafePiece:
    graph: PlanarMultigraph
    clique_vertices: frozenset
    kept_edges: frozenset


def vertex_safe_contract(G, F, U, k):
    """Contract each component of G[U] in (V, F) and replace the contracted
    vertex by a k-clique joined to all of its neighbours."""
    U = set(U)
    if not U or len(U) >= G.n or not U <= set(G.vertices):
        raise DesignError(U_NOT_PROPER, "U must be a nonempty proper vertex subset")
    F = set(F)
    comp_of = {}
    for comp in G.induced(U).components():
        rep = min(comp, key=id_key)
        for v in comp:
            comp_of[v] = rep
    reps = sorted(set(comp_of.values()), key=id_key)
    vertices = [v for v in G.vertices if v not in U]
    clique = {rep: [("clique", rep, j) for j in range(k)] for rep in reps}
    for rep in reps:
        vertices.extend(clique[rep])
    edges = {}
    kept = set()
    attach = {rep: set() for rep in reps}
    for e in G.edges:
        if e not in F:
            continue
        u, v = G.edges[e]
        if u in U and v in U:
            continue
        if u not in U and v not in U:
            edges[e] = (u, v)
            kept.add(e)
        else:
            inside, outside = (u, v) if u in U else (v, u)
            attach[comp_of[inside]].add(outside)
    for rep in reps:
        qs = clique[rep]
        for a in range(k):
            for b in range(a + 1, k):
                edges[("clique-edge", rep, a, b)] = (qs[a], qs[b])
        for x in sorted(attach[rep], key=id_key):
            for a in range(k):
                edges[("clique-join", rep, a, x)] = (qs[a], x)
    graph = PlanarMultigraph(vertices, edges, None)
    return VertexSafePiece(graph, frozenset(q for qs in clique.values() for q in qs), frozenset(kept))
