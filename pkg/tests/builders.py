"""Small hand-built graphs shared by the tests."""

import itertools
import math

import networkx as nx

from planar_design.graph import PlanarMultigraph, planar_rotation


def embedded(vertices, pairs):
    """Embedded multigraph with edge ids 0.. in the order of ``pairs``."""
    edges = [(i, u, v) for i, (u, v) in enumerate(pairs)]
    rotation = planar_rotation(vertices, edges)
    assert rotation is not None, "test graph is not planar"
    return PlanarMultigraph(vertices, edges, rotation)


def cycle(n, copies=1):
    pairs = [(i, (i + 1) % n) for i in range(n) for _ in range(copies)]
    return embedded(list(range(n)), pairs)


def triangle():
    # natural rotation written out by hand
    edges = [(0, 0, 1), (1, 1, 2), (2, 2, 0)]
    rotation = {0: [0, 2], 1: [1, 0], 2: [2, 1]}
    return PlanarMultigraph([0, 1, 2], edges, rotation)


def parallel(copies):
    return embedded([0, 1], [(0, 1)] * copies)


def straight_line(points, pairs):
    """Embedded multigraph whose rotation follows the given coordinates
    (no parallel edges)."""
    edges = [(i, u, v) for i, (u, v) in enumerate(pairs)]
    darts = {v: [] for v in points}
    for e, u, v in edges:
        for a, b in ((u, v), (v, u)):
            (ax, ay), (bx, by) = points[a], points[b]
            darts[a].append((math.atan2(by - ay, bx - ax), e))
    rotation = {v: [e for _, e in sorted(ds)] for v, ds in darts.items()}
    return PlanarMultigraph(list(points), edges, rotation)


def grid(rows, cols):
    """rows x cols grid drawn in the plane; vertex r*cols+c sits at (c, r)."""
    vid = lambda r, c: r * cols + c
    points = {vid(r, c): (c, r) for r in range(rows) for c in range(cols)}
    pairs = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                pairs.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                pairs.append((vid(r, c), vid(r + 1, c)))
    return straight_line(points, pairs)


def k4():
    return embedded(list(range(4)), list(itertools.combinations(range(4), 2)))


def icosahedron():
    g = nx.icosahedral_graph()
    return embedded(sorted(g.nodes), sorted(tuple(sorted(e)) for e in g.edges))


def subset_cuts(G, root=None):
    """Every nonempty root-avoiding proper vertex set with its crossing count,
    by plain subset enumeration."""
    if root is None:
        root = G.vertices[0]
    others = [v for v in G.vertices if v != root]
    out = []
    for r in range(1, len(others) + 1):
        for S in itertools.combinations(others, r):
            S = frozenset(S)
            out.append((S, G.cut_value(S)))
    return out


def nx_multigraph(G, extra=()):
    g = nx.MultiGraph()
    g.add_nodes_from(G.vertices)
    g.add_edges_from(G.edges.values())
    g.add_edges_from(extra)
    return g


def nx_edge_connectivity(G, extra=()):
    """Global edge connectivity of a multigraph via networkx max-flow on
    aggregated capacities."""
    g = nx.Graph()
    g.add_nodes_from(G.vertices)
    for u, v in list(G.edges.values()) + list(extra):
        if g.has_edge(u, v):
            g[u][v]["capacity"] += 1
        else:
            g.add_edge(u, v, capacity=1)
    if g.number_of_nodes() < 2:
        return 0
    if not nx.is_connected(g):
        return 0
    nodes = list(g.nodes)
    d = g.to_directed()
    return min(nx.maximum_flow_value(d, nodes[0], t) for t in nodes[1:])
