"""Embedded planar multigraphs: rotation systems, faces, the vertex-face graph
and rotation-preserving contraction."""

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .errors import DesignError, DISCONNECTED, EULER_VIOLATION, MALFORMED_ROTATION

DELETED_AS_LOOP = "DELETED-AS-LOOP"


def id_key(x):
    """Total order on mixed vertex/edge ids: ints first, then everything else by text."""
    if isinstance(x, bool):
        return (1, str(x))
    if isinstance(x, int):
        return (0, x)
    return (1, str(x))


class PlanarMultigraph:
    """Multigraph with stable edge ids and an optional rotation system.

    ``edges`` maps edge id to its endpoint pair. ``rotation`` maps each vertex
    to the cyclic order of its incident edge ids, or is None for graphs that
    carry no embedding (vertex-safe clique contractions, for instance).
    """

    def __init__(self, vertices, edges, rotation=None, validate=True):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise DesignError(MALFORMED_ROTATION, "duplicate vertex ids")
        self.edges = {}
        incident = {v: [] for v in self.vertices}
        for eid, (u, v) in (edges.items() if isinstance(edges, dict) else ((e[0], (e[1], e[2])) for e in edges)):
            if eid in self.edges:
                raise DesignError(MALFORMED_ROTATION, f"duplicate edge id {eid!r}")
            if u not in self.index or v not in self.index:
                raise DesignError(MALFORMED_ROTATION, f"edge {eid!r} has an unknown endpoint")
            if u == v:
                raise DesignError(MALFORMED_ROTATION, f"edge {eid!r} is a loop")
            self.edges[eid] = (u, v)
            incident[u].append(eid)
            incident[v].append(eid)
        self.rotation = None
        self._faces = None
        if rotation is not None:
            self.rotation = {}
            for v in self.vertices:
                order = tuple(rotation.get(v, ()))
                if validate:
                    if len(order) != len(incident[v]) or set(order) != set(incident[v]):
                        raise DesignError(MALFORMED_ROTATION,
                                          f"rotation at {v!r} does not list its incident edges exactly once")
                self.rotation[v] = order
            if validate:
                extra = set(rotation) - set(self.index)
                if extra:
                    raise DesignError(MALFORMED_ROTATION, f"rotation names unknown vertices {sorted(map(str, extra))}")
            self._incident = self.rotation
            if validate:
                self._check_euler()
        else:
            self._incident = {v: tuple(es) for v, es in incident.items()}

    # basic queries

    @property
    def n(self):
        return len(self.vertices)

    @property
    def m(self):
        return len(self.edges)

    @property
    def is_embedded(self):
        return self.rotation is not None

    def incident(self, v):
        return self._incident[v]

    def degree(self, v):
        return len(self._incident[v])

    def other(self, eid, v):
        a, b = self.edges[eid]
        return b if a == v else a

    def neighbors(self, v):
        return {self.other(e, v) for e in self._incident[v]}

    def edge_list(self):
        return [(e, u, v) for e, (u, v) in self.edges.items()]

    def components(self):
        seen = set()
        comps = []
        for s in self.vertices:
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for e in self._incident[x]:
                    y = self.other(e, x)
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        queue.append(y)
            comps.append(comp)
        return comps

    def is_connected(self):
        return self.n <= 1 or len(self.components()) == 1

    def restrict(self, edge_ids):
        """Spanning subgraph on the given edge ids; the embedding is inherited."""
        keep = set(edge_ids)
        edges = {e: uv for e, uv in self.edges.items() if e in keep}
        rotation = None
        if self.rotation is not None:
            rotation = {v: [e for e in self.rotation[v] if e in keep] for v in self.vertices}
        return PlanarMultigraph(self.vertices, edges, rotation, validate=False)

    def induced(self, vertex_set):
        vs = [v for v in self.vertices if v in vertex_set]
        edges = {e: (u, v) for e, (u, v) in self.edges.items() if u in vertex_set and v in vertex_set}
        rotation = None
        if self.rotation is not None:
            rotation = {v: [e for e in self.rotation[v] if e in edges] for v in vs}
        return PlanarMultigraph(vs, edges, rotation, validate=False)

    def cut_edges(self, side):
        """Edge ids with exactly one endpoint in ``side``."""
        return [e for e, (u, v) in self.edges.items() if (u in side) != (v in side)]

    def cut_value(self, side):
        return sum(1 for _, (u, v) in self.edges.items() if (u in side) != (v in side))

    def to_weighted_graph(self):
        """Simple networkx graph with parallel edges aggregated into a weight."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for u, v in self.edges.values():
            if g.has_edge(u, v):
                g[u][v]["weight"] += 1
            else:
                g.add_edge(u, v, weight=1)
        return g

    # faces

    @property
    def faces(self):
        if self.rotation is None:
            raise DesignError(MALFORMED_ROTATION, "graph carries no embedding")
        if self._faces is None:
            self._faces = self._walk_faces()
        return self._faces

    def _walk_faces(self):
        position = {}
        for v, order in self.rotation.items():
            for i, e in enumerate(order):
                position[(v, e)] = i
        faces = []
        seen = set()
        for e, (u, v) in self.edges.items():
            for tail in (u, v):
                if (e, tail) in seen:
                    continue
                walk = []
                dart = (e, tail)
                while dart not in seen:
                    seen.add(dart)
                    walk.append(dart)
                    eid, t = dart
                    head = self.other(eid, t)
                    order = self.rotation[head]
                    nxt = order[(position[(head, eid)] + 1) % len(order)]
                    dart = (nxt, head)
                faces.append(tuple(walk))
        return faces

    def face_vertices(self, face):
        return {tail for _, tail in face}

    def _check_euler(self):
        faces = self.faces
        comp_of = {}
        comps = self.components()
        for i, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = i
        n_edges = [0] * len(comps)
        n_faces = [0] * len(comps)
        for u, _ in self.edges.values():
            n_edges[comp_of[u]] += 1
        for face in faces:
            n_faces[comp_of[face[0][1]]] += 1
        for i, comp in enumerate(comps):
            f = max(n_faces[i], 1)
            if len(comp) - n_edges[i] + f != 2:
                raise DesignError(EULER_VIOLATION,
                                  f"component of {comp[0]!r}: v - e + f = {len(comp) - n_edges[i] + f}")

    def __repr__(self):
        return f"PlanarMultigraph(n={self.n}, m={self.m}, embedded={self.is_embedded})"


def build_embedded_graph(edge_list, rotation_system, vertices=None):
    """Build and validate an embedded multigraph from (id, u, v) triples and a
    rotation system mapping vertex -> cyclic list of incident edge ids."""
    if vertices is None:
        seen = {}
        for v in rotation_system:
            seen.setdefault(v, None)
        for _, u, v in edge_list:
            seen.setdefault(u, None)
            seen.setdefault(v, None)
        vertices = list(seen)
    if rotation_system is None:
        raise DesignError(MALFORMED_ROTATION, "missing rotation system")
    return PlanarMultigraph(vertices, [(e, u, v) for e, u, v in edge_list], rotation_system)


def planar_rotation(vertices, edge_list):
    """Compute some planar rotation system for an abstract multigraph.

    Used by generators whose drawings are described combinatorially. Every
    edge is subdivided so networkx can embed the simple graph; returns None if
    the multigraph is not planar.
    """
    g = nx.Graph()
    g.add_nodes_from(("v", v) for v in vertices)
    for e, u, v in edge_list:
        mid = ("e", e)
        g.add_edge(("v", u), mid)
        g.add_edge(mid, ("v", v))
    ok, emb = nx.check_planarity(g)
    if not ok:
        return None
    rotation = {}
    for v in vertices:
        node = ("v", v)
        rotation[v] = [nbr[1] for nbr in emb.neighbors_cw_order(node)] if g.degree(node) else []
    return rotation


@dataclass
class VertexFaceGraph:
    root: object
    vertex_dist: dict
    face_dist: list
    face_vertices: list = field(repr=False)

    def adjacency(self):
        adj = {("v", v): set() for v in self.vertex_dist}
        for i, vs in enumerate(self.face_vertices):
            adj[("f", i)] = {("v", v) for v in vs}
            for v in vs:
                adj[("v", v)].add(("f", i))
        return adj


def vertex_face_graph(G, r):
    """Bipartite vertex-face incidence graph with BFS distances from ``r``."""
    if not G.is_connected():
        raise DesignError(DISCONNECTED, "vertex-face graph needs a connected graph")
    faces = G.faces
    face_vs = [sorted(G.face_vertices(f), key=id_key) for f in faces]
    faces_at = {v: [] for v in G.vertices}
    for i, vs in enumerate(face_vs):
        for v in vs:
            faces_at[v].append(i)
    vdist = {r: 0}
    fdist = [None] * len(faces)
    queue = deque([("v", r)])
    while queue:
        kind, x = queue.popleft()
        if kind == "v":
            d = vdist[x]
            for f in faces_at[x]:
                if fdist[f] is None:
                    fdist[f] = d + 1
                    queue.append(("f", f))
        else:
            d = fdist[x]
            for v in face_vs[x]:
                if v not in vdist:
                    vdist[v] = d + 1
                    queue.append(("v", v))
    return VertexFaceGraph(r, vdist, fdist, face_vs)


@dataclass
class ContractionMap:
    vertex_map: dict
    edge_map: dict

    def image(self, vertex_set):
        return {self.vertex_map[v] for v in vertex_set}

    def preimage(self, vertex_set):
        return {v for v, w in self.vertex_map.items() if w in vertex_set}


def contract_edges(G, F):
    """Contract every edge in ``F`` one at a time, merging rotations and
    deleting loops. The merged vertex keeps the smallest original id."""
    F = set(F)
    embedded = G.rotation is not None
    rot = {v: list(G.rotation[v]) for v in G.vertices} if embedded else None
    inc = {v: set(G.incident(v)) for v in G.vertices}
    ends = {e: list(uv) for e, uv in G.edges.items()}
    members = {v: [v] for v in G.vertices}
    edge_map = {e: e for e in G.edges}

    def drop(e, at):
        edge_map[e] = DELETED_AS_LOOP
        del ends[e]
        inc[at].discard(e)
        if embedded:
            rot[at] = [x for x in rot[at] if x != e]

    for e in G.edges:
        if e not in F or e not in ends:
            continue
        u, v = ends[e]
        keep, gone = (u, v) if id_key(u) <= id_key(v) else (v, u)
        if embedded:
            ru, rv = rot[keep], rot[gone]
            i, j = ru.index(e), rv.index(e)
            rot[keep] = ru[i + 1:] + ru[:i] + rv[j + 1:] + rv[:j]
            del rot[gone]
        edge_map[e] = DELETED_AS_LOOP
        del ends[e]
        inc[keep].discard(e)
        inc[gone].discard(e)
        for x in inc[gone]:
            ends[x] = [keep if y == gone else y for y in ends[x]]
        inc[keep] |= inc.pop(gone)
        members[keep].extend(members.pop(gone))
        for x in [x for x in inc[keep] if ends[x][0] == ends[x][1]]:
            drop(x, keep)

    vertices = [v for v in G.vertices if v in members]
    vertex_map = {}
    for rep, group in members.items():
        for v in group:
            vertex_map[v] = rep
    edges = {e: tuple(ends[e]) for e in G.edges if e in ends}
    H = PlanarMultigraph(vertices, edges, rot, validate=False)
    return H, ContractionMap(vertex_map, edge_map)
