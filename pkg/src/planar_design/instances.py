"""Instance generators and the JSON instance format."""

import json
import math
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from .cuts import FlowNetwork, is_k_edge_connected, min_cut_value
from .errors import DesignError, PARSE_ERROR
from .graph import PlanarMultigraph, id_key, planar_rotation
from .model import CapInstance, WecssInstance, to_fraction


# geometry helpers --------------------------------------------------------------


def _angle_rotation(points, vertices, edge_list):
    """Rotation system from straight-line positions; parallel copies
    (ids listed in ``edge_list`` after their twin) are placed next to it."""
    darts = {v: [] for v in vertices}
    first = {}
    for rank, (e, u, v) in enumerate(edge_list):
        key = (u, v) if id_key(u) <= id_key(v) else (v, u)
        if key not in first:
            first[key] = rank
        base = first[key]
        copy = rank - base
        for a, b in ((u, v), (v, u)):
            ax, ay = points[a]
            bx, by = points[b]
            ang = math.atan2(by - ay, bx - ax)
            # copies fan out clockwise at the lower-id end and counter-clockwise at the other
            sign = 1 if id_key(a) <= id_key(b) else -1
            darts[a].append((ang, sign * copy, e))
    return {v: [e for _, _, e in sorted(ds)] for v, ds in darts.items()}


def _triangulation(n, rng):
    pts = np.array([[rng.random(), rng.random()] for _ in range(n)])
    tri = Delaunay(pts)
    edges = set()
    for simplex in tri.simplices:
        for a in range(3):
            for b in range(a + 1, 3):
                i, j = int(simplex[a]), int(simplex[b])
                edges.add((min(i, j), max(i, j)))
    return {i: (float(pts[i][0]), float(pts[i][1])) for i in range(n)}, sorted(edges)


def _boost(vertices, pairs, k, rng):
    """Add parallel copies across small cuts until the minimum cut reaches k."""
    pairs = list(pairs)
    while True:
        g = PlanarMultigraph(vertices, [(i, u, v) for i, (u, v) in enumerate(pairs)])
        net = FlowNetwork.from_graph(g)
        low = None
        for j in range(1, g.n):
            value, res = net.max_flow(1, 1 << j, limit=k)
            if value < k:
                low = net.reachable_from(res, 1)
                break
        if low is None:
            return pairs
        crossing = [p for p in pairs if (low >> g.index[p[0]] & 1) != (low >> g.index[p[1]] & 1)]
        if not crossing:
            raise DesignError(PARSE_ERROR, "disconnected backbone")
        pairs.append(rng.choice(sorted(set(crossing))))


def _survives_removal(vertices, pairs, u, v, k):
    """Whether a k-edge-connected graph minus one {u, v} edge (``pairs`` no
    longer lists it) stays k-edge-connected: only cuts separating u from v
    lose an edge, so one capped u-v flow decides it."""
    idx = {x: i for i, x in enumerate(vertices)}
    net = FlowNetwork(len(vertices), [(idx[a], idx[b], 1) for a, b in pairs])
    value, _ = net.max_flow(1 << idx[u], 1 << idx[v], limit=k)
    return value >= k


def _thin_edges(vertices, pairs, k, rng, keep_prob):
    """Randomly delete edges while the graph stays k-edge-connected."""
    pairs = list(pairs)
    order = list(range(len(pairs)))
    rng.shuffle(order)
    alive = set(range(len(pairs)))
    removed = []
    for j in order:
        if rng.random() < keep_prob:
            continue
        trial = alive - {j}
        if _survives_removal(vertices, [pairs[i] for i in sorted(trial)], *pairs[j], k):
            alive = trial
            removed.append(pairs[j])
    return [pairs[i] for i in sorted(alive)], removed


def gen_planar_kec(n, k, seed, cost_max=3, keep_prob=0.3, parallel_prob=0.0):
    """Random planar k-edge-connected multigraph with a straight-line embedding."""
    rng = random.Random(seed)
    points, tri = _triangulation(n, rng)
    vertices = list(range(n))
    pairs = _boost(vertices, tri, k, rng)
    pairs, _ = _thin_edges(vertices, pairs, k, rng, keep_prob)
    extra = [p for p in pairs if rng.random() < parallel_prob]
    pairs = sorted(pairs + extra)
    edge_list = [(i, u, v) for i, (u, v) in enumerate(pairs)]
    rotation = _angle_rotation(points, vertices, edge_list)
    graph = PlanarMultigraph(vertices, edge_list, rotation)
    costs = {e: rng.randint(1, cost_max) for e, _, _ in edge_list}
    return WecssInstance(graph, costs, k, meta={"generator": "random-kec", "n": n, "seed": seed})


def gen_planar_kvc(n, k, seed, cost_max=3, keep_prob=0.3):
    """Random simple planar k-vertex-connected graph (k <= 3)."""
    import networkx as nx

    rng = random.Random(seed)
    for attempt in range(50):
        points, tri = _triangulation(n, rng)
        g = nx.Graph(tri)
        if nx.node_connectivity(g) >= k:
            break
    else:
        raise DesignError(PARSE_ERROR, "could not draw a sufficiently connected triangulation")
    order = list(tri)
    rng.shuffle(order)
    for e in order:
        if rng.random() < keep_prob:
            continue
        g.remove_edge(*e)
        if nx.node_connectivity(g) < k:
            g.add_edge(*e)
    pairs = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    edge_list = [(i, u, v) for i, (u, v) in enumerate(pairs)]
    vertices = list(range(n))
    rotation = _angle_rotation(points, vertices, edge_list)
    graph = PlanarMultigraph(vertices, edge_list, rotation)
    costs = {e: rng.randint(1, cost_max) for e, _, _ in edge_list}
    return WecssInstance(graph, costs, k, meta={"generator": "random-kvc", "n": n, "seed": seed})


def _joint_feasible(vertices, pairs, k):
    g = PlanarMultigraph(vertices, [(i, u, v) for i, (u, v) in enumerate(pairs)])
    return is_k_edge_connected(g, k + 1)


def gen_cap_instance(n, k, seed, max_links=18, cost_max=3, keep_prob=0.3):
    """Random planar k-WCAP instance: G is a thinned triangulation, links are
    deleted triangulation edges and parallel copies of base edges."""
    rng = random.Random(seed)
    points, tri = _triangulation(n, rng)
    vertices = list(range(n))
    pairs = _boost(vertices, tri, k, rng)
    base, removed = _thin_edges(vertices, pairs, k, rng, keep_prob)
    base = sorted(base)
    pool = [("geo", p) for p in sorted(set(removed))] + [("par", p) for p in base]
    rng.shuffle(pool)
    kept = list(pool)
    for item in list(pool):
        if len(kept) <= max_links:
            break
        trial = [x for x in kept if x is not item]
        if _survives_removal(vertices, base + [p for _, p in trial], *item[1], k + 1):
            kept = trial
    kept.sort(key=lambda x: (x[1], x[0]))
    edge_list = [(i, u, v) for i, (u, v) in enumerate(base)]
    link_list = [(len(base) + j, u, v) for j, (_, (u, v)) in enumerate(kept)]
    joint = sorted(edge_list + link_list, key=lambda t: (min(t[1], t[2]), max(t[1], t[2]), t[0]))
    rotation = _angle_rotation(points, vertices, joint)
    link_ids = {l[0] for l in link_list}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in vertices}
    G = PlanarMultigraph(vertices, edge_list, base_rot)
    costs = {l[0]: rng.randint(1, cost_max) for l in link_list}
    for e, _, _ in edge_list:
        costs[e] = 1
    inst = CapInstance(G, link_list, costs, k, joint_rotation=rotation,
                       meta={"generator": "random-cap", "n": n, "seed": seed})
    inst.joint_graph()  # validates the joint embedding
    return inst


def _web_layout(rings, spokes):
    points, pairs = {}, []
    vid = lambda j, i: j * spokes + i % spokes
    for j in range(rings):
        for i in range(spokes):
            ang = 2 * math.pi * i / spokes
            points[vid(j, i)] = ((j + 1) * math.cos(ang), (j + 1) * math.sin(ang))
            pairs.append((vid(j, i), vid(j, i + 1)))
            if j + 1 < rings:
                pairs.append((vid(j, i), vid(j + 1, i)))
    return points, [(min(u, v), max(u, v)) for u, v in pairs], vid


def gen_web_kec(rings, spokes, k, seed, cost_max=3):
    """Concentric cycles joined by spokes (min cut 3). Deep in the
    vertex-face graph, so safe covers split it into several pieces."""
    rng = random.Random(seed)
    points, pairs, _ = _web_layout(rings, spokes)
    if k > 3:
        raise DesignError(PARSE_ERROR, "web graphs are only 3-edge-connected")
    vertices = sorted(points)
    edge_list = [(i, u, v) for i, (u, v) in enumerate(sorted(pairs))]
    rotation = _angle_rotation(points, vertices, edge_list)
    graph = PlanarMultigraph(vertices, edge_list, rotation)
    costs = {e: rng.randint(1, cost_max) for e, _, _ in edge_list}
    return WecssInstance(graph, costs, k, meta={"generator": "web", "rings": rings, "spokes": spokes, "seed": seed})


def gen_web_cap(rings, spokes, seed, cost_max=3, keep_prob=0.5):
    """3-WCAP on a web graph; links are face diagonals, thinned at random
    while G + L stays 4-edge-connected."""
    rng = random.Random(seed)
    points, pairs, vid = _web_layout(rings, spokes)
    vertices = sorted(points)
    base = sorted(pairs)
    diag = []
    for j in range(rings - 1):
        for i in range(spokes):
            a, b = vid(j, i), vid(j + 1, i + 1)
            diag.append((min(a, b), max(a, b)))
    if not _joint_feasible(vertices, base + diag, 3):
        raise DesignError(PARSE_ERROR, "web diagonals do not reach 4-edge-connectivity")
    kept = list(diag)
    order = list(diag)
    rng.shuffle(order)
    for d in order:
        if rng.random() < keep_prob:
            continue
        trial = [x for x in kept if x != d]
        if _survives_removal(vertices, base + trial, *d, 4):
            kept = trial
    edge_list = [(i, u, v) for i, (u, v) in enumerate(base)]
    link_list = [(len(base) + j, u, v) for j, (u, v) in enumerate(sorted(kept))]
    rotation = _angle_rotation(points, vertices, edge_list + link_list)
    link_ids = {l[0] for l in link_list}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in vertices}
    G = PlanarMultigraph(vertices, edge_list, base_rot)
    costs = {e: 1 for e, _, _ in edge_list}
    costs.update({l[0]: rng.randint(1, cost_max) for l in link_list})
    inst = CapInstance(G, link_list, costs, 3, joint_rotation=rotation,
                       meta={"generator": "web-cap", "rings": rings, "spokes": spokes, "seed": seed})
    inst.joint_graph()
    return inst


def gen_nested_cap(levels, seed, cost_max=3, keep_prob=0.5):
    """2-WCAP on nested 6-cycles joined by two rungs each. The base graph is
    minimally 2-edge-connected and deep in the vertex-face graph; links are
    radial chords, chords of the innermost cycle
    and parallel copies of base edges, thinned while G + L stays 3-edge-connected."""
    rng = random.Random(seed)
    size = 6
    vid = lambda j, i: j * size + i % size
    points = {}
    base = []
    for j in range(levels):
        for i in range(size):
            ang = 2 * math.pi * i / size
            points[vid(j, i)] = ((j + 1) * math.cos(ang), (j + 1) * math.sin(ang))
            base.append((vid(j, i), vid(j, i + 1)))
        if j + 1 < levels:
            base += [(vid(j, 0), vid(j + 1, 0)), (vid(j, 3), vid(j + 1, 3))]
    base = sorted((min(u, v), max(u, v)) for u, v in base)
    geo = []
    for j in range(levels - 1):
        for i in (1, 2, 4, 5):
            geo.append((vid(j, i), vid(j + 1, i)))
    geo += [(vid(0, 1), vid(0, 5)), (vid(0, 2), vid(0, 4))]
    geo = sorted({(min(u, v), max(u, v)) for u, v in geo})
    vertices = sorted(points)
    pool = [("geo", p) for p in geo] + [("par", p) for p in base]
    if not _joint_feasible(vertices, base + [p for _, p in pool], 2):
        raise DesignError(PARSE_ERROR, "nested instance is infeasible")
    kept = list(pool)
    order = list(pool)
    rng.shuffle(order)
    for item in order:
        if rng.random() < keep_prob:
            continue
        trial = [x for x in kept if x is not item]
        if _survives_removal(vertices, base + [p for _, p in trial], *item[1], 3):
            kept = trial
    kept.sort(key=lambda x: (x[1], x[0]))
    edge_list = [(i, u, v) for i, (u, v) in enumerate(base)]
    link_list = [(len(base) + j, u, v) for j, (_, (u, v)) in enumerate(kept)]
    joint = sorted(edge_list + link_list, key=lambda t: (t[1], t[2], t[0]))
    rotation = _angle_rotation(points, vertices, joint)
    link_ids = {l[0] for l in link_list}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in vertices}
    G = PlanarMultigraph(vertices, edge_list, base_rot)
    costs = {e: 1 for e, _, _ in edge_list}
    costs.update({l[0]: rng.randint(1, cost_max) for l in link_list})
    inst = CapInstance(G, link_list, costs, 2, joint_rotation=rotation,
                       meta={"generator": "nested-cap", "levels": levels, "seed": seed})
    inst.joint_graph()
    return inst


def gen_snug_chain(n, k=3, link_pattern="minimal"):
    """The ladder-like chain used for snug-path tests: a path 0..n-1, arcs
    i -> i+2 alternately above and below, one extra parallel edge at each end,
    and a long link between the two ends. The "rich" pattern adds a unit
    link beside every path edge, so |L| grows with n while one link still
    suffices."""
    if n < 4:
        raise DesignError(PARSE_ERROR, "snug chain needs n >= 4")
    if k < 3:
        raise DesignError(PARSE_ERROR, "snug chain is defined for k >= 3")
    edges = []
    eid = 0

    def add(u, v):
        nonlocal eid
        edges.append((eid, u, v))
        eid += 1

    for i in range(n - 1):
        for _ in range(k - 2):
            add(i, i + 1)
    for i in range(n - 2):
        add(i, i + 2)
    add(0, 1)
    add(n - 2, n - 1)
    links = [(eid, 0, n - 1)]
    eid += 1
    if link_pattern == "rich":
        for i in range(n - 1):
            links.append((eid, i, i + 1))
            eid += 1
    elif link_pattern != "minimal":
        raise DesignError(PARSE_ERROR, f"unknown link pattern {link_pattern!r}")
    vertices = list(range(n))
    rotation = planar_rotation(vertices, edges + links)
    link_ids = {l[0] for l in links}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in vertices}
    G = PlanarMultigraph(vertices, edges, base_rot)
    costs = {e: 1 for e, _, _ in edges}
    for l in links:
        costs[l[0]] = 1
    return CapInstance(G, links, costs, k, joint_rotation=rotation,
                       meta={"generator": "snug-chain", "n": n, "pattern": link_pattern})


def gen_chain_cap(n, seed, cost_max=5, keep_prob=0.5):
    """3-WCAP on the snug chain with a random pool of short links: copies of
    path edges and arcs plus the long end-to-end link, all with random costs.
    Links are dropped at random while G + L stays 4-edge-connected."""
    rng = random.Random(seed)
    chain = gen_snug_chain(n, 3)
    G = chain.base
    eid = max(G.edges) + 1
    pool = [(0, n - 1)]
    pool += [(i, i + 1) for i in range(n - 1)]
    pool += [(i, i + 2) for i in range(n - 2)]
    pairs = [p for p in G.edges.values()]
    kept = list(pool)
    for p in rng.sample(pool, len(pool)):
        if rng.random() < keep_prob:
            continue
        trial = list(kept)
        trial.remove(p)
        if _survives_removal(G.vertices, pairs + trial, *p, 4):
            kept = trial
    links = []
    for u, v in sorted(kept):
        links.append((eid, u, v))
        eid += 1
    edge_list = [(e, u, v) for e, (u, v) in G.edges.items()]
    rotation = planar_rotation(G.vertices, edge_list + links)
    link_ids = {l[0] for l in links}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in G.vertices}
    base = PlanarMultigraph(G.vertices, edge_list, base_rot)
    costs = {e: 1 for e in G.edges}
    for l in links:
        costs[l[0]] = rng.randint(1, cost_max)
    return CapInstance(base, links, costs, 3, joint_rotation=rotation,
                       meta={"generator": "chain-cap", "n": n, "seed": seed})


# JSON format ------------------------------------------------------------------


def _cost_out(c):
    c = to_fraction(c)
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _cost_in(x, where):
    try:
        if isinstance(x, bool):
            raise ValueError
        if isinstance(x, (int, float)):
            return to_fraction(x)
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise DesignError(PARSE_ERROR, f"{where}: bad cost {x!r}")


def instance_to_json(inst):
    if isinstance(inst, CapInstance):
        G = inst.base
        rotation = inst.joint_rotation if inst.joint_rotation is not None else G.rotation
        links = [{"id": l, "u": u, "v": v, "cost": _cost_out(inst.costs[l])} for l, u, v in inst.links]
    else:
        G = inst.graph
        rotation = G.rotation
        links = []
    data = {
        "vertices": list(G.vertices),
        "edges": [{"id": e, "u": u, "v": v, "cost": _cost_out(inst.costs.get(e, 1))} for e, (u, v) in G.edges.items()],
        "rotation": {str(v): list(rotation[v]) for v in G.vertices} if rotation is not None else None,
        "links": links,
        "k": inst.k,
        "root": inst.root,
    }
    if inst.meta:
        data["meta"] = inst.meta
    return data


def write_instance(inst, path):
    text = json.dumps(instance_to_json(inst), indent=1, sort_keys=False)
    Path(path).write_text(text + "\n")


def _field(obj, name, where):
    if not isinstance(obj, dict) or name not in obj:
        raise DesignError(PARSE_ERROR, f"{where}: missing field {name!r}")
    return obj[name]


def instance_from_json(data, kind=None):
    if not isinstance(data, dict):
        raise DesignError(PARSE_ERROR, "top level must be an object")
    vertices = _field(data, "vertices", "instance")
    if not isinstance(vertices, list):
        raise DesignError(PARSE_ERROR, "vertices must be a list")
    by_text = {str(v): v for v in vertices}
    edge_list, costs = [], {}
    for i, e in enumerate(_field(data, "edges", "instance")):
        where = f"edges[{i}]"
        eid, u, v = _field(e, "id", where), _field(e, "u", where), _field(e, "v", where)
        edge_list.append((eid, u, v))
        costs[eid] = _cost_in(e.get("cost", 1), where)
    links = []
    for i, l in enumerate(data.get("links") or []):
        where = f"links[{i}]"
        lid, u, v = _field(l, "id", where), _field(l, "u", where), _field(l, "v", where)
        links.append((lid, u, v))
        costs[lid] = _cost_in(_field(l, "cost", where), where)
    raw_rot = _field(data, "rotation", "instance")
    if raw_rot is None or not isinstance(raw_rot, dict):
        raise DesignError(PARSE_ERROR, "rotation: expected an object mapping vertex to edge ids")
    rotation = {}
    for key, order in raw_rot.items():
        if key not in by_text:
            raise DesignError(PARSE_ERROR, f"rotation: unknown vertex {key!r}")
        rotation[by_text[key]] = list(order)
    k = _field(data, "k", "instance")
    if not isinstance(k, int) or k < 1:
        raise DesignError(PARSE_ERROR, f"k: expected a positive integer, got {k!r}")
    root = data.get("root")
    meta = data.get("meta") or {}
    edge_ids = {e for e, _, _ in edge_list}
    link_ids = {l for l, _, _ in links}
    if edge_ids & link_ids:
        raise DesignError(PARSE_ERROR, "edge and link ids must be distinct")
    rot_ids = {e for order in rotation.values() for e in order}
    joint = bool(link_ids) and bool(rot_ids & link_ids)
    base_rot = {v: [e for e in order if e in edge_ids] for v, order in rotation.items()}
    G = PlanarMultigraph(vertices, edge_list, base_rot)
    if links or kind == "cap":
        inst = CapInstance(G, links, costs, k, root, joint_rotation=rotation if joint else None, meta=meta)
        if joint:
            inst.joint_graph()
        return inst
    return WecssInstance(G, costs, k, root, meta)


def parse_instance(path, kind=None):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignError(PARSE_ERROR, f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise DesignError(PARSE_ERROR, f"{path}: {exc}")
    return instance_from_json(data, kind)
