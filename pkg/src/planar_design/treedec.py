"""Nice tree decompositions rooted at a single-node bag."""

from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .errors import DesignError, INVALID_DECOMPOSITION
from .graph import id_key

LEAF, INTRODUCE, FORGET, JOIN = "LEAF", "INTRODUCE", "FORGET", "JOIN"


@dataclass
class BagNode:
    kind: str
    bag: frozenset
    node: object = None  # the introduced or forgotten node
    children: list = field(default_factory=list)


@dataclass
class NiceTreeDecomposition:
    bags: list  # BagNode list; children refer to indices
    root: int

    @property
    def width(self):
        return max(len(b.bag) for b in self.bags) - 1

    def postorder(self):
        order, stack = [], [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                order.append(i)
                continue
            stack.append((i, True))
            for c in reversed(self.bags[i].children):
                stack.append((c, False))
        return order


def tree_decomposition(nodes, pairs):
    """Min-fill heuristic decomposition: (width, list of bags, tree edges)."""
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from((u, v) for u, v in pairs if u != v)
    if g.number_of_nodes() == 1:
        only = next(iter(g.nodes))
        return 0, [frozenset([only])], []
    width, tree = treewidth_min_fill_in(g)
    bags = sorted(tree.nodes, key=lambda b: sorted(map(id_key, b)))
    pos = {b: i for i, b in enumerate(bags)}
    edges = [(pos[a], pos[b]) for a, b in tree.edges]
    return width, bags, edges


def make_nice(nodes, pairs, root_node):
    """Nice tree decomposition of the graph (nodes, pairs) whose root bag is {root_node}."""
    _, bags, edges = tree_decomposition(nodes, pairs)
    adj = {i: [] for i in range(len(bags))}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    start = next(i for i, b in enumerate(bags) if root_node in b)
    out = []

    def new(kind, bag, node=None, children=()):
        out.append(BagNode(kind, frozenset(bag), node, list(children)))
        return len(out) - 1

    def chain_to(child, child_bag, target):
        """Forget child_bag \\ target then introduce target \\ child_bag."""
        cur, bag = child, set(child_bag)
        for x in sorted(child_bag - target, key=id_key):
            bag.discard(x)
            cur = new(FORGET, bag, x, [cur])
        for x in sorted(target - child_bag, key=id_key):
            bag.add(x)
            cur = new(INTRODUCE, bag, x, [cur])
        return cur

    def build(i, parent):
        """Index of a nice subtree whose top bag equals bags[i]."""
        bag = set(bags[i])
        kids = [c for c in adj[i] if c != parent]
        if not kids:
            items = sorted(bag, key=id_key)
            cur = new(LEAF, {items[0]}, items[0])
            cur_bag = {items[0]}
            for x in items[1:]:
                cur_bag.add(x)
                cur = new(INTRODUCE, cur_bag, x, [cur])
            return cur
        subs = [chain_to(build(c, i), set(bags[c]), bag) for c in kids]
        cur = subs[0]
        for s in subs[1:]:
            cur = new(JOIN, bag, None, [cur, s])
        return cur

    top = build(start, None)
    bag = set(bags[start])
    for x in sorted(bag - {root_node}, key=id_key):
        bag.discard(x)
        top = new(FORGET, bag, x, [top])
    td = NiceTreeDecomposition(out, top)
    validate_nice(td, nodes, pairs, root_node)
    return td


def validate_nice(td, nodes, pairs, root_node):
    """Raise INVALID_DECOMPOSITION unless td is a nice tree decomposition of
    (nodes, pairs) with root bag {root_node}."""
    def fail(msg):
        raise DesignError(INVALID_DECOMPOSITION, msg)

    if td.bags[td.root].bag != frozenset([root_node]):
        fail(f"root bag is {sorted(td.bags[td.root].bag, key=id_key)}, expected [{root_node!r}]")
    parents = {}
    for i, b in enumerate(td.bags):
        for c in b.children:
            if c in parents:
                fail(f"bag {c} has two parents")
            parents[c] = i
    if len(parents) != len(td.bags) - 1 or td.root in parents:
        fail("bags do not form a tree rooted at the root bag")
    for i, b in enumerate(td.bags):
        kids = [td.bags[c].bag for c in b.children]
        if b.kind == LEAF:
            ok = not kids and len(b.bag) == 1
        elif b.kind == INTRODUCE:
            ok = len(kids) == 1 and b.node not in kids[0] and b.bag == kids[0] | {b.node}
        elif b.kind == FORGET:
            ok = len(kids) == 1 and b.node in kids[0] and b.bag == kids[0] - {b.node}
        elif b.kind == JOIN:
            ok = len(kids) == 2 and kids[0] == b.bag and kids[1] == b.bag
        else:
            ok = False
        if not ok:
            fail(f"bag {i} violates the {b.kind} shape")
    covered = set().union(*(b.bag for b in td.bags))
    if set(nodes) - covered:
        fail("some node lies in no bag")
    for u, v in pairs:
        if u != v and not any(u in b.bag and v in b.bag for b in td.bags):
            fail(f"edge ({u!r}, {v!r}) lies in no bag")
    # each node's bags must form a connected subtree: exactly one holder has a non-holder parent
    for x in nodes:
        holders = [i for i, b in enumerate(td.bags) if x in b.bag]
        tops = [i for i in holders if i == td.root or x not in td.bags[parents[i]].bag]
        if len(tops) != 1:
            fail(f"bags holding {x!r} are not connected")
