"""Instance and solution containers shared by the solvers."""

from dataclasses import dataclass, field
from fractions import Fraction

from .cuts import default_root
from .graph import PlanarMultigraph, planar_rotation


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def cost_ratio(values):
    values = [to_fraction(v) for v in values]
    if not values:
        return Fraction(1)
    return max(values) / min(values)


@dataclass
class WecssInstance:
    graph: PlanarMultigraph
    costs: dict
    k: int
    root: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.costs = {e: to_fraction(c) for e, c in self.costs.items()}
        if self.root is None and self.graph.n:
            self.root = default_root(self.graph)

    @property
    def delta_ratio(self):
        return cost_ratio(self.costs[e] for e in self.graph.edges)


@dataclass
class CapInstance:
    """Base graph G (edges only) plus candidate links.

    ``joint_rotation`` is a rotation system of G + L when one is known; ids of
    edges and links are distinct.
    """

    base: PlanarMultigraph
    links: list
    costs: dict
    k: int
    root: object = None
    joint_rotation: dict = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.links = [tuple(l) for l in self.links]
        self.costs = {e: to_fraction(c) for e, c in self.costs.items()}
        if self.root is None and self.base.n:
            self.root = default_root(self.base)

    @property
    def link_ids(self):
        return [l[0] for l in self.links]

    @property
    def link_ends(self):
        return {l[0]: (l[1], l[2]) for l in self.links}

    @property
    def delta_ratio(self):
        return cost_ratio(self.costs[l] for l in self.link_ids)

    def joint_graph(self, compute_embedding=True):
        """G + L as one multigraph; embedded when a joint rotation is known or
        can be computed."""
        edges = dict(self.base.edges)
        for lid, u, v in self.links:
            edges[lid] = (u, v)
        rotation = self.joint_rotation
        if rotation is None and compute_embedding:
            rotation = planar_rotation(self.base.vertices, [(e, u, v) for e, (u, v) in edges.items()])
            if rotation is not None:
                self.joint_rotation = rotation
        return PlanarMultigraph(self.base.vertices, edges, rotation, validate=rotation is not None)

    def link_cost(self, link_set):
        return sum((self.costs[l] for l in link_set), Fraction(0))


@dataclass
class Solution:
    chosen: frozenset
    cost: Fraction
    certificate: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
