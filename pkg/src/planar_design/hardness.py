"""Planar k-CAP instances built from Linked Planar 3-SAT formulas, plus the
lifts to larger k and a small enumerator of toy formulas."""

import itertools
from dataclasses import dataclass

from .errors import DesignError, SAT_MALFORMED
from .graph import PlanarMultigraph, planar_rotation
from .model import CapInstance


@dataclass
class LinkedPlanar3SatInstance:
    """3-SAT formula with a Hamiltonian cycle order on clauses then variables.

    ``clauses`` holds DIMACS literals; ``clause_order`` lists clause indices
    (0-based) and ``var_order`` lists variables (1-based) along the cycle.
    Positive occurrences are drawn inside the cycle, negated ones outside.
    """

    num_vars: int
    clauses: list
    clause_order: list = None
    var_order: list = None

    def __post_init__(self):
        self.clauses = [tuple(c) for c in self.clauses]
        if self.clause_order is None:
            self.clause_order = list(range(len(self.clauses)))
        if self.var_order is None:
            self.var_order = list(range(1, self.num_vars + 1))

    def occurrences(self, literal):
        return [j for j, c in enumerate(self.clauses) if literal in c]

    def validate(self):
        def fail(msg):
            raise DesignError(SAT_MALFORMED, msg)

        m = self.num_vars
        if m < 1 or not self.clauses:
            fail("formula needs at least one variable and one clause")
        for j, c in enumerate(self.clauses):
            if not 1 <= len(c) <= 3:
                fail(f"clause {j + 1} has {len(c)} literals")
            if any(l == 0 or abs(l) > m for l in c):
                fail(f"clause {j + 1} uses an unknown variable")
            if len({abs(l) for l in c}) != len(c):
                fail(f"clause {j + 1} repeats a variable")
        for x in range(1, m + 1):
            pos, neg = len(self.occurrences(x)), len(self.occurrences(-x))
            if pos + neg > 3:
                fail(f"variable {x} occurs in {pos + neg} clauses")
            if not (1 <= pos <= 2 and 1 <= neg <= 2):
                fail(f"literals of variable {x} occur {pos} and {neg} times")
        if sorted(self.clause_order) != list(range(len(self.clauses))):
            fail("clause order is not a permutation of the clauses")
        if sorted(self.var_order) != list(range(1, m + 1)):
            fail("variable order is not a permutation of the variables")
        for side, sign in (("inside", 1), ("outside", -1)):
            chords = self._chords(sign)
            for (a, b), (c, d) in itertools.combinations(chords, 2):
                if a < c < b < d or c < a < d < b:
                    fail(f"occurrence edges {side} the cycle cross")
        return self

    def _chords(self, sign):
        pos = {("C", j): t for t, j in enumerate(self.clause_order)}
        base = len(self.clause_order)
        pos.update({("x", x): base + t for t, x in enumerate(self.var_order)})
        out = []
        for j, c in enumerate(self.clauses):
            for l in c:
                if (l > 0) == (sign > 0):
                    a, b = pos[("C", j)], pos[("x", abs(l))]
                    out.append((min(a, b), max(a, b)))
        return out

    def is_satisfiable(self):
        return self.satisfying_assignment() is not None

    def satisfying_assignment(self):
        for bits in itertools.product((False, True), repeat=self.num_vars):
            if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses):
                return {x + 1: bits[x] for x in range(self.num_vars)}
        return None


# parsing ----------------------------------------------------------------------


def parse_dimacs(text):
    """(num_vars, clauses) from DIMACS CNF text."""
    num_vars = None
    expected = None
    clauses, current = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DesignError(SAT_MALFORMED, f"line {lineno}: bad problem line")
            try:
                num_vars, expected = int(parts[2]), int(parts[3])
            except ValueError:
                raise DesignError(SAT_MALFORMED, f"line {lineno}: bad problem line") from None
            continue
        if num_vars is None:
            raise DesignError(SAT_MALFORMED, f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DesignError(SAT_MALFORMED, f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise DesignError(SAT_MALFORMED, "missing problem line")
    if expected != len(clauses):
        raise DesignError(SAT_MALFORMED, f"problem line declares {expected} clauses, found {len(clauses)}")
    return num_vars, clauses


def parse_cycle_order(text, num_clauses, num_vars):
    """Cycle order sidecar: whitespace separated tokens c<j> (1-based clause
    index) for all clauses, then x<i> for all variables."""
    clause_order, var_order = [], []
    for tok in text.split():
        kind, rest = tok[:1].lower(), tok[1:]
        if kind not in "cx" or not rest.isdigit():
            raise DesignError(SAT_MALFORMED, f"bad cycle token {tok!r}")
        if kind == "c":
            if var_order:
                raise DesignError(SAT_MALFORMED, "cycle must list all clauses before the variables")
            clause_order.append(int(rest) - 1)
        else:
            var_order.append(int(rest))
    if len(clause_order) != num_clauses or len(var_order) != num_vars:
        raise DesignError(SAT_MALFORMED, "cycle order must list every clause and every variable once")
    return clause_order, var_order


def find_cycle_order(num_vars, clauses, limit=50_000):
    """First (clause order, variable order) in lexicographic order that puts the
    formula in linked planar form, or None."""
    tried = 0
    for co in itertools.permutations(range(len(clauses))):
        for vo in itertools.permutations(range(1, num_vars + 1)):
            tried += 1
            if tried > limit:
                raise DesignError(SAT_MALFORMED, "formula too large to search for a cycle order")
            sat = LinkedPlanar3SatInstance(num_vars, clauses, list(co), list(vo))
            try:
                return sat.validate()
            except DesignError:
                continue
    return None


def load_sat(cnf_path, order_path=None):
    with open(cnf_path) as f:
        num_vars, clauses = parse_dimacs(f.read())
    if order_path is not None:
        with open(order_path) as f:
            co, vo = parse_cycle_order(f.read(), len(clauses), num_vars)
        return LinkedPlanar3SatInstance(num_vars, clauses, co, vo).validate()
    sat = find_cycle_order(num_vars, clauses)
    if sat is None:
        LinkedPlanar3SatInstance(num_vars, clauses).validate()
        raise DesignError(SAT_MALFORMED, "no cycle order puts the formula in linked planar form")
    return sat


def to_dimacs(sat):
    lines = [f"p cnf {sat.num_vars} {len(sat.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in sat.clauses]
    return "\n".join(lines) + "\n"


def to_cycle_order(sat):
    return " ".join([f"c{j + 1}" for j in sat.clause_order] + [f"x{x}" for x in sat.var_order]) + "\n"


def toy_formulas(max_vars=2, max_clauses=3):
    """Every formula with at most ``max_vars`` variables and ``max_clauses``
    clauses (as a multiset of clauses) that admits a linked planar cycle order."""
    out = []
    for m in range(1, max_vars + 1):
        literals = [x for v in range(1, m + 1) for x in (v, -v)]
        clause_pool = []
        for size in (1, 2, 3):
            for c in itertools.combinations(literals, size):
                if len({abs(l) for l in c}) == size:
                    clause_pool.append(c)
        for l in range(1, max_clauses + 1):
            for clauses in itertools.combinations_with_replacement(clause_pool, l):
                used = {abs(x) for c in clauses for x in c}
                if used != set(range(1, m + 1)):
                    continue
                sat = find_cycle_order(m, list(clauses))
                if sat is not None:
                    out.append(sat)
    return out


# construction -------------------------------------------------------------------


class _Builder:
    def __init__(self):
        self.names = []
        self.vid = {}
        self.edges = []
        self.links = []
        self.tilde = []
        self.next_id = 0

    def v(self, name):
        if name not in self.vid:
            self.vid[name] = len(self.names)
            self.names.append(name)
        return self.vid[name]

    def edge(self, a, b, copies=1, tilde=False):
        for c in range(copies):
            self.edges.append((self.next_id, self.v(a), self.v(b)))
            if tilde and c == 0:
                self.tilde.append(self.next_id)
            self.next_id += 1

    def link(self, a, b):
        self.links.append((self.next_id, self.v(a), self.v(b)))
        self.next_id += 1


def _gadget_k2(B, i, s, t):
    """Variable gadget for k=2 between terminals s and t. Returns the outer
    vertices reserved for negated and for positive occurrences."""
    n = lambda x: f"g{i}.{x}"
    for x in ("o1", "o2", "o3", "o4"):
        B.v(n(x))
    B.edge(s, n("o1"))
    B.edge(n("o1"), n("o2"))
    B.edge(n("o2"), t)
    B.edge(t, n("o4"))
    B.edge(n("o4"), n("o3"))
    B.edge(n("o3"), s)
    for j in (1, 2, 3, 4):
        B.edge(n(f"v{j}"), n(f"a{j}"), 2)
        B.edge(n(f"v{j}"), n(f"b{j}"), 2)
        B.edge(n(f"c{j}"), n(f"v{j}"))
        B.edge(n(f"v{j}"), n(f"d{j}"))
    B.edge(s, n("s2"))
    B.edge(n("s2"), n("c1"))
    B.edge(n("d1"), n("c3"))
    B.edge(n("d3"), n("c2"))
    B.edge(n("d2"), n("c4"))
    B.edge(n("d4"), n("t2"))
    B.edge(n("t2"), t)
    false_inner = [("s2", "a1"), ("b1", "a2"), ("b2", "t2"), ("c1", "d1"), ("c2", "d2"),
                   ("a3", "c3"), ("b3", "d3"), ("a4", "c4"), ("b4", "d4"), ("v3", "o3"), ("v4", "o4")]
    true_inner = [("s2", "a3"), ("b3", "a4"), ("b4", "t2"), ("c3", "d3"), ("c4", "d4"),
                  ("a1", "c1"), ("b1", "d1"), ("a2", "c2"), ("b2", "d2"), ("v1", "o1"), ("v2", "o2")]
    for a, b in false_inner + true_inner:
        B.link(n(a), n(b))
    return [n("o1"), n("o2")], [n("o3"), n("o4")]


def _gadget_k3(B, i, s, t):
    """Variable gadget for k=3; s and t play the cycle vertices v1 and v12."""
    def n(x):
        if x == "v1":
            return s
        if x == "v12":
            return t
        return f"g{i}.{x}"

    for x in ("o1", "o2", "o3", "o4"):
        B.v(n(x))
    tilde_cycle = {(j, j + 1) for j in (1, 2, 4, 5, 6, 7, 8, 10, 11, 12, 13, 15, 16, 17, 18, 20, 21)} | {(22, 1)}
    for j in range(1, 23):
        nxt = j % 22 + 1
        B.edge(n(f"v{j}"), n(f"v{nxt}"), tilde=(j, nxt) in tilde_cycle)
    B.edge(n("t2"), n("v0"), tilde=True)
    B.edge(n("v0"), n("s2"), tilde=True)
    B.edge(n("t2"), n("v1"), 2, tilde=True)
    B.edge(n("s2"), n("v12"), 2, tilde=True)
    attach = {3: (2, 4, 5), 9: (8, 10, 11), 14: (13, 15, 16), 20: (19, 21, 22)}
    first = {3: 4, 9: 10, 14: 15, 20: 19}
    for j in (3, 9, 14, 20):
        B.edge(n("v0"), n(f"q{j}"))
        B.edge(n(f"q{j}"), n(f"p{j}"), tilde=True)
        B.edge(n(f"p{j}"), n(f"v{j}"), 2, tilde=True)
        for x in attach[j]:
            B.edge(n(f"v{x}"), n(f"q{j}"), tilde=(x == first[j]))
    for x in (6, 7, 17, 18):
        B.edge(n(f"v{x}"), n("v0"))
    B.edge(n("v1"), n("o1"), 2, tilde=True)
    B.edge(n("o2"), n("v12"), 2, tilde=True)
    B.edge(n("v12"), n("o3"), 2, tilde=True)
    B.edge(n("o4"), n("v1"), 2, tilde=True)
    B.edge(n("o1"), n("o2"), tilde=True)
    B.edge(n("o3"), n("o4"), tilde=True)
    false_inner = [("t2", "v2"), ("p3", "v4"), ("v5", "v6"), ("v7", "v8"), ("p9", "v10"), ("v11", "s2"),
                   ("v13", "p14"), ("v15", "v16"), ("v17", "v18"), ("v19", "p20"), ("v21", "v22"),
                   ("o3", "v14"), ("o4", "v20")]
    true_inner = [("v2", "p3"), ("v4", "v5"), ("v6", "v7"), ("v8", "p9"), ("v10", "v11"), ("s2", "v13"),
                  ("p14", "v15"), ("v16", "v17"), ("v18", "v19"), ("p20", "v21"), ("v22", "t2"),
                  ("o1", "v3"), ("o2", "v9")]
    for a, b in false_inner + true_inner:
        B.link(n(a), n(b))
    return [n("o1"), n("o2")], [n("o3"), n("o4")]


def _clause_path(B, sat, k, start, end):
    """Path from t_m through the clauses back to s_1. Returns, per clause, the
    attachment vertex for positive and for negated occurrences."""
    attach = {}
    prev = start
    for j in sat.clause_order:
        if k == 2:
            c = f"C{j + 1}"
            B.edge(prev, c)
            attach[j] = (c, c)
            prev = c
        else:
            a, b, c, v, w = (f"C{j + 1}.{x}" for x in "abcvw")
            B.edge(prev, a, 2, tilde=True)
            for x in (v, c, w):
                B.edge(b, x, tilde=True)
                B.edge(a, x, 2, tilde=True)
            B.link(v, c)
            B.link(c, w)
            attach[j] = (v, w)
            prev = b
    B.edge(prev, end, 1 if k == 2 else 2, tilde=True)
    return attach


def _build(sat, k, choice):
    B = _Builder()
    m = sat.num_vars
    terminals = ["s1"] + [f"t{i}" for i in range(1, m + 1)]
    for name in terminals:
        B.v(name)
    gadget = _gadget_k2 if k == 2 else _gadget_k3
    outs = {}
    for pos, x in enumerate(sat.var_order):
        outs[x] = gadget(B, x, terminals[pos], terminals[pos + 1])
    attach = _clause_path(B, sat, k, terminals[-1], terminals[0])
    for x in range(1, m + 1):
        neg_out, pos_out = outs[x]
        for lit, ports, side in ((x, pos_out, 0), (-x, neg_out, 1)):
            occ = sat.occurrences(lit)
            if len(occ) == 1:
                occ = occ * 2
            if choice.get(lit):
                occ = occ[::-1]
            for port, j in zip(ports, occ):
                B.link(port, attach[j][side])
    return B


def _finish(B, sat, k, generator):
    vertices = list(range(len(B.names)))
    rotation = planar_rotation(vertices, B.edges + B.links)
    if rotation is None:
        return None
    PlanarMultigraph(vertices, B.edges + B.links, rotation)  # Euler check of G + L
    link_ids = {l[0] for l in B.links}
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in vertices}
    G = PlanarMultigraph(vertices, B.edges, base_rot)
    costs = {e[0]: 1 for e in B.edges}
    costs.update({l[0]: 1 for l in B.links})
    meta = {"generator": generator, "labels": list(B.names), "num_vars": sat.num_vars,
            "clauses": [list(c) for c in sat.clauses]}
    if k == 3:
        meta["spanning_2ec"] = list(B.tilde)
    return CapInstance(G, B.links, costs, k, joint_rotation=rotation, meta=meta)


def _gen(sat, k):
    sat.validate()
    doubled = [l for x in range(1, sat.num_vars + 1) for l in (x, -x) if len(sat.occurrences(l)) == 2]
    for flips in itertools.product((False, True), repeat=len(doubled)):
        inst = _finish(_build(sat, k, dict(zip(doubled, flips))), sat, k, f"hardness-k{k}")
        if inst is not None:
            return inst
    raise DesignError(SAT_MALFORMED, "no assignment of occurrences to gadget ports is planar")


def gen_hardness_k2(sat):
    """2-CAP instance whose optimum is 13m exactly when the formula is satisfiable."""
    return _gen(sat, 2)


def gen_hardness_k3(sat):
    """3-CAP instance whose optimum is 15m + l exactly when the formula is satisfiable."""
    return _gen(sat, 3)


def hardness_target(sat, k):
    """Cardinality that a solution reaches exactly when the formula is satisfiable."""
    if k % 2 == 0:
        return 13 * sat.num_vars
    return 15 * sat.num_vars + len(sat.clauses)


def lift_hardness(inst, k):
    """Raise the connectivity of a k=2 (for even k) or k=3 (for odd k)
    instance to k while keeping the family of minimum cuts."""
    base_k = inst.k
    if k < 2 or (k % 2 == 0) != (base_k == 2) or base_k not in (2, 3):
        raise DesignError(SAT_MALFORMED, f"cannot lift a k={base_k} instance to k={k}")
    G = inst.base
    next_id = max(list(G.edges) + inst.link_ids) + 1
    edges = [(e, u, v) for e, (u, v) in G.edges.items()]
    if base_k == 2:
        copy_ids, copies = list(G.edges), k // 2 - 1
    else:
        copy_ids, copies = list(inst.meta["spanning_2ec"]), (k - 3) // 2
    for e in copy_ids:
        u, v = G.edges[e]
        for _ in range(copies):
            edges.append((next_id, u, v))
            next_id += 1
    rotation = planar_rotation(list(G.vertices), edges + list(inst.links))
    link_ids = set(inst.link_ids)
    base_rot = {v: [e for e in rotation[v] if e not in link_ids] for v in G.vertices}
    H = PlanarMultigraph(G.vertices, edges, base_rot)
    costs = dict(inst.costs)
    costs.update({e[0]: 1 for e in edges if e[0] not in costs})
    meta = dict(inst.meta, lifted_from=base_k)
    return CapInstance(H, list(inst.links), costs, k, root=inst.root, joint_rotation=rotation, meta=meta)
