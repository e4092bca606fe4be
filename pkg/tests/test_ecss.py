import random
from fractions import Fraction

import networkx as nx
import pytest

from builders import cycle, embedded, grid, k4, nx_edge_connectivity, parallel
from planar_design.ecss import (exact_wecss, exact_wvcss, glue, preprocess_wecss, preprocess_wvcss, ptas_wecss,
                                ptas_wvcss)
from planar_design.errors import (INFEASIBLE, INVALID_EPSILON, K_TOO_LARGE, PIECE_INFEASIBLE, DesignError)
from planar_design.instances import gen_planar_kec, gen_planar_kvc, gen_web_kec
from planar_design.model import WecssInstance
from planar_design.oracle import brute_wecss, brute_wvcss


def unit(G, k):
    return WecssInstance(G, {e: 1 for e in G.edges}, k)


# preprocessing


def test_five_parallel_edges_keep_two():
    inst = preprocess_wecss(unit(parallel(5), 2))
    assert inst.graph.m == 2


def test_preprocess_without_parallel_edges_is_identity():
    inst = unit(cycle(6), 2)
    assert set(preprocess_wecss(inst).graph.edges) == set(inst.graph.edges)


def test_preprocess_keeps_cheapest_parallel_edges():
    G = parallel(5)
    costs = {0: 7, 1: 3, 2: 9, 3: 1, 4: 5}
    inst = preprocess_wecss(WecssInstance(G, costs, 3))
    assert set(inst.graph.edges) == {3, 1, 4}


def test_preprocess_rejects_infeasible():
    with pytest.raises(DesignError) as exc:
        preprocess_wecss(unit(cycle(5), 3))
    assert exc.value.code == INFEASIBLE


# exact solver


@pytest.mark.parametrize("method", ["milp", "bnb"])
def test_exact_cycle(method):
    sol = exact_wecss(cycle(5), {e: 1 for e in range(5)}, 2, method)
    assert sol.cost == 5 and len(sol.chosen) == 5


@pytest.mark.parametrize("method", ["milp", "bnb"])
def test_exact_parallel_costs(method):
    sol = exact_wecss(parallel(3), {0: 1, 1: 2, 2: 3}, 2, method)
    assert sol.cost == 3 and sol.chosen == frozenset([0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_exact_matches_brute_force(seed):
    k = 2 + seed % 2
    inst = gen_planar_kec(8, k, seed)
    ref = brute_wecss(inst.graph, inst.costs, k)
    for method in ("milp", "bnb"):
        sol = exact_wecss(inst.graph, inst.costs, k, method)
        assert sol.cost == ref.cost
        assert nx_edge_connectivity(inst.graph.restrict(sol.chosen)) >= k


# gluing


def test_glue_single_piece():
    G = cycle(6)
    assert glue([(frozenset(G.vertices), set(G.edges))], set(), G, 2) == set(G.edges)


def test_glue_counts_shared_edges_once():
    G = cycle(6)
    pieces = [(frozenset([0, 1, 2, 3]), {0, 1, 2}), (frozenset([2, 3, 4, 5, 0]), {2, 3, 4, 5})]
    assert glue(pieces, set(), G, 2) == set(range(6))


def test_glue_rejects_broken_piece_solutions():
    G = cycle(6)
    with pytest.raises(DesignError) as exc:
        glue([(frozenset(G.vertices), {0, 1, 2, 3, 4})], set(), G, 2)
    assert exc.value.code == PIECE_INFEASIBLE


# ptas


@pytest.mark.parametrize("eps", [0, -1, Fraction(3, 2)])
def test_invalid_epsilon(eps):
    with pytest.raises(DesignError) as exc:
        ptas_wecss(unit(cycle(5), 2), eps)
    assert exc.value.code == INVALID_EPSILON


def test_single_piece_ptas_is_exact():
    inst = gen_planar_kec(10, 2, 3)
    sol = ptas_wecss(inst, Fraction(1, 2))
    assert sol.stats["pieces"] == 1
    assert sol.cost == brute_wecss(inst.graph, inst.costs, 2).cost


def test_doubled_boundary_grid():
    G = grid(4, 4)
    pairs = list(G.edges.values())
    boundary = [(u, v) for u, v in pairs if {u // 4, v // 4} <= {0} or {u // 4, v // 4} <= {3}
                or {u % 4, v % 4} <= {0} or {u % 4, v % 4} <= {3}]
    G2 = embedded(list(G.vertices), pairs + boundary)
    rng = random.Random(1)
    inst = WecssInstance(G2, {e: rng.randint(1, 3) for e in G2.edges}, 2)
    sol = ptas_wecss(inst, Fraction(1, 2))
    opt = brute_wecss(G2, inst.costs, 2).cost
    assert opt <= sol.cost <= Fraction(3, 2) * opt


@pytest.mark.parametrize("seed", range(8))
def test_ptas_ratio_unit_costs(seed):
    G = gen_planar_kec(8 + seed % 7, 2, seed).graph
    inst = unit(G, 2)
    opt = brute_wecss(G, inst.costs, 2).cost
    sol = ptas_wecss(inst, Fraction(3, 10))
    assert sol.cost <= Fraction(13, 10) * opt
    assert nx_edge_connectivity(G.restrict(sol.chosen)) >= 2


@pytest.mark.parametrize("seed", range(4))
def test_multi_piece_run(seed):
    inst = gen_web_kec(12 + 2 * (seed % 2), 6, 2, seed)
    delta = Fraction(1, 2)
    sol = ptas_wecss(inst, Fraction(1, 2), delta=delta)
    st = sol.stats
    assert st["pieces"] >= 2
    assert st["cover_bound_ok"] and st["c_E_U"] <= delta * st["c_E"]
    assert nx_edge_connectivity(inst.graph.restrict(sol.chosen)) >= 2
    assert sol.certificate["min_cut"] >= 2


def test_edge_total_against_optimum():
    # c(E) <= 6 * cost ratio * OPT on preprocessed instances
    for seed in range(6):
        inst = preprocess_wecss(gen_planar_kec(10, 2 + seed % 2, seed))
        opt = brute_wecss(inst.graph, inst.costs, inst.k).cost
        assert sum(inst.costs.values()) <= 6 * inst.delta_ratio * opt


# vertex connectivity


def test_k4_vertex_version():
    sol = ptas_wvcss(unit(k4(), 3), Fraction(1, 2))
    assert sol.cost == 6


def test_cycle_vertex_version():
    sol = ptas_wvcss(unit(cycle(7), 2), Fraction(1, 2))
    assert sol.cost == 7
    assert exact_wvcss(cycle(7), {e: 1 for e in range(7)}, 2).cost == 7


def test_vertex_version_k_too_large():
    with pytest.raises(DesignError) as exc:
        preprocess_wvcss(unit(k4(), 6))
    assert exc.value.code == K_TOO_LARGE


def test_vertex_version_infeasible():
    with pytest.raises(DesignError) as exc:
        ptas_wvcss(unit(cycle(6), 3), Fraction(1, 2))
    assert exc.value.code == INFEASIBLE


@pytest.mark.parametrize("seed", range(6))
def test_vertex_ptas_ratio(seed):
    k = 2 + seed % 2
    inst = gen_planar_kvc(9 + seed % 4, k, seed)
    opt = brute_wvcss(inst.graph, inst.costs, k).cost
    sol = ptas_wvcss(inst, Fraction(1, 2))
    assert sol.cost <= Fraction(3, 2) * opt
    g = nx.Graph(list(inst.graph.restrict(sol.chosen).edges.values()))
    assert nx.node_connectivity(g) >= k


@pytest.mark.parametrize("seed", range(3))
def test_vertex_multi_piece_run(seed):
    inst = gen_web_kec(12, 6, 2, seed)
    sol = ptas_wvcss(inst, Fraction(1, 2), delta=Fraction(1, 2))
    assert sol.stats["pieces"] >= 2
    g = nx.Graph(list(inst.graph.restrict(sol.chosen).edges.values()))
    assert nx.node_connectivity(g) >= 2
    assert sol.stats["cover_bound_ok"]
