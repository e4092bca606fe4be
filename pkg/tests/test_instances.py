import json
from fractions import Fraction
from pathlib import Path

import pytest

from builders import nx_edge_connectivity
from planar_design.cuts import enumerate_k_cuts, min_cut_value
from planar_design.errors import PARSE_ERROR, DesignError
from planar_design.graph import PlanarMultigraph
from planar_design.instances import (gen_cap_instance, gen_chain_cap, gen_nested_cap, gen_planar_kec,
                                     gen_planar_kvc, gen_snug_chain, gen_web_cap, gen_web_kec, instance_from_json,
                                     instance_to_json, parse_instance, write_instance)
from planar_design.model import CapInstance
from planar_design.oracle import brute_wcap
from planar_design.snug import find_snug_structure

DATA = Path(__file__).parent / "data"


def same_instance(a, b):
    assert type(a) is type(b)
    ga = a.base if isinstance(a, CapInstance) else a.graph
    gb = b.base if isinstance(b, CapInstance) else b.graph
    assert list(ga.vertices) == list(gb.vertices)
    assert dict(ga.edges) == dict(gb.edges)
    assert {v: list(r) for v, r in ga.rotation.items()} == {v: list(r) for v, r in gb.rotation.items()}
    assert {e: Fraction(c) for e, c in a.costs.items()} == {e: Fraction(c) for e, c in b.costs.items()}
    assert a.k == b.k and a.root == b.root
    if isinstance(a, CapInstance):
        assert list(a.links) == list(b.links)


def euler_ok(G):
    # rebuilding from the rotation runs the face walk and the Euler check
    PlanarMultigraph(G.vertices, G.edges, G.rotation)
    return True


# snug chain


def test_snug_chain_is_three_edge_connected():
    for n in (4, 6, 9):
        inst = gen_snug_chain(n)
        assert min_cut_value(inst.base) == 3
        assert nx_edge_connectivity(inst.base, [inst.link_ends[l] for l in inst.link_ids]) >= 4


def test_snug_chain_single_link_suffices():
    inst = gen_snug_chain(6)
    assert len(inst.links) == 1
    assert brute_wcap(inst.base, inst.links, inst.costs, 3).cost == 1


def test_snug_chain_cut_count_grows_linearly():
    counts = [len(enumerate_k_cuts(gen_snug_chain(n).base, 3)) for n in (6, 8, 10, 12)]
    steps = {b - a for a, b in zip(counts, counts[1:])}
    assert len(steps) == 1 and steps.pop() > 0


def test_snug_chain_has_one_snug_path():
    for n in (6, 10):
        inst = gen_snug_chain(n)
        S = find_snug_structure(inst.base, inst.root, 3)
        assert len(S.paths) == 1
        assert len(S.snug) == n - 2


# random generators


@pytest.mark.parametrize("gen, args", [
    (gen_planar_kec, (20, 2, 4)),
    (gen_planar_kvc, (12, 3, 4)),
    (gen_cap_instance, (12, 2, 4)),
    (gen_web_kec, (6, 5, 2, 4)),
    (gen_web_cap, (4, 5, 4)),
    (gen_nested_cap, (3, 4)),
    (gen_chain_cap, (8, 4)),
])
def test_same_seed_gives_identical_bytes(gen, args, tmp_path):
    write_instance(gen(*args), tmp_path / "a.json")
    write_instance(gen(*args), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_different_seeds_differ():
    a = instance_to_json(gen_planar_kec(20, 2, 1))
    b = instance_to_json(gen_planar_kec(20, 2, 2))
    assert a != b


def test_small_kec_example():
    assert min_cut_value(gen_planar_kec(5, 2, 1).graph) == 2


@pytest.mark.parametrize("seed", range(10))
def test_kec_declared_connectivity(seed):
    k = 2 + seed % 2
    inst = gen_planar_kec(8 + seed, k, seed)
    assert euler_ok(inst.graph)
    assert min_cut_value(inst.graph) == k == inst.k
    assert nx_edge_connectivity(inst.graph) == k


def test_kec_n8_k3_passes_euler():
    assert euler_ok(gen_planar_kec(8, 3, 0).graph)


@pytest.mark.parametrize("seed", range(8))
def test_cap_instances_are_feasible(seed):
    for inst in (gen_cap_instance(10, 2 + seed % 2, seed), gen_chain_cap(7 + seed, seed),
                 gen_nested_cap(2 + seed % 3, seed), gen_web_cap(3 + seed % 3, 5, seed)):
        assert euler_ok(inst.base)
        assert min_cut_value(inst.base) == inst.k
        assert nx_edge_connectivity(inst.base, [inst.link_ends[l] for l in inst.link_ids]) >= inst.k + 1
        # the joint embedding of G + L is planar as well
        euler_ok(inst.joint_graph())


# serialization


@pytest.mark.parametrize("inst", [gen_planar_kec(12, 3, 2), gen_cap_instance(10, 2, 3), gen_snug_chain(8, 3, "rich"),
                                  gen_nested_cap(2, 1)], ids=["kec", "cap", "rich-chain", "nested"])
def test_write_then_parse_round_trip(inst, tmp_path):
    path = tmp_path / "inst.json"
    write_instance(inst, path)
    same_instance(parse_instance(path), inst)


def test_fractional_costs_round_trip(tmp_path):
    inst = gen_planar_kec(8, 2, 0)
    inst.costs[next(iter(inst.costs))] = Fraction(7, 3)
    write_instance(inst, tmp_path / "f.json")
    same_instance(parse_instance(tmp_path / "f.json"), inst)


def test_golden_snug_chain_file():
    same_instance(parse_instance(DATA / "snug_chain6.json"), gen_snug_chain(6))


def test_missing_rotation_is_a_parse_error():
    data = instance_to_json(gen_snug_chain(6))
    del data["rotation"]
    with pytest.raises(DesignError) as exc:
        instance_from_json(data)
    assert exc.value.code == PARSE_ERROR and "rotation" in exc.value.message


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["edges"][0].pop("u"), "edges[0]"),
    (lambda d: d["links"][0].update(cost="abc"), "links[0]"),
    (lambda d: d.update(k=0), "k"),
    (lambda d: d["rotation"].update({"99": []}), "rotation"),
])
def test_field_diagnostics(mutate, field):
    data = instance_to_json(gen_snug_chain(6))
    mutate(data)
    with pytest.raises(DesignError) as exc:
        instance_from_json(data)
    assert exc.value.code == PARSE_ERROR and field in exc.value.message


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "vertices": [1,\n')
    with pytest.raises(DesignError) as exc:
        parse_instance(path)
    assert exc.value.code == PARSE_ERROR and "line" in exc.value.message


def test_missing_file_is_a_parse_error(tmp_path):
    with pytest.raises(DesignError) as exc:
        parse_instance(tmp_path / "nope.json")
    assert exc.value.code == PARSE_ERROR


def test_json_is_plain_data():
    text = json.dumps(instance_to_json(gen_cap_instance(9, 3, 1)))
    assert json.loads(text)["k"] == 3
