"""Command line entry point: solvers, verifier, generators and benchmarks."""

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import networkx as nx

from .cap import exact_wcap, is_feasible, ptas_wcap
from .cuts import FlowNetwork, min_cut_value
from .ecss import exact_wecss, exact_wvcss, ptas_wecss, ptas_wvcss
from .errors import DesignError, INFEASIBLE, NOT_K_CONNECTED, ORACLE_TOO_LARGE, PIECE_INFEASIBLE
from .graph import id_key
from .hardness import gen_hardness_k2, gen_hardness_k3, lift_hardness, load_sat
from .instances import (gen_cap_instance, gen_chain_cap, gen_planar_kec, gen_planar_kvc, gen_snug_chain,
                        parse_instance, write_instance)
from .model import CapInstance
from .oracle import brute_wcap, brute_wecss, brute_wvcss
from .snugdp import snugtw_dp

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
FAIL_CODES = {INFEASIBLE, PIECE_INFEASIBLE, NOT_K_CONNECTED}
CSV_COLUMNS = ["instance_id", "n", "m", "links", "k", "eps", "ptas_cost", "oracle_cost", "ratio", "millis"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=id_key) if isinstance(x, (set, frozenset)) else items
    return x


def _write_json(path, data):
    Path(path).write_text(json.dumps(_jsonable(data), indent=1, sort_keys=True) + "\n")


def _fraction_arg(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _instance_stats(inst):
    if isinstance(inst, CapInstance):
        return {"n": inst.base.n, "m": inst.base.m, "links": len(inst.links), "k": inst.k,
                "cost_ratio": inst.delta_ratio}
    return {"n": inst.graph.n, "m": inst.graph.m, "links": 0, "k": inst.k, "cost_ratio": inst.delta_ratio}


def _load(args, cap):
    if not args.input:
        raise UsageError("--input is required")
    inst = parse_instance(args.input, "cap" if cap else None)
    if cap != isinstance(inst, CapInstance):
        raise UsageError("input is not a " + ("CAP" if cap else "spanning subgraph") + " instance")
    if args.k is not None:
        inst.k = args.k
    return inst


# solve ----------------------------------------------------------------------------


def cmd_solve(args, problem):
    inst = _load(args, problem == "cap")
    start = time.perf_counter()
    params = {"eps": args.eps, "delta": args.delta, "lambda": args.lam, "seed": args.seed, "method": args.method}
    if problem == "ecss":
        sol = ptas_wecss(inst, args.eps, delta=args.delta) if args.method == "ptas" else exact_wecss(inst.graph, inst.costs, inst.k)
    elif problem == "vcss":
        sol = ptas_wvcss(inst, args.eps, delta=args.delta) if args.method == "ptas" else exact_wvcss(inst.graph, inst.costs, inst.k)
    elif args.method == "ptas":
        sol = ptas_wcap(inst, args.eps, delta=args.delta, lam=args.lam)
    elif args.method == "dp":
        sol = snugtw_dp(inst)
    else:
        sol = exact_wcap(inst.base, inst.links, inst.costs, inst.k, inst.root)
    millis = round(1000 * (time.perf_counter() - start), 3)
    chosen = sorted(sol.chosen, key=id_key)
    result = {"schema": SCHEMA, "problem": problem, "cost": sol.cost, "chosen": chosen}
    if args.out:
        _write_json(args.out, result)
    if args.report:
        _write_json(args.report, {
            "schema": SCHEMA, "command": ["solve-" + problem] + args.argv, "instance": _instance_stats(inst),
            "parameters": params, "stages": sol.stats, "result": {"cost": sol.cost, "chosen": chosen},
            "certificate": sol.certificate, "millis": millis})
    print(f"cost {_jsonable(sol.cost)} with {len(chosen)} {'links' if problem == 'cap' else 'edges'}")
    return EXIT_OK


# verify ---------------------------------------------------------------------------


def _small_cut(vertices, pairs, need):
    """A vertex set crossed by fewer than ``need`` of the given pairs, or None."""
    n = len(vertices)
    if n <= 1:
        return None
    idx = {v: i for i, v in enumerate(vertices)}
    net = FlowNetwork(n, [(idx[u], idx[v], 1) for u, v in pairs])
    for t in range(1, n):
        value, res = net.max_flow(1, 1 << t, limit=need)
        if value < need:
            side = net.reachable_from(res, 1)
            return sorted((vertices[i] for i in range(n) if side >> i & 1), key=id_key)
    return None


def cmd_verify(args):
    if not args.solution:
        raise UsageError("--solution is required")
    inst = parse_instance(args.input) if args.input else None
    if inst is None:
        raise UsageError("--input is required")
    try:
        sol = json.loads(Path(args.solution).read_text())
        chosen = list(sol["chosen"])
        claimed = Fraction(str(sol.get("cost"))) if sol.get("cost") is not None else None
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read solution: {exc}") from None
    cap = isinstance(inst, CapInstance)
    problem = sol.get("problem", "cap" if cap else "ecss")
    checks = []
    if cap:
        G, ends = inst.base, inst.link_ends
        pairs = list(G.edges.values())
        need = inst.k + 1
        known = set(ends)
    else:
        G = inst.graph
        pairs = []
        need = inst.k
        known = set(G.edges)
        ends = G.edges
    unknown = [x for x in chosen if x not in known]
    checks.append({"name": "ids_known", "ok": not unknown, "detail": unknown})
    picked = [x for x in chosen if x in known]
    pairs = pairs + [ends[x] for x in picked]
    cost = sum((inst.costs[x] for x in picked), Fraction(0))
    checks.append({"name": "cost_matches", "ok": claimed is None or claimed == cost, "detail": cost})
    if problem == "vcss":
        g = nx.MultiGraph()
        g.add_nodes_from(G.vertices)
        g.add_edges_from(pairs)
        sep = nx.minimum_node_cut(g) if g.number_of_nodes() > 1 and nx.is_connected(g) else set()
        ok = nx.is_connected(g) and (len(sep) >= need or g.number_of_nodes() <= need)
        checks.append({"name": f"{need}_vertex_connected", "ok": ok, "detail": sorted(sep, key=id_key)})
    else:
        cut = _small_cut(list(G.vertices), pairs, need)
        checks.append({"name": f"{need}_edge_connected", "ok": cut is None, "detail": cut})
    size = len(inst.links) if cap else G.m
    if size <= args.oracle_limit:
        try:
            if cap:
                opt = brute_wcap(G, inst.links, inst.costs, inst.k, limit=args.oracle_limit).cost
            elif problem == "vcss":
                opt = brute_wvcss(G, inst.costs, inst.k, max_edges=args.oracle_limit).cost
            else:
                opt = brute_wecss(G, inst.costs, inst.k, max_edges=args.oracle_limit).cost
            ok = opt <= cost and (args.eps is None or cost <= (1 + args.eps) * opt)
            checks.append({"name": "oracle_ratio", "ok": ok, "detail": {"oracle": opt, "cost": cost}})
        except DesignError as exc:
            if exc.code != ORACLE_TOO_LARGE:
                raise
    failed = [c for c in checks if not c["ok"]]
    if args.report:
        _write_json(args.report, {"schema": SCHEMA, "command": ["verify"] + args.argv,
                                  "instance": _instance_stats(inst), "checks": checks, "ok": not failed})
    for c in checks:
        detail = "" if c["ok"] else f": {json.dumps(_jsonable(c['detail']))}"
        print(f"{'ok  ' if c['ok'] else 'FAIL'} {c['name']}{detail}")
    return EXIT_FAIL if failed else EXIT_OK


# gen ------------------------------------------------------------------------------


def cmd_gen(args):
    family = args.family
    if family == "snug-chain":
        inst = gen_snug_chain(args.n or 6, args.k or 3, args.pattern)
    elif family == "random-kec":
        inst = gen_planar_kec(args.n or 10, args.k or 2, args.seed)
    elif family == "random-kvc":
        inst = gen_planar_kvc(args.n or 10, args.k or 2, args.seed)
    elif family == "random-cap":
        inst = gen_cap_instance(args.n or 10, args.k or 2, args.seed)
    elif family == "chain-cap":
        inst = gen_chain_cap(args.n or 8, args.seed)
    else:
        if not args.formula:
            raise UsageError("gen hardness needs --formula")
        order = args.order
        if order is None and Path(args.formula + ".order").exists():
            order = args.formula + ".order"
        sat = load_sat(args.formula, order)
        k = args.k or 2
        inst = gen_hardness_k2(sat) if k % 2 == 0 else gen_hardness_k3(sat)
        if k > 3:
            inst = lift_hardness(inst, k)
    if not args.out:
        raise UsageError("--out is required")
    write_instance(inst, args.out)
    print(f"wrote {family} instance with {_instance_stats(inst)['n']} vertices to {args.out}")
    return EXIT_OK


# bench ----------------------------------------------------------------------------


def _bench_instance(problem, n, k, seed):
    if problem == "ecss":
        return gen_planar_kec(n, k, seed)
    if problem == "vcss":
        return gen_planar_kvc(n, k, seed)
    return gen_cap_instance(n, k, seed)


def _bench_one(job):
    problem, n, k, seed, eps_list, oracle_limit, delta = job
    inst = _bench_instance(problem, n, k, seed)
    stats = _instance_stats(inst)
    oracle = None
    size = stats["links"] if problem == "cap" else stats["m"]
    if size <= oracle_limit:
        try:
            if problem == "ecss":
                oracle = brute_wecss(inst.graph, inst.costs, k, max_edges=oracle_limit).cost
            elif problem == "vcss":
                oracle = brute_wvcss(inst.graph, inst.costs, k, max_edges=oracle_limit).cost
            else:
                oracle = brute_wcap(inst.base, inst.links, inst.costs, k, limit=oracle_limit).cost
        except DesignError as exc:
            if exc.code != ORACLE_TOO_LARGE:
                raise
    rows = []
    for eps in eps_list:
        t0 = time.perf_counter()
        if problem == "ecss":
            sol = ptas_wecss(inst, eps, delta=delta)
        elif problem == "vcss":
            sol = ptas_wvcss(inst, eps, delta=delta)
        else:
            sol = ptas_wcap(inst, eps, delta=delta)
        millis = round(1000 * (time.perf_counter() - t0), 3)
        if oracle is None:
            ratio = "NA"
        elif oracle == 0:
            ratio = "1.000000" if sol.cost == 0 else "inf"
        else:
            ratio = f"{float(sol.cost / oracle):.6f}"
        rows.append({"instance_id": f"{problem}-n{n}-k{k}-s{seed}", "n": stats["n"], "m": stats["m"],
                     "links": stats["links"], "k": k, "eps": _jsonable(eps), "ptas_cost": _jsonable(sol.cost),
                     "oracle_cost": "NA" if oracle is None else _jsonable(oracle), "ratio": ratio,
                     "millis": millis})
    return rows


def cmd_bench(args):
    eps_list = [_fraction_arg(x) for x in args.eps_list.split(",")] if args.eps_list else [args.eps]
    k = args.k or 2
    jobs = [(args.problem, args.n or 10, k, args.seed + i, eps_list, args.oracle_limit, args.delta)
            for i in range(args.count)]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rows in results:
            writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# entry point ------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="planar-design", description="Planar network design solvers")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--input")
        sp.add_argument("--out")
        sp.add_argument("--report")
        sp.add_argument("--k", type=int)
        sp.add_argument("--eps", type=_fraction_arg, default=Fraction(1, 2))
        sp.add_argument("--delta", type=_fraction_arg)
        sp.add_argument("--lambda", dest="lam", type=_fraction_arg)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--oracle-limit", type=int, default=20)
        sp.add_argument("--threads", type=int, default=1)

    for name, methods in (("solve-ecss", ("ptas", "exact")), ("solve-vcss", ("ptas", "exact")),
                          ("solve-cap", ("ptas", "dp", "exact"))):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--method", choices=methods, default="ptas")
    sp = sub.add_parser("verify")
    common(sp)
    sp.set_defaults(eps=None)
    sp.add_argument("--solution")
    sp = sub.add_parser("gen")
    common(sp)
    sp.add_argument("family", choices=["snug-chain", "random-kec", "random-kvc", "random-cap", "chain-cap", "hardness"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--pattern", choices=["minimal", "rich"], default="minimal")
    sp.add_argument("--formula")
    sp.add_argument("--order")
    sp = sub.add_parser("bench")
    common(sp)
    sp.add_argument("--problem", choices=["ecss", "vcss", "cap"], default="ecss")
    sp.add_argument("--n", type=int)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--eps-list")
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        args.argv = argv[1:]
        if args.command.startswith("solve-"):
            return cmd_solve(args, args.command[len("solve-"):])
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "gen":
            return cmd_gen(args)
        return cmd_bench(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except DesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL if exc.code in FAIL_CODES else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
