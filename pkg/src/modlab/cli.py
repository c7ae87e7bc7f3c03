"""Command-line interface.

Subcommands: gen, score, optimize, bound, percolate, sample-vertices,
cutdist, blowup, experiment. Exit code 0 on success, 2 on validation
errors. Generators write an edge-list file plus a JSON sidecar recording
parameters, seed, and any planted structure or coordinates.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import generators
from .graph import (
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)
from .modularity import (
    max_relative_modularity,
    modularity_score,
    subset_bipartition_bound,
)
from .percolation import blow_up, cut_distance, percolate, vertex_sample
from .search import (
    exact_modularity,
    greedy_amalgamate,
    local_moving,
    merge_to_k,
    swap_bipartition,
)
from .spectral import spectral_gap, spectral_upper_bound
from .experiments import emit, load_spec, run_experiment

__all__ = ["main"]


def _emit_json(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, frozenset):
        return sorted(value)
    raise TypeError(f"not JSON serializable: {type(value)}")


def _write_sidecar(path: str, payload: dict) -> None:
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, default=_jsonable)
        fh.write("\n")


# -- gen ------------------------------------------------------------------


def _cmd_gen(args) -> int:
    model = args.model
    seed = args.seed
    sidecar: dict = {"model": model, "seed": seed}
    planted = None
    if model == "gnp":
        graph = generators.gnp(args.n, args.p, seed)
        sidecar.update(n=args.n, p=args.p)
    elif model == "gnm":
        graph = generators.gnm(args.n, args.m, seed)
        sidecar.update(n=args.n, m=args.m)
    elif model == "config":
        graph = generators.config_model(args.n, args.r, seed, mode=args.mode)
        sidecar.update(n=args.n, r=args.r, mode=args.mode)
    elif model == "pa":
        trace = generators.preferential_attachment(args.n, args.h, seed)
        graph = trace.merged_graph
        sidecar.update(n=args.n, h=args.h)
    elif model == "spa":
        inst = generators.spa(args.n, args.dim, args.a1, args.a2, args.p, seed)
        graph = inst.graph
        sidecar.update(
            n=args.n, dim=args.dim, a1=args.a1, a2=args.a2, p=args.p,
            positions=inst.positions.tolist(),
        )
    elif model == "hyperbolic":
        inst = generators.hyperbolic(args.n, args.alpha, args.nu, seed, args.poissonised)
        graph = inst.graph
        sidecar.update(
            n=args.n, alpha=args.alpha, nu=args.nu, poissonised=args.poissonised,
            disc_radius=inst.disc_radius,
            radii=inst.radii.tolist(), angles=inst.angles.tolist(),
        )
    elif model == "sbm":
        inst = generators.sbm_balanced(args.n, args.k, args.p, args.q, seed)
        graph = inst.graph
        planted = inst.planted
        sidecar.update(n=args.n, k=args.k, p=args.p, q=args.q,
                       planted=list(inst.planted.assignment))
    elif model == "sbm-general":
        pi = json.loads(args.pi)
        P = json.loads(args.P)
        inst = generators.sbm_general(args.n, pi, P, args.rho, seed)
        graph = inst.graph
        planted = inst.planted
        sidecar.update(n=args.n, pi=pi, P=P, rho=args.rho,
                       planted=list(inst.planted.assignment))
    elif model == "wheels":
        graph = generators.wheels_graph(args.k)
        sidecar.update(k=args.k)
    elif model == "cycle":
        graph = generators.cycle_graph(args.n)
        sidecar.update(n=args.n)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown model {model!r}")
    sidecar.update(vertices=graph.n, edges=graph.m)
    save_edge_list(graph, args.out)
    _write_sidecar(args.out, sidecar)
    if planted is not None and args.planted_out:
        save_partition(planted, args.planted_out)
    print(f"wrote {args.out}: n={graph.n} m={graph.m}")
    return 0


# -- score / optimize / bound ----------------------------------------------


def _cmd_score(args) -> int:
    graph = load_edge_list(args.graph)
    partition = load_partition(args.partition, n=graph.n)
    score = modularity_score(graph, partition)
    _emit_json(
        {
            "q": score.q,
            "edge_contribution": score.edge_contribution,
            "degree_tax": score.degree_tax,
            "parts": partition.k,
        }
    )
    return 0


def _cmd_optimize(args) -> int:
    graph = load_edge_list(args.graph)
    init = load_partition(args.partition, n=graph.n) if args.partition else None
    if args.method == "exact":
        result = exact_modularity(graph, cap=args.cap)
    elif args.method == "swap":
        result = swap_bipartition(graph)
    elif args.method == "local":
        result = local_moving(graph, seed=args.seed, max_sweeps=args.max_sweeps, init=init)
    elif args.method == "merge-k":
        if init is None:
            raise ValueError("merge-k needs --partition with the partition to merge")
        result = merge_to_k(graph, init, args.k, seed=args.seed, repeats=args.repeats)
    elif args.method == "fatten":
        if init is None:
            raise ValueError("fatten needs --partition with the partition to amalgamate")
        result = greedy_amalgamate(graph, args.eta, init)
    else:  # pragma: no cover
        raise ValueError(f"unknown method {args.method!r}")
    if args.out:
        save_partition(result.partition, args.out)
    _emit_json(
        {
            "method": result.method,
            "q": result.score.q,
            "edge_contribution": result.score.edge_contribution,
            "degree_tax": result.score.degree_tax,
            "parts": result.partition.k,
            "evaluations": result.evaluations,
        }
    )
    return 0


def _cmd_bound(args) -> int:
    graph = load_edge_list(args.graph)
    if args.kind == "spectral":
        if args.subgraph:
            sub = load_edge_list(args.subgraph)
            value = spectral_upper_bound(graph, sub, cap=args.cap)
        else:
            value = spectral_gap(graph, cap=args.cap).gap
        payload = {"bound": value, "kind": "spectral"}
    elif args.kind == "relmod":
        result = max_relative_modularity(graph, cap=args.cap)
        payload = {"bound": result.value, "kind": "relmod", "subset": sorted(result.subset)}
    elif args.kind == "subset4":
        payload = {"bound": subset_bipartition_bound(graph, cap=args.cap), "kind": "subset4"}
    else:  # pragma: no cover
        raise ValueError(f"unknown bound {args.kind!r}")
    _emit_json(payload)
    return 0


# -- percolation tools -------------------------------------------------------


def _cmd_percolate(args) -> int:
    graph = load_edge_list(args.graph)
    observed = percolate(graph, args.p, args.seed)
    save_edge_list(observed, args.out)
    print(f"wrote {args.out}: kept {observed.m} of {graph.m} edges")
    return 0


def _cmd_sample_vertices(args) -> int:
    graph = load_edge_list(args.graph)
    sample = vertex_sample(graph, args.k, args.seed)
    save_edge_list(sample.graph, args.out)
    _write_sidecar(args.out, {"mapping": list(sample.vertices), "seed": args.seed})
    print(f"wrote {args.out}: induced subgraph on {args.k} vertices")
    return 0


def _cmd_cutdist(args) -> int:
    a = load_edge_list(args.graph)
    b = load_edge_list(args.other)
    _emit_json({"cut_distance": cut_distance(a, b, cap=args.cap)})
    return 0


def _cmd_blowup(args) -> int:
    graph = load_edge_list(args.graph)
    blown = blow_up(graph, args.b)
    save_edge_list(blown, args.out)
    print(f"wrote {args.out}: n={blown.n} m={blown.m}")
    return 0


def _cmd_experiment(args) -> int:
    spec = load_spec(args.spec)
    records = run_experiment(spec)
    out = args.out or spec.output
    if not out:
        raise ValueError("no output path: pass --out or set 'output' in the spec")
    emit(records, args.format, out)
    print(f"wrote {out}: {len(records)} rows")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modlab",
        description="Graph modularity laboratory: generators, scores, searches, bounds, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph and write an edge list + JSON sidecar")
    gen_sub = gen.add_subparsers(dest="model", required=True)

    def add_gen(name, **arguments):
        sp = gen_sub.add_parser(name)
        for flag, kwargs in arguments.items():
            sp.add_argument(flag, **kwargs)
        sp.add_argument("--seed", type=int, required=name not in ("wheels", "cycle"), default=0)
        sp.add_argument("--out", required=True)
        sp.add_argument("--planted-out", default=None, help="also write the planted partition")
        sp.set_defaults(func=_cmd_gen)
        return sp

    add_gen("gnp", **{"--n": dict(type=int, required=True), "--p": dict(type=float, required=True)})
    add_gen("gnm", **{"--n": dict(type=int, required=True), "--m": dict(type=int, required=True)})
    config = add_gen("config", **{"--n": dict(type=int, required=True), "--r": dict(type=int, required=True)})
    config.add_argument("--mode", choices=("multigraph", "erased", "rejection"), default="multigraph")
    add_gen("pa", **{"--n": dict(type=int, required=True), "--h": dict(type=int, required=True)})
    add_gen(
        "spa",
        **{
            "--n": dict(type=int, required=True),
            "--dim": dict(type=int, default=2),
            "--a1": dict(type=float, required=True),
            "--a2": dict(type=float, required=True),
            "--p": dict(type=float, required=True),
        },
    )
    hyp = add_gen(
        "hyperbolic",
        **{
            "--n": dict(type=int, required=True),
            "--alpha": dict(type=float, required=True),
            "--nu": dict(type=float, default=1.0),
        },
    )
    hyp.add_argument("--poissonised", action="store_true")
    add_gen(
        "sbm",
        **{
            "--n": dict(type=int, required=True),
            "--k": dict(type=int, required=True),
            "--p": dict(type=float, required=True),
            "--q": dict(type=float, required=True),
        },
    )
    add_gen(
        "sbm-general",
        **{
            "--n": dict(type=int, required=True),
            "--pi": dict(required=True, help="JSON list, e.g. [0.3,0.3,0.4]"),
            "--P": dict(required=True, help="JSON matrix of probabilities"),
            "--rho": dict(type=float, default=1.0),
        },
    )
    add_gen("wheels", **{"--k": dict(type=int, required=True)})
    add_gen("cycle", **{"--n": dict(type=int, required=True)})

    score = sub.add_parser("score", help="modularity score of a partition on a graph")
    score.add_argument("--graph", required=True)
    score.add_argument("--partition", required=True)
    score.set_defaults(func=_cmd_score)

    optimize = sub.add_parser("optimize", help="search for a high-modularity partition")
    optimize.add_argument("--graph", required=True)
    optimize.add_argument("--method", choices=("exact", "swap", "local", "merge-k", "fatten"), required=True)
    optimize.add_argument("--partition", help="input partition (required for merge-k/fatten, optional init for local)")
    optimize.add_argument("--k", type=int, default=2, help="target part count for merge-k")
    optimize.add_argument("--eta", type=float, default=0.05, help="volume floor fraction for fatten")
    optimize.add_argument("--seed", type=int, default=0)
    optimize.add_argument("--repeats", type=int, default=64)
    optimize.add_argument("--max-sweeps", type=int, default=100)
    optimize.add_argument("--cap", type=int, default=12, help="vertex cap for exact enumeration")
    optimize.add_argument("--out", help="write the found partition here")
    optimize.set_defaults(func=_cmd_optimize)

    bound = sub.add_parser("bound", help="certified upper bounds on modularity")
    bound.add_argument("--graph", required=True)
    bound.add_argument("--kind", choices=("spectral", "relmod", "subset4"), required=True)
    bound.add_argument("--subgraph", help="edge list of a subgraph (spectral bound)")
    bound.add_argument("--cap", type=int, default=None)
    bound.set_defaults(func=_cmd_bound)

    perc = sub.add_parser("percolate", help="keep each edge independently with probability p")
    perc.add_argument("--graph", required=True)
    perc.add_argument("--p", type=float, required=True)
    perc.add_argument("--seed", type=int, required=True)
    perc.add_argument("--out", required=True)
    perc.set_defaults(func=_cmd_percolate)

    samp = sub.add_parser("sample-vertices", help="induced subgraph on a uniform k-subset")
    samp.add_argument("--graph", required=True)
    samp.add_argument("--k", type=int, required=True)
    samp.add_argument("--seed", type=int, required=True)
    samp.add_argument("--out", required=True)
    samp.set_defaults(func=_cmd_sample_vertices)

    cut = sub.add_parser("cutdist", help="exact cut distance between two graphs")
    cut.add_argument("--graph", required=True)
    cut.add_argument("--other", required=True)
    cut.add_argument("--cap", type=int, default=12)
    cut.set_defaults(func=_cmd_cutdist)

    blow = sub.add_parser("blowup", help="replace each vertex by b copies")
    blow.add_argument("--graph", required=True)
    blow.add_argument("--b", type=int, required=True)
    blow.add_argument("--out", required=True)
    blow.set_defaults(func=_cmd_blowup)

    exp = sub.add_parser("experiment", help="run a registered experiment from a JSON spec")
    exp.add_argument("--spec", required=True)
    exp.add_argument("--out", default=None)
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.set_defaults(func=_cmd_experiment)

    return parser


_DEFAULT_CAPS = {"spectral": 2000, "relmod": 20, "subset4": 20}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "bound" and args.cap is None:
        args.cap = _DEFAULT_CAPS[args.kind]
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
