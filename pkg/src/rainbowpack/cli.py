"""Command line entry point: ``rainbowpack <sample|decompose|verify|bounds|experiment>``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import List, Optional

from . import bounds
from .decomposition import decompose, verify_decomposition
from .graph import (
    BipartiteGraph,
    GraphFormatError,
    complete_bipartite,
    complete_graph,
    load_colored,
    load_graph,
    save_colored,
    save_graph,
)
from .harness import PRESETS, ConfigError, ExperimentConfig, load_config, preset, run_experiment
from .models import (
    sample_colored,
    sample_coupled,
    sample_gnp,
    sample_kout,
    sample_kout_bipartite,
    sample_kout_hat,
    sample_kout_star,
    sample_left_kout,
)
from .verify import has_k_matching, has_perfect_matching, is_connected, is_hamiltonian, is_rainbow

MODELS = ("gnp", "colored", "kout", "kout-star", "kout-hat", "coupled", "left-kout", "kout-bipartite")
PROPERTIES = ("perfect-matching", "k-matching", "hamiltonian", "rainbow", "connected")


def _host(args):
    if args.graph:
        return load_graph(args.graph)
    if args.complete:
        return complete_graph(args.complete)
    if args.complete_bipartite:
        return complete_bipartite(args.complete_bipartite, args.complete_bipartite).to_graph()
    raise SystemExit("error: give --graph, --complete or --complete-bipartite")


def _add_host_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph", help="host graph file")
    g.add_argument("--complete", type=int, metavar="N", help="use K_N as host")
    g.add_argument("--complete-bipartite", type=int, metavar="N", help="use K_{N,N} as host")


def cmd_sample(args) -> int:
    m = args.model
    if m in ("left-kout", "kout-bipartite"):
        if not args.n:
            raise SystemExit("error: --n is required for bipartite models")
        b = (
            sample_left_kout(args.n, args.n, args.k, args.seed)
            if m == "left-kout"
            else sample_kout_bipartite(args.n, args.k, args.seed)
        )
        save_graph(b.to_graph(), args.out)
        print(f"wrote {b!r} to {args.out} (left vertices 0..{b.a - 1})")
        return 0
    g = _host(args)
    if m == "colored":
        c = args.c if args.c else args.k * g.n
        cg = sample_colored(g, args.p, c, args.seed)
        save_colored(cg, args.out)
        print(f"wrote {cg.base!r} with palette {c} to {args.out}")
        return 0
    if m == "gnp":
        h = sample_gnp(g, args.p, args.seed)
    elif m == "kout":
        h = sample_kout(g, args.k, args.seed).result
    elif m == "kout-star":
        h = sample_kout_star(g, args.k, args.seed).result
    elif m == "kout-hat":
        h = sample_kout_hat(g, args.k, args.seed)
    else:
        out = sample_coupled(g, args.k, args.seed)
        h = out.h_star
        print(f"coupling agreed: {out.agreed}")
    save_graph(h, args.out)
    print(f"wrote {h!r} to {args.out}")
    return 0


def cmd_decompose(args) -> int:
    g = _host(args)
    res = decompose(g, args.p, args.k, args.eps, args.seed)
    os.makedirs(args.out, exist_ok=True)
    save_colored(res.h, os.path.join(args.out, "h.txt"))
    for i, part in enumerate(res.parts, 1):
        sub = {e: res.h.color[e] for e in part.edge_list()}
        save_colored(type(res.h)(part, sub, res.h.palette_size), os.path.join(args.out, f"H{i}.txt"))
    rem = {e: res.h.color[e] for e in res.remainder.edge_list()}
    save_colored(type(res.h)(res.remainder, rem, res.h.palette_size), os.path.join(args.out, "H0.txt"))
    diag = dict(res.diagnostics)
    diag["checks"] = {c.name: c.passed for c in verify_decomposition(res)}
    with open(os.path.join(args.out, "diagnostics.json"), "w") as fh:
        json.dump(diag, fh, indent=2, sort_keys=True)
        fh.write("\n")
    status = "ok" if res.success else f"failed: {res.failure_reason}"
    print(f"t_achieved={res.t_achieved} t_target={res.t_target} s={res.s} ({status})")
    return 0


def _bipartite(g, left_size: Optional[int]) -> BipartiteGraph:
    a = g.n // 2 if left_size is None else left_size
    return BipartiteGraph.from_graph(g, a)


def cmd_verify(args) -> int:
    prop = args.property
    if prop == "rainbow":
        cg = load_colored(args.graph)
        v = is_rainbow(cg)
    else:
        g = load_graph(args.graph)
        if prop == "perfect-matching":
            v = has_perfect_matching(_bipartite(g, args.left_size))
        elif prop == "k-matching":
            v = has_k_matching(_bipartite(g, args.left_size), args.k)
        elif prop == "hamiltonian":
            v = is_hamiltonian(g, args.budget, args.seed)
        else:
            v = is_connected(g)
    holds = {True: "true", False: "false", None: "unknown"}[v.holds]
    print(f"{v.name}: {holds} ({v.method})")
    if v.witness is not None:
        print(f"witness: {v.witness}")
    if v.detail:
        print(f"detail: {v.detail}")
    return 0


def cmd_bounds(args) -> int:
    alpha_n = round(args.alpha * args.n)
    r0 = bounds.choose_r0(args.eps, args.k, args.alpha)
    top = min(alpha_n, max(r0, args.rmax or r0))
    print(f"k={args.k} n={args.n} alpha_n={alpha_n} eps={args.eps} r0={r0}")
    print(f"{'r':>3} {'mu_r':>14} {'m_>=r bound':>14} {'E m_>=r':>14}")
    for r in range(1, top + 1):
        mu = bounds.expected_m_r(args.k, args.n, alpha_n, r)
        up = bounds.expected_m_geq_r_upper(args.k, args.n, alpha_n, r)
        ex = bounds.expected_m_geq_r(args.k, args.n, alpha_n, r)
        print(f"{r:>3} {mu:>14.6g} {up:>14.6g} {ex:>14.6g}")
    prof = bounds.multiplicity_profile(args.k, args.n, alpha_n)
    mass = prof.mass(r0)
    print(f"sum_(r<=r0) r*mu_r = {mass:.6g} vs (1-eps)*alpha_n = {(1 - args.eps) * alpha_n:.6g}")
    return 0


def cmd_experiment(args) -> int:
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.config:
        cfg = load_config(args.config)
        if overrides:
            cfg = ExperimentConfig.from_dict({**dataclasses.asdict(cfg), **overrides})
    else:
        cfg = preset(args.preset, **overrides)
    report = run_experiment(cfg, args.out, args.workers)
    print(
        f"{cfg.experiment}: {report['successes']}/{report['trials']} "
        f"{report['property']} (99% CI {report['ci99'][0]:.4f}..{report['ci99'][1]:.4f})"
    )
    print(f"wrote {os.path.join(args.out, 'trials.csv')} and report.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainbowpack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a random graph from one of the models")
    p.add_argument("--model", choices=MODELS, required=True)
    _add_host_args(p)
    p.add_argument("--n", type=int, help="side size for bipartite models")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--c", type=int, help="palette size for 'colored' (default k*n)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decompose", help="sample a colored graph and split it into rainbow parts")
    _add_host_args(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="check a property of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--property", choices=PROPERTIES, required=True)
    p.add_argument("--left-size", type=int, help="bipartite split point (default n/2)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="tabulate expected multiplicity counts")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--rmax", type=int, help="last r to print (default r0)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON config file")
    src.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials", type=int, help="override the trial count")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GraphFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
