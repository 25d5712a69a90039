"""Command-line interface.

Subcommands:
  graph    write a network as a plain-text edge list
  rates    print the convergence-rate constants for a graph + sketch
  run      execute an experiment config (JSON), write CSV traces
  compare  run the three standard head-to-head studies
"""

from __future__ import annotations

import argparse
import sys

from . import theory
from .harness import FMT, ExperimentConfig, run_comparisons, run_experiment
from .solver import SketchDistribution, ac_system
from .topology import make_cycle, make_grid2d, make_rgg, read_edge_list, write_edge_list


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hbgossip", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("graph", help="generate a network edge-list file")
    pg.add_argument("--family", required=True, choices=["cycle", "grid", "rgg"])
    pg.add_argument("--n", type=int, default=0)
    pg.add_argument("--rows", type=int, default=0)
    pg.add_argument("--cols", type=int, default=0)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", default=None)

    pr = sub.add_parser("rates", help="print rate constants for a graph")
    pr.add_argument("--graph", required=True)
    pr.add_argument("--sketch", choices=["rk", "block"], default="rk")
    pr.add_argument("--tau", type=int, default=2)
    pr.add_argument("--mc-samples", type=int, default=theory.DEFAULT_MC_SAMPLES)
    pr.add_argument("--omega", type=float, default=1.0)
    pr.add_argument("--beta", type=float, default=0.0)

    pn = sub.add_parser("run", help="execute an experiment config")
    pn.add_argument("--config", required=True)

    pc = sub.add_parser("compare", help="run the standard comparison studies")
    pc.add_argument("--config", required=True)
    return p


def _cmd_graph(args) -> int:
    if args.family == "cycle":
        g = make_cycle(args.n)
    elif args.family == "grid":
        g = make_grid2d(args.rows, args.cols)
    else:
        g = make_rgg(args.n, args.seed)
    if args.out is None:
        sys.stdout.write(f"{g.n} {g.m}\n")
        for i, j in g.edges:
            sys.stdout.write(f"{i} {j}\n")
    else:
        write_edge_list(g, args.out)
    return 0


def _cmd_rates(args) -> int:
    g = read_edge_list(args.graph)
    sys_ = ac_system(g)
    if args.sketch == "rk":
        dist = SketchDistribution.uniform_rows(g.m)
    else:
        dist = SketchDistribution.uniform_block(g.m, args.tau)
    report = theory.rate_report(
        sys_, dist, omega=args.omega, beta=args.beta, mc_samples=args.mc_samples
    )
    for key, val in report.as_items():
        if isinstance(val, bool):
            print(f"{key} = {str(val).lower()}")
        else:
            print(f"{key} = {FMT % val}")
    return 0


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    run_experiment(cfg)
    return 0


def _cmd_compare(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    run_comparisons(cfg)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "graph": _cmd_graph,
        "rates": _cmd_rates,
        "run": _cmd_run,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
