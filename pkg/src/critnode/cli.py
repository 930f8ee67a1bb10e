"""Command-line entry point.

Global options go before the subcommand::

    critnode --seed 7 gen --n 12 > inst.json
    critnode pipeline inst.json --k 2
    critnode --out runs/ bench --sizes 8 10 --count 5

Instance arguments accept a path or ``-`` for stdin. Exit status is 0 on
success, 2 for invalid input, 3 for a backend failure and 4 when a
budget or retry cap is exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .bench import generated_items, run_bench, run_pipeline
from .cascade import simulate
from .cnf import build_m, emit_dimacs, var_map_json
from .errors import CritnodeError, InvalidInputError
from .generate import GenConfig, generate_instance
from .graph import InterdependentSystem
from .heuristics import HEURISTICS
from .ilp import build_ilp, emit_lp, ilp_backend, solve_ilp
from .oracle import DEFAULT_BUDGET, oracle_solve
from .sat import compute_lmax, sat_backend

log = logging.getLogger("critnode")


def _load(path: str) -> InterdependentSystem:
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    return InterdependentSystem.from_json(text)


def _nodes(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected node ids like 1,3,5; got {text!r}")


def _emit(args, text: str, name: str | None = None) -> None:
    """Write to ``--out`` (a file, or ``dir/name`` when it is a directory) or stdout."""
    if not args.out:
        sys.stdout.write(text)
        return
    dest = args.out
    if name and (os.path.isdir(dest) or dest.endswith(os.sep)):
        os.makedirs(dest, exist_ok=True)
        dest = os.path.join(dest, name)
    with open(dest, "w") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sat(args):
    return sat_backend(args.backend or args.backend_sat)


def _ilp(args):
    return ilp_backend(args.backend or args.backend_ilp)


# -- subcommands -----------------------------------------------------------------------

def cmd_gen(args):
    seed = args.seed if args.seed is not None else 0
    cfg = GenConfig(n=args.n, beta_a=args.beta_a, beta_b=args.beta_b, seed=seed,
                    max_retries=args.max_retries, swap_prob=args.swap_prob)
    _emit(args, generate_instance(cfg).to_json(), "instance.json")


def cmd_simulate(args):
    trace = simulate(_load(args.instance), args.attack)
    _emit(args, _json(trace.to_dict()))


def cmd_oracle(args):
    res = oracle_solve(_load(args.instance), args.k, budget=args.budget, workers=args.workers)
    _emit(args, _json(res.to_dict()))


def cmd_lmax(args):
    res = compute_lmax(_load(args.instance), args.k, _sat(args))
    _emit(args, _json(res.to_dict()))


def cmd_critical(args):
    system = _load(args.instance)
    l_max = args.lmax
    if l_max is None:
        l_max = compute_lmax(system, args.k, sat_backend(args.backend_sat)).l_max
    res = solve_ilp(build_ilp(system, args.k, l_max), system, _ilp(args))
    _emit(args, _json({"l_max": l_max, **res.to_dict()}))


def cmd_heuristic(args):
    res = HEURISTICS[args.algo](_load(args.instance), args.k)
    _emit(args, _json(res.to_dict()))


def cmd_pipeline(args):
    rep = run_pipeline(_load(args.instance), args.k, args.backend_sat, args.backend_ilp)
    _emit(args, _json(rep.to_dict()))


def cmd_bench(args):
    seed = args.seed if args.seed is not None else 0
    items = generated_items(args.sizes, args.count, seed=seed, k=args.k)
    res = run_bench(items, args.backend_sat, args.backend_ilp, workers=args.workers)
    timings = not args.no_timings
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for name, text in (("bench.csv", res.rows_csv(timings)), ("summary.csv", res.summary_csv()),
                           ("histogram.json", res.histogram_json())):
            with open(os.path.join(args.out, name), "w") as fh:
                fh.write(text)
    else:
        sys.stdout.write(res.rows_csv(timings))
    failed = sum(1 for r in res.rows if r["error"])
    if failed:
        log.warning("%d of %d instances failed", failed, len(res.rows))


def cmd_export_cnf(args):
    formula = build_m(_load(args.instance), args.k, args.l)
    _emit(args, emit_dimacs(formula, comments=not args.no_comments), "model.cnf")
    if args.varmap:
        with open(args.varmap, "w") as fh:
            fh.write(var_map_json(formula))


def cmd_export_lp(args):
    system = _load(args.instance)
    l_max = args.lmax
    if l_max is None:
        l_max = compute_lmax(system, args.k, sat_backend(args.backend_sat)).l_max
    _emit(args, emit_lp(build_ilp(system, args.k, l_max)), "model.lp")


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critnode", description="Critical nodes of interdependent networks.",
                                allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=int, default=None, help="RNG seed for gen and bench (default 0)")
    p.add_argument("--backend-sat", default="builtin", help="builtin | dimacs-exec:<path>")
    p.add_argument("--backend-ilp", default="builtin", help="builtin | highs | lp-exec:<path>")
    p.add_argument("--out", default=None, help="output file, or directory for bench")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help, instance=True, k=False):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn, backend=None)
        if instance:
            sp.add_argument("instance", help="instance JSON path or - for stdin")
        if k:
            sp.add_argument("--k", type=int, required=True, help="attack budget")
        return sp

    sp = add("gen", cmd_gen, "generate a two-layer instance", instance=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta-a", type=float, default=3.0)
    sp.add_argument("--beta-b", type=float, default=2.2)
    sp.add_argument("--max-retries", type=int, default=100)
    sp.add_argument("--swap-prob", type=float, default=0.1)

    sp = add("simulate", cmd_simulate, "run the cascade for one attack")
    sp.add_argument("--attack", type=_nodes, required=True, help="comma-separated node ids")

    sp = add("oracle", cmd_oracle, "exhaustive optimum", k=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("lmax", cmd_lmax, "maximum failure stage over k-attacks", k=True)
    sp.add_argument("--backend", help="overrides --backend-sat")

    sp = add("critical", cmd_critical, "optimal attack set", k=True)
    sp.add_argument("--lmax", type=int, default=None, help="skip the stage computation")
    sp.add_argument("--backend", help="overrides --backend-ilp")

    sp = add("heuristic", cmd_heuristic, "greedy or articulation-first attack", k=True)
    sp.add_argument("--algo", choices=sorted(HEURISTICS), default="greedy")

    add("pipeline", cmd_pipeline, "stage computation then optimal attack", k=True)

    sp = add("bench", cmd_bench, "exact vs heuristic batch over generated instances", instance=False)
    sp.add_argument("--sizes", type=int, nargs="+", default=[10])
    sp.add_argument("--count", type=int, default=10, help="instances per size")
    sp.add_argument("--k", type=int, default=None, help="default: n/5 rounded")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-timings", action="store_true", help="blank timing columns")

    sp = add("export-cnf", cmd_export_cnf, "DIMACS for one stage check", k=True)
    sp.add_argument("--l", type=int, required=True, help="stage")
    sp.add_argument("--varmap", default=None, help="write the variable map JSON here")
    sp.add_argument("--no-comments", action="store_true")

    sp = add("export-lp", cmd_export_lp, "LP model for the optimal attack", k=True)
    sp.add_argument("--lmax", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CritnodeError as exc:
        print(f"critnode: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
