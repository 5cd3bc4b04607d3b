"""Command line interface.

Exit codes: 0 yes/sat, 1 no/unsat, 2 usage or input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings

from . import compiler
from .formula import ParseError, dumps_dag, loads_dag, parse, tree_size, to_text
from .gnn import accepted, load_gnn, run_matrix, save_gnn
from .graph import PointedGraph, check, evaluate, graph_to_json, load_graph
from .ilp import DEFAULT_NODE_LIMIT
from .sat import BudgetExceeded, SolverMode, sat, valid
from .translate import NonBooleanStateWarning, tune
from .verify import PROBLEMS, translate_checked

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

# Above this unfolded size, translate writes the shared DAG as JSON.
TEXT_LIMIT = 20000


class UsageError(Exception):
    pass


def read_formula(arg: str):
    """A formula given inline, or ``@path`` for a text file or a DAG JSON file."""
    text = arg
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise UsageError(f"cannot read formula file: {err}") from err
        if text.lstrip().startswith("{"):
            return loads_dag(text)
    try:
        return parse(text)
    except ParseError as err:
        raise UsageError(f"formula: {err}") from err


def _load(loader, path, what):
    try:
        return loader(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot load {what} {path}: {err}") from err


def _budget(args) -> dict:
    return {"ilp_node_limit": args.budget}


def _stats(args, stats) -> None:
    if args.stats and stats is not None:
        print(json.dumps(stats.as_dict(), sort_keys=True), file=sys.stderr)


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _vertex(graph, name):
    for v in graph.vertices:
        if str(v) == name:
            return v
    raise UsageError(f"no vertex {name!r}")


def cmd_check(args) -> int:
    g = _load(load_graph, args.graph, "graph")
    f = read_formula(args.formula)
    point = None
    if isinstance(g, PointedGraph):
        g, point = g.graph, g.point
    if args.vertex is not None:
        point = _vertex(g, args.vertex)
    if point is not None:
        ok = check(g, point, f)
        print("true" if ok else "false")
        return EXIT_YES if ok else EXIT_NO
    truth = evaluate(g, f)
    for v, t in zip(g.vertices, truth):
        print(f"{v}\t{int(t)}")
    return EXIT_YES if truth.all() else EXIT_NO


def _solve(args, f):
    mode = SolverMode.parse(args.mode)
    return sat(f, mode, **_budget(args))


def cmd_sat(args) -> int:
    f = read_formula(args.formula)
    result = _solve(args, f)
    _stats(args, result.stats)
    print(result.verdict.value)
    if result.sat:
        data = json.dumps(graph_to_json(result.witness), indent=2)
        if args.witness:
            _write(args.witness, data)
        elif args.show_witness:
            print(data)
        return EXIT_YES
    return EXIT_NO


def cmd_valid(args) -> int:
    f = read_formula(args.formula)
    ok = valid(f, SolverMode.parse(args.mode), **_budget(args))
    print("valid" if ok else "not valid")
    return EXIT_YES if ok else EXIT_NO


def cmd_compile(args) -> int:
    f = read_formula(args.formula)
    try:
        net = compiler.compile_cnf(f) if args.cnf else compiler.compile(f)
    except compiler.CompileBudgetExceeded as err:
        print(f"inconclusive: {err}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    save_gnn(net, args.output)
    print(f"dimension {net.dimension}, {len(net.layers)} layers")
    return EXIT_YES


def cmd_translate(args) -> int:
    net = _load(load_gnn, args.gnn, "net")
    tr, caveat = translate_checked(net)
    if caveat:
        print("warning: non-integer weights; the formula assumes 0/1 states",
              file=sys.stderr)
    fmt = args.format
    if fmt == "auto":
        fmt = "text" if tree_size(tr) <= TEXT_LIMIT else "dag"
    _write(args.output, to_text(tr) if fmt == "text" else dumps_dag(tr))
    return EXIT_YES


def cmd_run(args) -> int:
    net = _load(load_gnn, args.gnn, "net")
    g = _load(load_graph, args.graph, "graph")
    if isinstance(g, PointedGraph):
        g = g.graph
    x = run_matrix(g, net)
    acc = accepted(g, net)
    print("vertex\t" + "\t".join(f"x{i}" for i in range(net.dimension)) + "\taccept")
    for i, v in enumerate(g.vertices):
        row = "\t".join(str(c) for c in x[i])
        print(f"{v}\t{row}\t{int(acc[i])}")
    return EXIT_YES


def cmd_verify(args) -> int:
    net = _load(load_gnn, args.gnn, "net")
    f = read_formula(args.formula)
    _, caveat = translate_checked(net)
    if caveat:
        print("warning: non-integer weights; verdict assumes 0/1 states", file=sys.stderr)
    mode = SolverMode.parse(args.mode)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonBooleanStateWarning)
        out = PROBLEMS[args.problem](net, f, mode, **_budget(args))
    if args.problem == "p4":
        _stats(args, out.stats)
        print("nonempty" if out.sat else "empty")
        if out.sat:
            print(json.dumps(graph_to_json(out.witness), indent=2))
        return EXIT_YES if out.sat else EXIT_NO
    print("true" if out else "false")
    return EXIT_YES if out else EXIT_NO


def cmd_tune(args) -> int:
    net = _load(load_gnn, args.gnn, "net")
    f = read_formula(args.formula)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonBooleanStateWarning)
        net2 = tune(net, f)
    save_gnn(net2, args.output)
    print(f"dimension {net2.dimension}, {len(net2.layers)} layers")
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    def flags(suppress: bool) -> argparse.ArgumentParser:
        # Accepted before or after the command; the subcommand copy only
        # overrides when given.
        def d(x):
            return argparse.SUPPRESS if suppress else x
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--stats", action="store_true", default=d(False),
                       help="solver statistics on stderr")
        c.add_argument("--budget", type=int, default=d(DEFAULT_NODE_LIMIT),
                       help="branch-and-bound node limit per ILP call")
        c.add_argument("--seed", type=int, default=d(0), help="seed for any randomness")
        return c

    common = flags(True)
    p = argparse.ArgumentParser(prog="ksharp", parents=[flags(False)],
                                description="K# logic and graph neural networks")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "model check a formula on a graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--vertex")

    sp = add("sat", cmd_sat, "decide satisfiability")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--mode", default="general", help="general | degree:K | auto")
    sp.add_argument("--witness", help="write the witness graph JSON here")
    sp.add_argument("--show-witness", action="store_true")

    sp = add("valid", cmd_valid, "decide validity")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--mode", default="general")

    sp = add("compile", cmd_compile, "formula to GNN")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--cnf", action="store_true", help="layers bounded by modal depth")
    sp.add_argument("-o", "--output", required=True)

    sp = add("translate", cmd_translate, "GNN to formula")
    sp.add_argument("--gnn", required=True)
    sp.add_argument("-o", "--output")
    sp.add_argument("--format", choices=("auto", "text", "dag"), default="auto")

    sp = add("run", cmd_run, "run a GNN on a graph")
    sp.add_argument("--gnn", required=True)
    sp.add_argument("--graph", required=True)

    sp = add("verify", cmd_verify, "P1-P4 verification")
    sp.add_argument("--mode", dest="problem", required=True, choices=sorted(PROBLEMS))
    sp.add_argument("--solver", dest="mode", default="general")
    sp.add_argument("--gnn", required=True)
    sp.add_argument("--formula", required=True)

    sp = add("tune", cmd_tune, "restrict a GNN to models of a formula")
    sp.add_argument("--gnn", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("-o", "--output", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_YES
    random.seed(args.seed)
    try:
        return args.fn(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as err:
        print(f"inconclusive: {err}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
