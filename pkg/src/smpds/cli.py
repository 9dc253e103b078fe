"""Command-line driver.

Exit codes: 0 when no run satisfies the formula, 2 when one does, 1 for
usage, parse or internal errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings

from . import bench as bench_mod
from .dot import emit_dot
from .generate import GenParams, gen_random
from .headgraph import explore_heads, has_accepting_run, has_accepting_run_saturation, model_check
from .io import ModelSyntaxError, format_model, parse_model
from .ltl import LTLSyntaxError, ltl_to_buchi, parse_buchi, parse_ltl, to_nnf
from .model import Configuration, ModelError, normalize
from .oracle import bounded_lasso, cross_check
from .presets import FORMULAS
from .product import build_product, initial_product_config

EXIT_NONE, EXIT_ERROR, EXIT_ACCEPTING = 0, 1, 2
ENGINES = {"explore": has_accepting_run, "saturation": has_accepting_run_saturation}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as a verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _property(args, atoms):
    """(formula, automaton) from --ltl / --ba / --preset; exactly one is set."""
    given = [x for x in (args.ltl, args.ba, args.preset) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --ltl, --ba, --preset")
    if args.ba is not None:
        return None, parse_buchi(_read(args.ba))
    text = FORMULAS[args.preset] if args.preset is not None else args.ltl
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = parse_ltl(text, atoms)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return f, None


def _stats_line(stats) -> str:
    return "stats " + " ".join(f"{k}={v}" for k, v in stats.items())


def _add_property_args(p):
    p.add_argument("--ltl", help="LTL formula")
    p.add_argument("--ba", help="Büchi automaton file")
    p.add_argument("--preset", choices=sorted(FORMULAS), help="shipped formula")


def cmd_check(args) -> int:
    bundle = parse_model(_read(args.model))
    f, ba = _property(args, bundle.atoms)
    v = model_check(bundle.model, bundle.theta0, bundle.c0, f, ba, ENGINES[args.engine])
    print(v.answer)
    if v.accepting:
        print(f"witness head: control={v.witness.control[0]} top={v.witness.top}")
        print("run: " + " ".join(v.trace))
    print(_stats_line(v.stats))
    return EXIT_ACCEPTING if v.accepting else EXIT_NONE


def _product(bundle, f, ba):
    norm = normalize(bundle.model)
    theta0 = bundle.theta0 | norm.always_on
    if ba is None:
        ba = ltl_to_buchi(to_nnf(f))
    product, prodmap, _ = build_product(norm, ba, theta0)
    start = initial_product_config(Configuration(bundle.c0.control, bundle.c0.stack, theta0), ba, prodmap)
    return product, start


def cmd_graph(args) -> int:
    bundle = parse_model(_read(args.model))
    f, ba = _property(args, bundle.atoms)
    product, start = _product(bundle, f, ba)
    ex = explore_heads(product, start)
    _write(args.dot, emit_dot(ex.graph, product, (start.phase,)))
    v = has_accepting_run(product, start)
    print(v.answer, file=sys.stderr)
    return EXIT_ACCEPTING if v.accepting else EXIT_NONE


def cmd_gen(args) -> int:
    params = GenParams(n_controls=args.controls, n_symbols=args.symbols, n_normal=args.s1,
                       n_modifying=args.s2, p_accepting=args.p_accepting, seed=args.seed,
                       n_atoms=args.atoms)
    _write(args.output, format_model(gen_random(params)))
    return 0


def cmd_bench(args) -> int:
    spec = bench_mod.load_campaign(_read(args.campaign))
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    try:
        out.write(",".join(bench_mod.CSV_HEADER) + "\n")

        def emit(row):
            out.write(",".join(str(row[k]) for k in bench_mod.CSV_HEADER) + "\n")
            out.flush()

        rows, failures = bench_mod.run_campaign(spec, emit)
    finally:
        if out is not sys.stdout:
            out.close()
    for inst, text in failures:
        path = f"{args.failures}/failure-{spec['seed']}-{inst.index}.smpds"
        _write(path, text)
        print(f"disagreement on instance {inst.index}; artifact written to {path}", file=sys.stderr)
    agree = sum(r["agree"] for r in rows)
    print(f"instances={len(rows)} agree={agree}", file=sys.stderr)
    return EXIT_ERROR if failures else 0


def cmd_oracle(args) -> int:
    bundle = parse_model(_read(args.model))
    f, ba = _property(args, bundle.atoms)
    report = cross_check(bundle.model, bundle.theta0, bundle.c0, f, ba)
    product, start = _product(bundle, f, ba)
    lasso = bounded_lasso(product, start, args.depth, args.stack)
    print(f"direct: {report.direct.answer}")
    print(f"translated: {report.translated.answer}")
    print(f"bounded lasso (depth {args.depth}, stack {args.stack}): {'found' if lasso else 'not found'}")
    consistent = report.agree and (lasso is None or report.direct.accepting)
    print(f"consistent: {'yes' if consistent else 'NO'}")
    print(f"stats direct_ms={report.direct_ms} translate_ms={report.translate_ms} check_ms={report.check_ms}")
    if not consistent:
        return EXIT_ERROR
    return EXIT_ACCEPTING if report.direct.accepting else EXIT_NONE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smpds", description="LTL model checking of self-modifying pushdown systems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="does some run satisfy the formula?")
    p.add_argument("model")
    _add_property_args(p)
    p.add_argument("--engine", choices=sorted(ENGINES), default="explore")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("graph", help="write the head graph of the product as DOT")
    p.add_argument("model")
    _add_property_args(p)
    p.add_argument("--dot", required=True, help="output file, - for stdout")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("gen", help="write a random model")
    p.add_argument("--s1", type=int, required=True, help="normal rules")
    p.add_argument("--s2", type=int, required=True, help="modifying rules")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--controls", type=int, default=3)
    p.add_argument("--symbols", type=int, default=2)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--p-accepting", type=float, default=0.3)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a cross-check campaign and print timing CSV")
    p.add_argument("--campaign", required=True, help="campaign JSON file")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--failures", default=".", help="directory for disagreement artifacts")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="compare against the translation and a bounded lasso search")
    p.add_argument("model")
    _add_property_args(p)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--stack", type=int, default=6)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelSyntaxError, LTLSyntaxError, ModelError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
