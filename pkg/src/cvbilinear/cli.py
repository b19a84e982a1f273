"""Command-line entry point.

Exit codes: 0 on success, 1 when a verification criterion fails, 2 on an
invalid configuration or usage error.
"""
import argparse
import csv
import sys

from .complexity import complexity_table
from .experiments.config import ConfigError, dumps_config, load_config
from .experiments.runner import run_scenario
from .experiments.scenarios import BUILTIN_SCENARIOS, get_scenario
from .experiments.trace import format_summary, write_csv
from .experiments.verification import resolve, verify

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _load(args):
    if args.config is not None:
        return load_config(args.config)
    return get_scenario(args.scenario)


def cmd_run(args):
    try:
        cfg = _load(args)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.runs is not None:
            cfg = cfg.with_runs(args.runs)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_scenario(cfg)
    write_csv(result.trace, args.out)
    print(f"{cfg.name}: {cfg.runs} runs, horizon {cfg.horizon}, seed {cfg.seed} -> {args.out}")
    print(format_summary(result.summary))
    return EXIT_OK


def cmd_list(args):
    if args.show is not None:
        try:
            print(dumps_config(get_scenario(args.show)), end="")
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    for name, cfg in BUILTIN_SCENARIOS.items():
        filters = ", ".join(f.label for f in cfg.filters)
        print(f"{name:<26} {cfg.workload:<14} L={cfg.L:<3} M={cfg.M:<2} "
              f"horizon={cfg.horizon:<6} runs={cfg.runs:<3} [{filters}]")
    return EXIT_OK


def cmd_verify(args):
    try:
        selection = resolve(args.filter) if args.filter else None
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG

    def report(r):
        print(r.line(), flush=True)
        if r.details and args.verbose:
            print(f"       {r.details}", flush=True)

    results = verify(selection, args.seed, report)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_complexity(args):
    if args.lmax < 1 or args.mmax < 1:
        print("error: --lmax and --mmax must be positive", file=sys.stderr)
        return EXIT_CONFIG
    rows = complexity_table(args.lmax, args.mmax)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("L", "M", "variant", "closed_form", "instrumented", "match"))
        for L, M, variant, closed, counted in rows:
            w.writerow((L, M, variant, closed, counted, int(closed == counted)))
    mismatches = sum(r[3] != r[4] for r in rows)
    print(f"{len(rows)} rows, {mismatches} mismatches -> {args.out}")
    return EXIT_FAILED if mismatches else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cvbilinear",
                                description="Complex-valued bilinear filter experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write its convergence trace as CSV")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="TOML scenario file")
    src.add_argument("--scenario", help="builtin scenario name")
    r.add_argument("--out", required=True, help="output CSV path")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--runs", type=int, help="override the number of Monte-Carlo runs")
    r.set_defaults(func=cmd_run)

    ls = sub.add_parser("list-scenarios", help="list builtin scenarios")
    ls.add_argument("--show", metavar="NAME", help="print one scenario as TOML")
    ls.set_defaults(func=cmd_list)

    v = sub.add_parser("verify", help="run the acceptance criteria")
    v.add_argument("--filter", action="append",
                   help="criterion number or key substring (repeatable)")
    v.add_argument("--seed", type=int, help="override every criterion's seed")
    v.add_argument("-v", "--verbose", action="store_true", help="print diagnostic details")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("complexity", help="closed-form vs counted multiplications per step")
    c.add_argument("--lmax", type=int, required=True)
    c.add_argument("--mmax", type=int, required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_complexity)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
