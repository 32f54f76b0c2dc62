"""Command-line pipeline: enumerate scenarios, pick protections, report.

Subcommands
  enumerate  rank critical attack scenarios for one grid configuration
  protect    choose protected sets from existing scenario file(s)
  sweep      enumerate + protect in one pass
  oracle     exhaustive three-level reference solve (slow, exact)
  validate   parse and sanity-check a grid file

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 oracle
guard refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .dcopf import solve_dcopf
from .enumeration import (
    StopRule,
    enumerate_cas,
    load_cas_list,
    merge_cas_lists,
    serialize_cas_list,
)
from .errors import GridShieldError, InputError
from .model import GridCase, apply_configuration, parse_grid_file, parse_override_file
from .oracle import brute_force_trilevel
from .protect import enumerate_optimal_protections, optimal_protection
from .report import compute_metrics, report_to_csv, report_to_json


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; our contract says 1."""

    def error(self, message):  # noqa: D102 (argparse API)
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_budgets(text: str) -> list[int]:
    try:
        budgets = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise InputError(f"invalid --budgets value {text!r}: {exc}") from exc
    if not budgets:
        raise InputError("--budgets must name at least one budget")
    if any(b < 0 for b in budgets):
        raise InputError("budgets must be >= 0")
    return budgets


def _parse_max_scenarios(text: str) -> int | None:
    if text.lower() in ("none", "unbounded"):
        return None
    try:
        return int(text)
    except ValueError as exc:
        raise InputError(f"invalid --max-scenarios value {text!r}") from exc


def _load_grid(args) -> GridCase:
    grid = parse_grid_file(args.grid)
    if getattr(args, "config", None):
        grid = apply_configuration(grid, parse_override_file(args.config))
    return grid


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_enumerate(args) -> int:
    grid = _load_grid(args)
    stop = StopRule(
        max_scenarios=args.max_scenarios, min_lost_load_mw=args.min_lost_load
    )
    cas = enumerate_cas(grid, args.zmax, stop, jobs=args.jobs)
    _write(serialize_cas_list(cas), args.out)
    if args.dump_dispatch:
        attack = cas.records[0].components if cas.records else None
        result = solve_dcopf(grid, attack) if attack else solve_dcopf(grid)
        Path(args.dump_dispatch).write_text(result.to_json(), encoding="utf-8")
    return 0


def _run_budgets(cas, args):
    plans, runtimes, alternatives = [], [], []
    for budget in _parse_budgets(args.budgets):
        start = time.perf_counter()
        plan = optimal_protection(cas, budget, tie_break=args.tie_break)
        runtimes.append(time.perf_counter() - start)
        plans.append(plan)
        if args.alternatives > 0:
            ranked = enumerate_optimal_protections(
                cas, budget, limit=args.alternatives + 1, tie_break=args.tie_break
            )
            alternatives.append(ranked[1:])
        else:
            alternatives.append([])
    return plans, runtimes, alternatives


def _emit_report(cas, plans, runtimes, alternatives, args) -> None:
    report = compute_metrics(
        cas, plans, runtimes=None if args.omit_runtime else runtimes
    )
    if args.format == "csv":
        _write(report_to_csv(report), args.out)
    else:
        _write(report_to_json(report, plans, alternatives), args.out)


def cmd_protect(args) -> int:
    lists = [load_cas_list(path) for path in args.cas_files]
    cas = lists[0] if len(lists) == 1 else merge_cas_lists(lists)
    plans, runtimes, alternatives = _run_budgets(cas, args)
    _emit_report(cas, plans, runtimes, alternatives, args)
    return 0


def cmd_sweep(args) -> int:
    grid = _load_grid(args)
    stop = StopRule(
        max_scenarios=args.max_scenarios, min_lost_load_mw=args.min_lost_load
    )
    cas = enumerate_cas(grid, args.zmax, stop, jobs=args.jobs)
    plans, runtimes, alternatives = _run_budgets(cas, args)
    _emit_report(cas, plans, runtimes, alternatives, args)
    return 0


def cmd_oracle(args) -> int:
    grid = _load_grid(args)
    tri = brute_force_trilevel(grid, args.xmax, args.zmax, jobs=args.jobs)
    cas = enumerate_cas(grid, args.zmax, StopRule.unbounded(), jobs=args.jobs)
    protected = set(tri.protected)
    consecutive = 0
    total = 0
    for rec in cas.records:
        hit = bool(protected & set(rec.components.component_keys()))
        total += hit
        if consecutive == rec.rank - 1 and hit:
            consecutive += 1
    doc = {
        "budget": args.xmax,
        "protected": {
            "branches": sorted(c for c, kind in protected if kind == "branch"),
            "generators": sorted(c for c, kind in protected if kind == "generator"),
        },
        "consecutive_excluded": consecutive,
        "total_excluded": total,
        "remaining_worst_case_mw": tri.worst_case_lost_load_mw,
        "worst_attack": {
            "branches": sorted(tri.worst_attack.attacked_branches),
            "generators": sorted(tri.worst_attack.attacked_generators),
        },
    }
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_validate(args) -> int:
    grid = _load_grid(args)  # raises with all diagnostics on problems
    n_att = len(grid.attackable_branch_ids)
    n_ict = len(grid.ict_generator_ids)
    print(
        f"{grid.name} [{grid.configuration_label}]: {len(grid.buses)} buses, "
        f"{len(grid.branches)} branches ({n_att} attackable), "
        f"{len(grid.generators)} generators ({n_ict} remotely controllable), "
        f"total demand {grid.total_demand_mw} MW"
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gridshield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default: all available cores)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    grid_opts = argparse.ArgumentParser(add_help=False)
    grid_opts.add_argument("--grid", required=True, help="grid JSON file")
    grid_opts.add_argument("--config", default=None,
                           help="configuration override JSON file")

    enum_opts = argparse.ArgumentParser(add_help=False)
    enum_opts.add_argument("--zmax", type=int, required=True,
                           help="attack budget (components per scenario)")
    enum_opts.add_argument("--max-scenarios", type=_parse_max_scenarios, default=500,
                           metavar="N|unbounded", help="scenario cap (default 500)")
    enum_opts.add_argument("--min-lost-load", type=float, default=0.0, metavar="MW",
                           help="stop once scenarios fall below this harm")

    prot_opts = argparse.ArgumentParser(add_help=False)
    prot_opts.add_argument("--budgets", required=True,
                           help="comma-separated protection budgets, e.g. 1,2,3,4,5")
    prot_opts.add_argument("--tie-break", choices=("paper", "extended"),
                           default="extended",
                           help="'paper': consecutive exclusions only; 'extended': "
                                "also maximize total exclusions (default)")
    prot_opts.add_argument("--alternatives", type=int, default=0, metavar="N",
                           help="embed up to N next-best plans per budget")
    prot_opts.add_argument("--format", choices=("json", "csv"), default="json",
                           help="report format (default json)")
    prot_opts.add_argument("--omit-runtime", action="store_true",
                           help="write runtime_s as 0.0 for byte-reproducible reports")

    p = sub.add_parser("enumerate", parents=[common, grid_opts, enum_opts],
                       help="rank critical attack scenarios")
    p.add_argument("--dump-dispatch", default=None, metavar="PATH",
                   help="also write the top scenario's dispatch JSON")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("protect", parents=[common, prot_opts],
                       help="choose protected sets from scenario file(s)")
    p.add_argument("cas_files", nargs="+", help="scenario JSON file(s); several are merged")
    p.set_defaults(func=cmd_protect)

    p = sub.add_parser("sweep", parents=[common, grid_opts, enum_opts, prot_opts],
                       help="enumerate scenarios and protect in one pass")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", parents=[common, grid_opts],
                       help="exhaustive three-level reference solve")
    p.add_argument("--xmax", type=int, required=True, help="protection budget")
    p.add_argument("--zmax", type=int, required=True, help="attack budget")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", parents=[grid_opts],
                       help="parse and sanity-check a grid file")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GridShieldError as exc:
        print(f"gridshield: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gridshield: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
