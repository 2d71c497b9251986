"""Command-line driver: ``meshlab <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 runtime domain error
(no route, all routes depleted, infeasible layout).
"""

import argparse
import os
import sys

from meshlab.energy import fresh_batteries
from meshlab.engine import ALL_ROUTES_DEPLETED, compare_placements
from meshlab.exceptions import (
    AllRoutesDepleted,
    MissingLayout,
    NoFeasibleLayout,
    NoRoute,
    ParseError,
    ValidationError,
)
from meshlab.report import (
    export_report,
    render_comparison,
    render_energy_map,
    render_neighbor_table,
    render_published_audit,
    render_route_summary,
    render_route_table,
)
from meshlab.routing import discover_routes
from meshlab.scenario import ScenarioKind, load_scenario, random_scenario
from meshlab.topology import (
    CENTER_ANCHOR,
    DEFAULT_AREA_SIDE,
    DEFAULT_RADIO_RANGE,
    build_neighbor_table,
    fit_layout,
    read_constraints_csv,
)

OUT_ENV = "MESHLAB_OUT"
DEFAULT_SEED = 42
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _point(text):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return (x, y)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def build_parser():
    parser = _Parser(prog="meshlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    scenario_help = (
        "scenario file, a built-in alias ("
        + ", ".join(k.value for k in ScenarioKind)
        + ") or 'random' (seeded by --seed)"
    )

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 42)")
        return p

    p = add("run", "run a scenario and write its report directory")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV})")

    p = add("routes", "print the ranked routes of a scenario")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument("--k", type=_positive_int, default=None, help="number of routes")
    p.add_argument("--csv", action="store_true", help="print the route-table CSV instead")
    p.add_argument(
        "--audit-published", action="store_true",
        help="also recompute the published route sums from their legs",
    )

    p = add("neighbors", "print a scenario's neighbour table")
    p.add_argument("--scenario", required=True, help=scenario_help)
    p.add_argument(
        "--after-run", action="store_true", help="energy column after the run, not fresh"
    )

    p = add("energy-map", "run a scenario and print final battery percentages")
    p.add_argument("--scenario", required=True, help=scenario_help)

    p = add("compare", "compare placements under the first scenario's config")
    p.add_argument("--scenarios", required=True, help="comma-separated scenarios")

    p = add("fit-layout", "fit node coordinates to a distance-constraint CSV")
    p.add_argument("--constraints", required=True, help="CSV with node_a,node_b,distance_m")
    p.add_argument("--anchor", type=_point, default=CENTER_ANCHOR, help="x,y of node 1")
    p.add_argument("--area-side", type=float, default=DEFAULT_AREA_SIDE)
    p.add_argument("--radio-range", type=float, default=DEFAULT_RADIO_RANGE)
    p.add_argument("--out", help=f"layout JSON to write (default ${OUT_ENV}/layout.json)")
    return parser


def _scenario(name, seed):
    if name == "random":
        return random_scenario(seed)
    return load_scenario(name)


def _out_dir(args, default_name=None):
    out = args.out or os.environ.get(OUT_ENV)
    if not out:
        raise UsageError(f"--out is required when ${OUT_ENV} is not set")
    if args.out is None and default_name:
        return os.path.join(out, default_name)
    return out


def cmd_run(args):
    out = _out_dir(args)
    report = _scenario(args.scenario, args.seed).run()
    export_report(report, out)
    print(f"{report.status}: {report.ticks_run} ticks, report written to {out}")
    if report.status == ALL_ROUTES_DEPLETED:
        raise AllRoutesDepleted(report.events[-1][2])
    return 0


def cmd_routes(args):
    scenario = _scenario(args.scenario, args.seed)
    k = args.k or scenario.config.k_routes
    routes = discover_routes(scenario.layout, scenario.src, scenario.dst, k)
    table = render_route_table(routes) if args.csv else render_route_summary(routes)
    sys.stdout.write(table.to_csv() if args.csv else table.to_text())
    if args.audit_published:
        sys.stdout.write("\n" + render_published_audit().to_text())
    return 0


def cmd_neighbors(args):
    scenario = _scenario(args.scenario, args.seed)
    if args.after_run:
        table = scenario.run().final_neighbor_table
    else:
        batteries = fresh_batteries(scenario.layout, scenario.config.initial_voltage)
        table = build_neighbor_table(
            scenario.layout, {n: b.voltage for n, b in batteries.items()}
        )
    sys.stdout.write(render_neighbor_table(table).to_text())
    return 0


def cmd_energy_map(args):
    report = _scenario(args.scenario, args.seed).run()
    sys.stdout.write(render_energy_map(report.final_energy_map).to_text())
    return 0


def cmd_compare(args):
    names = [n.strip() for n in args.scenarios.split(",") if n.strip()]
    if len(names) < 2:
        raise UsageError("--scenarios needs at least two comma-separated entries")
    scenarios = [_scenario(n, args.seed) for n in names]
    first = scenarios[0]
    for s in scenarios[1:]:
        if (s.src, s.dst) != (first.src, first.dst):
            raise UsageError("compared scenarios must share src and dst")
    rows = compare_placements(
        [(s.label, s.layout) for s in scenarios], first.src, first.dst, first.config
    )
    sys.stdout.write(render_comparison(rows).to_text())
    return 0


def cmd_fit_layout(args):
    out = _out_dir(args, "layout.json")
    constraints = read_constraints_csv(args.constraints)
    layout = fit_layout(
        constraints,
        area_side=args.area_side,
        seed=args.seed,
        anchor=args.anchor,
        radio_range=args.radio_range,
    )
    layout.save(out)
    print(f"fitted {len(layout)} nodes, layout written to {out}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "routes": cmd_routes,
    "neighbors": cmd_neighbors,
    "energy-map": cmd_energy_map,
    "compare": cmd_compare,
    "fit-layout": cmd_fit_layout,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, ValidationError, MissingLayout, FileNotFoundError) as exc:
        print(f"meshlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoRoute, AllRoutesDepleted, NoFeasibleLayout) as exc:
        print(f"meshlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
