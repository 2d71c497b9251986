"""Table renderings and deterministic CSV/JSON exports of simulation results."""

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from meshlab.formatting import meters, percent, volts
from meshlab.routing import Route

ORDINALS = {1: "First", 2: "Second", 3: "Third", 4: "Fourth", 5: "Fifth"}


@dataclass(frozen=True)
class TableRendering:
    columns: tuple
    rows: tuple = ()

    def to_text(self):
        cells = [list(self.columns)] + [list(r) for r in self.rows]
        widths = [max(len(str(row[i])) for row in cells) for i in range(len(self.columns))]
        lines = ["  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def __str__(self):
        return self.to_text()


def render_neighbor_table(table):
    rows = sorted(table.rows, key=lambda r: (r.node, r.neighbor))
    return TableRendering(
        ("NODE", "NEIGHBOURS", "DISTANCES", "ENERGY"),
        tuple((str(r.node), str(r.neighbor), meters(r.distance), volts(r.energy)) for r in rows),
    )


def rank_label(rank):
    return f"{ORDINALS.get(rank, f'#{rank}')} Route"


def _routes(history):
    """Accept routes or route activations; keep first occurrence of each path."""
    out = []
    for item in history:
        route = item if isinstance(item, Route) else item.route
        if route not in out:
            out.append(route)
    return out


def render_route_summary(history):
    """Legs of each route followed by a sum row labelled with its rank."""
    rows = []
    for rank, route in enumerate(_routes(history), start=1):
        for a, b, d in route.legs():
            rows.append((f"{a}-{b}", meters(d)))
        rows.append(("Sum", f"{meters(route.total_distance)} ({rank_label(rank)})"))
    return TableRendering(("Node", "Distance"), tuple(rows))


def render_route_table(routes):
    """The ``rank,path,links,intermediates,total_distance_m`` export."""
    return TableRendering(
        ("rank", "path", "links", "intermediates", "total_distance_m"),
        tuple(
            (
                str(rank),
                route.dashed(),
                str(route.hop_count),
                str(len(route.intermediates)),
                meters(route.total_distance),
            )
            for rank, route in enumerate(_routes(routes), start=1)
        ),
    )


def render_energy_map(emap, layout=None):
    if layout is None:
        return TableRendering(
            ("node_id", "percent"),
            tuple((str(n), percent(p)) for n, p in sorted(emap.entries.items())),
        )
    return TableRendering(
        ("node_id", "percent", "x", "y"),
        tuple(
            (str(n), percent(p), meters(layout.node(n).x), meters(layout.node(n).y))
            for n, p in sorted(emap.entries.items())
        ),
    )


def render_voltages(report):
    rows = []
    for i, tick in enumerate(report.sample_ticks):
        for node in sorted(report.voltage_traces):
            rows.append((str(tick), str(node), volts(report.voltage_traces[node][i])))
    return TableRendering(("tick", "node_id", "voltage_v"), tuple(rows))


def render_events(report):
    return TableRendering(
        ("tick", "event", "detail"),
        tuple((str(t), kind, detail) for t, kind, detail in report.events),
    )


def _optional(value, fmt):
    return "-" if value is None else fmt(value)


def render_comparison(rows):
    return TableRendering(
        (
            "placement", "first_route", "distance_m", "links", "delay_s",
            "first_failover_tick", "mean_final_voltage_v", "status",
        ),
        tuple(
            (
                r.label,
                r.first_route.dashed() if r.first_route else "-",
                meters(r.first_route_distance) if r.first_route else "-",
                _optional(r.links, str),
                _optional(r.initial_delay, lambda v: f"{v:.2f}"),
                _optional(r.first_failover_tick, str),
                _optional(r.mean_final_voltage, volts),
                r.status,
            )
            for r in rows
        ),
    )


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def emit_plot_data(report, out_dir):
    """Write ``voltages.csv`` and ``energy_map.csv`` (with node positions) to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "voltages.csv": render_voltages(report).to_csv(),
        "energy_map.csv": render_energy_map(report.final_energy_map, report.layout).to_csv(),
    }
    for name, text in files.items():
        _write(out / name, text)
    return sorted(out / name for name in files)


def export_report(report, out_dir):
    """Write the full run directory: plot data, routes, events, neighbours and summary."""
    out = Path(out_dir)
    written = emit_plot_data(report, out)
    files = {
        "routes.csv": render_route_table(report.route_history).to_csv(),
        "events.csv": render_events(report).to_csv(),
        "neighbors.csv": report.final_neighbor_table.to_csv(),
        "summary.json": json.dumps(report.summary(), indent=2, sort_keys=True) + "\n",
    }
    for name, text in files.items():
        _write(out / name, text)
    return sorted(written + [out / name for name in files])


# Route tables as printed in the published study: legs and the printed sum.
PUBLISHED_ROUTE_TABLES = {
    "center": (
        ("first", ((1, 2, 122.0656), (2, 8, 100.0)), 222.0656),
        ("second", ((1, 3, 128.0625), (3, 8, 180.2776)), 308.3401),
        ("other", ((1, 2, 122.0656), (2, 3, 150.0), (3, 8, 180.2776)), 452.3432),
    ),
    "corner": (
        ("first", ((1, 6, 100.0), (6, 7, 111.8034), (7, 2, 111.8034), (2, 8, 100.0)), 423.6068),
        ("second", ((5, 1, 180.2776), (5, 4, 111.8034), (4, 3, 111.8034), (3, 8, 180.2776)),
         584.16),
        ("other", ((1, 6, 100.0), (6, 5, 150.0), (5, 4, 111.8034), (4, 3, 111.8034),
                   (3, 8, 180.2776)), 473.081),
    ),
}

# printed sums are given to at most 4 decimals, some to 2
PRINTED_SUM_TOLERANCE = 5e-3


@dataclass(frozen=True)
class PublishedSumCheck:
    network: str
    label: str
    legs: tuple
    printed_sum: float
    leg_sum: float

    @property
    def discrepancy(self):
        return self.printed_sum - self.leg_sum

    @property
    def consistent(self):
        return abs(self.discrepancy) <= PRINTED_SUM_TOLERANCE

    @property
    def note(self):
        if self.consistent:
            return "ok"
        return (
            f"erratum: printed sum {self.printed_sum!r} does not match its legs, "
            f"which total {meters(self.leg_sum)}"
        )


def audit_published_routes():
    """Recompute every published route sum from its printed legs."""
    checks = []
    for network, tables in PUBLISHED_ROUTE_TABLES.items():
        for label, legs, printed in tables:
            total = 0.0
            for _, _, d in legs:
                total += d
            checks.append(PublishedSumCheck(network, label, legs, printed, total))
    return checks


def render_published_audit(checks=None):
    checks = audit_published_routes() if checks is None else checks
    return TableRendering(
        ("network", "route", "legs", "printed_sum_m", "leg_sum_m", "note"),
        tuple(
            (
                c.network,
                c.label,
                " ".join(f"{a}-{b}" for a, b, _ in c.legs),
                repr(c.printed_sum),
                meters(c.leg_sum),
                c.note,
            )
            for c in checks
        ),
    )
