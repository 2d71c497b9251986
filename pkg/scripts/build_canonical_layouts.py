"""Regenerate the packaged constraint files and frozen canonical layouts.

Published pairwise distances are written with their published 4-decimal
values (source=published). Every remaining pair is filled in from a hand
placement of the same network (source=completion) so the fit is rigid and
no unlisted pair falls inside radio range by accident.

The corner network reuses the center network's routers and end devices
unchanged and moves only the coordinator next to router 6, then rotates the
whole placement so the coordinator sits in the top-left corner of the field.

Run from the repository root:

    python scripts/build_canonical_layouts.py
"""

import csv
import itertools
import math
from pathlib import Path

from meshlab.topology import CENTER_ANCHOR, CORNER_ANCHOR, fit_layout

DATA = Path(__file__).resolve().parents[1] / "src" / "meshlab" / "data"
SEED = 42

CENTER_PLACEMENT = {
    1: (300, 300),
    2: (400, 230), 3: (400, 380), 4: (300, 430), 5: (200, 380), 6: (200, 230), 7: (300, 180),
    8: (500, 230), 9: (500, 305), 10: (550, 330), 11: (280, 580),
    12: (200, 520), 13: (520, 450), 14: (420, 560), 15: (580, 220),
}

CENTER_PUBLISHED = {
    (1, 2): 122.0656, (1, 3): 128.0625, (1, 4): 130.0, (1, 5): 128.0625,
    (1, 6): 122.0656, (1, 7): 120.0,
    (2, 3): 150.0, (2, 7): 111.8034, (2, 8): 100.0, (2, 9): 125.0,
    (2, 10): 180.2776, (2, 15): 180.2776,
    (3, 4): 111.8034, (3, 8): 180.2776,
}

CORNER_PUBLISHED = {
    (1, 6): 100.0, (6, 7): 111.8034, (2, 7): 111.8034, (2, 8): 100.0,
    (1, 5): 180.2776, (4, 5): 111.8034, (3, 4): 111.8034, (3, 8): 180.2776,
    (5, 6): 150.0,
}


def corner_placement():
    # coordinator 100 m left of router 6 (and 180.2776 m from router 5)
    cx, cy = CENTER_PLACEMENT[6][0] - 100, CENTER_PLACEMENT[6][1]
    theta = math.radians(16.5)
    out = {}
    for n, (x, y) in CENTER_PLACEMENT.items():
        if n == 1:
            rx, ry = 0.0, 0.0
        else:
            dx, dy = x - cx, y - cy
            rx = dx * math.cos(theta) - dy * math.sin(theta)
            ry = dx * math.sin(theta) + dy * math.cos(theta)
        out[n] = (CORNER_ANCHOR[0] + rx, CORNER_ANCHOR[1] - ry)
    return out


def constraints(placement, published):
    rows = []
    for a, b in itertools.combinations(sorted(placement), 2):
        if (a, b) in published:
            rows.append((a, b, published[(a, b)], "published"))
        else:
            rows.append((a, b, math.dist(placement[a], placement[b]), "completion"))
    return rows


def write_constraints(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_a", "node_b", "distance_m", "source"])
        for a, b, d, source in rows:
            writer.writerow([a, b, repr(float(d)), source])


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    for name, placement, published, anchor in (
        ("center", CENTER_PLACEMENT, CENTER_PUBLISHED, CENTER_ANCHOR),
        ("corner", corner_placement(), CORNER_PUBLISHED, CORNER_ANCHOR),
    ):
        rows = constraints(placement, published)
        write_constraints(DATA / f"{name}_constraints.csv", rows)
        layout = fit_layout([r[:3] for r in rows], seed=SEED, anchor=anchor)
        layout.save(DATA / f"{name}_layout.json")
        print(f"{name}: {len(rows)} constraints -> {DATA / f'{name}_layout.json'}")


if __name__ == "__main__":
    main()
