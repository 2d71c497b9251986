"""Fixed-decimal, round-half-up number formatting for tables and exports."""

import math
from decimal import ROUND_HALF_UP, Decimal


def fixed(value, places=4):
    """Format ``value`` with ``places`` decimals, rounding half away from zero.

    Rounds the shortest decimal representation of the float, so
    ``fixed(0.00005, 4) == "0.0001"`` even though the binary value is
    slightly below the midpoint.
    """
    value = float(value)
    if not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    quantum = Decimal(1).scaleb(-places)
    out = Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP)
    if out == 0:
        out = abs(out)
    return f"{out:.{places}f}"


def meters(value):
    return fixed(value, 4)


def volts(value):
    return fixed(value, 4)


def percent(value):
    return fixed(value, 3)
