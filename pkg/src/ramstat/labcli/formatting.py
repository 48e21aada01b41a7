"""Deterministic number formatting for result files."""
from __future__ import annotations

import math
from decimal import ROUND_HALF_EVEN, Context, Decimal

import numpy as np

SIG_DIGITS = 12
_CTX = Context(prec=SIG_DIGITS, rounding=ROUND_HALF_EVEN)


def fmt_real(x) -> str:
    """Round to 12 significant digits, half-even, without trailing zeros."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    if x == 0:
        return "0"
    d = _CTX.plus(Decimal(x)).normalize(_CTX)
    if -7 < d.adjusted() < 15:
        return format(d, "f")
    return format(d, "e")


def fmt_int(x) -> str:
    return str(int(x))


def fmt_cell(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return fmt_int(x)
    if isinstance(x, float):
        return fmt_real(x)
    if x is None:
        return ""
    if isinstance(x, np.integer):
        return fmt_int(x)
    if isinstance(x, np.floating):
        return fmt_real(x)
    return str(x)
