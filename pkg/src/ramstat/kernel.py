"""Sweep kernel selection.

The compiled extension ``ramstat._ckernel`` is used when it imports; otherwise,
or when ``RAMSTAT_PURE_PYTHON=1`` is set, the pure-Python kernel is used. Both
expose ``evaluate_block``, ``m_a_block`` and ``factor_int`` with identical
results.
"""
import os

from . import _kernel_py
from ._kernel_py import (  # noqa: F401
    CORRECTION,
    CRIT_BIG,
    DEGENERATE,
    NCOLS,
    OMEGA_PE,
    ORACLE_RAM,
    ORACLE_SMALL,
    SMALL_DIV,
    STATUS,
    STATUS_BRANCH,
    STATUS_OK,
)

_impl = _kernel_py
BACKEND = "python"
if os.environ.get("RAMSTAT_PURE_PYTHON") != "1":
    try:
        from . import _ckernel as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

evaluate_block = _impl.evaluate_block
m_a_block = _impl.m_a_block
factor_int = _impl.factor_int


def backends():
    """Every importable kernel implementation, by name."""
    found = {"python": _kernel_py}
    try:
        from . import _ckernel

        found["cython"] = _ckernel
    except ImportError:
        pass
    return found
