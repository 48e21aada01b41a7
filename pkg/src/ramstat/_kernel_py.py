"""Pure-Python sweep kernel.

Reference implementation of the per-n statistics; the compiled kernel in
``_ckernel`` must produce identical arrays and falls back to :func:`eval_one`
for values that do not fit in 64 bits.
"""
from __future__ import annotations

import numpy as np

from .arith import DEFAULT_SEED, DEFAULT_TRIAL_BOUND, eval_poly, factor
from .errors import ConsistencyError

# Columns of the array returned by evaluate_block.
STATUS, OMEGA_PE, CORRECTION, CRIT_BIG, SMALL_DIV, ORACLE_RAM, ORACLE_SMALL, DEGENERATE = range(8)
NCOLS = 8

STATUS_OK = 0
STATUS_BRANCH = 1


def _oracle_stats(f, n, p0, trial_bound, seed):
    fac = factor(eval_poly(f, n), trial_bound, seed)
    kernel = fac.sign
    odd = []
    for p, e in fac.entries:
        if e % 2:
            kernel *= p
            if p != 2:
                odd.append(p)
    ramified = odd + ([2] if kernel % 4 != 1 else [])
    return len(ramified), sum(1 for p in ramified if p <= p0), int(kernel == 1)


def eval_one(orbits, ram_indices, p0, f, n, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """Statistics row for a single ``n``; see the column constants."""
    values = [eval_poly(c, n) for c in orbits]
    if any(v == 0 for v in values):
        return (STATUS_BRANCH, 0, 0, 0, 0, -1, 0, 0)
    facs = [dict(factor(v, trial_bound, seed).entries) for v in values]
    seen = set()
    omega_pe = small_div = crit_big = 0
    correction = 0
    for fac, e_i in zip(facs, ram_indices):
        correction += sum(1 for e in fac.values() if e % e_i == 0)
    for fac in facs:
        for p in fac:
            if p in seen:
                continue
            seen.add(p)
            omega_pe += 1
            if p <= p0:
                small_div += 1
                continue
            hits = sum(1 for g, e_i in zip(facs, ram_indices) if p in g and g[p] % e_i)
            if hits > 1:
                raise ConsistencyError(
                    f"prime {p} > p0={p0} meets the criterion in {hits} orbits at n={n}; p0 is too small"
                )
            crit_big += hits
    if f is None:
        oracle = (-1, 0, 0)
    else:
        oracle = _oracle_stats(f, n, p0, trial_bound, seed)
    return (STATUS_OK, omega_pe, correction, crit_big, small_div) + oracle


def evaluate_block(orbits, ram_indices, p0, f, n_start, n_stop, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """Rows for ``n_start <= n < n_stop`` as an int64 array of shape ``(len, NCOLS)``."""
    out = np.zeros((max(n_stop - n_start, 0), NCOLS), dtype=np.int64)
    for i, n in enumerate(range(n_start, n_stop)):
        out[i] = eval_one(orbits, ram_indices, p0, f, n, trial_bound, seed)
    return out


def m_a_one(coeffs, a, n, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    v = eval_poly(coeffs, n)
    if v == 0:
        return -1
    return sum(1 for _, e in factor(v, trial_bound, seed).entries if e % a == 0)


def m_a_block(coeffs, a, n_start, n_stop, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """``m_a(|P(n)|)`` for ``n_start <= n < n_stop``; -1 where ``P(n) = 0``."""
    out = np.zeros(max(n_stop - n_start, 0), dtype=np.int64)
    for i, n in enumerate(range(n_start, n_stop)):
        out[i] = m_a_one(coeffs, a, n, trial_bound, seed)
    return out


def factor_int(m, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """Factorization entries of a positive integer as a list of pairs."""
    return list(factor(m, trial_bound, seed).entries)
