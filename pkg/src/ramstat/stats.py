"""Mergeable moment accumulators and the limit-law statistics built on them.

Every statistic is normalized by ``c = r * loglog N`` and ``s = sqrt(c)``
with natural logarithms, centering at the sweep length ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from math import comb

import numpy as np

from . import kernel
from .arith import DEFAULT_SEED, DEFAULT_TRIAL_BOUND
from .cover import CoverSpec
from .errors import DomainError

DEC_PREC = 60
DEFAULT_GRID = tuple(x / 2 for x in range(-6, 7))


@dataclass
class MomentAccumulator:
    """Exact power sums ``S_j = sum x**j`` for ``j = 0..k_max``."""

    k_max: int
    filter_tag: str = "all"
    power_sums: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.k_max < 1:
            raise DomainError("k_max must be positive")
        if not self.power_sums:
            self.power_sums = [0] * (self.k_max + 1)

    @property
    def count(self) -> int:
        return self.power_sums[0]

    def push(self, x: int) -> None:
        x = int(x)
        p = 1
        for j in range(self.k_max + 1):
            self.power_sums[j] += p
            p *= x

    def push_many(self, values) -> None:
        """Push an array of integers; exact regardless of magnitude."""
        vals, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            p = c
            for j in range(self.k_max + 1):
                self.power_sums[j] += p
                p *= v

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.k_max != self.k_max:
            raise DomainError(f"cannot merge accumulators with k_max {self.k_max} and {other.k_max}")
        if other.filter_tag != self.filter_tag:
            raise DomainError("cannot merge accumulators with different filters")
        return MomentAccumulator(self.k_max, self.filter_tag, [a + b for a, b in zip(self.power_sums, other.power_sums)])


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    return a.merge(b)


@dataclass(frozen=True)
class MomentReport:
    N: int
    k: int
    normalized_moment: float
    gaussian_target: float
    r: int
    statistic: str = "ram"
    filter_tag: str = "all"


def gaussian_moment(k: int) -> int:
    """``E[Z**k]`` for a standard normal ``Z``: 0 for odd k, ``(k-1)!!`` for even."""
    if k < 0:
        raise DomainError("k must be non-negative")
    if k % 2:
        return 0
    out = 1
    for j in range(k - 1, 0, -2):
        out *= j
    return out


def central_moment(power_sums, k: int, center, scale, divisor) -> Decimal:
    """``(1/divisor) * sum ((x - center)/scale)**k`` from exact power sums.

    Binomial expansion in 60-digit decimal arithmetic.
    """
    if k >= len(power_sums):
        raise DomainError(f"k={k} exceeds the accumulated order {len(power_sums) - 1}")
    with localcontext() as ctx:
        ctx.prec = DEC_PREC
        c = Decimal(center)
        s = Decimal(scale)
        # powers of -c built up by hand: Decimal refuses 0 ** 0
        neg_pow = [Decimal(1)]
        for _ in range(k):
            neg_pow.append(neg_pow[-1] * -c)
        total = Decimal(0)
        for j in range(k + 1):
            total += comb(k, j) * Decimal(power_sums[j]) * neg_pow[k - j]
        return total / (Decimal(divisor) * s**k)


def normalization(r: int, N: int) -> tuple[Decimal, Decimal]:
    """``(r * loglog N, sqrt(r * loglog N))`` in decimal arithmetic."""
    if N <= 2:
        raise DomainError("loglog N is not positive for N <= 2")
    with localcontext() as ctx:
        ctx.prec = DEC_PREC
        c = Decimal(r) * Decimal(N).ln().ln()
        return +c, c.sqrt()


def finalize_moment(acc: MomentAccumulator, k: int, r: int, N: int | None = None,
                    statistic: str = "ram") -> MomentReport:
    """Normalized k-th moment of the accumulated sample.

    ``N`` is both the divisor and the point at which loglog is taken; it
    defaults to the sample count. Filtered sweeps pass the full range length.
    """
    N = acc.count if N is None else N
    if k > acc.k_max:
        raise DomainError(f"k={k} exceeds k_max={acc.k_max}")
    c, s = normalization(r, N)
    value = central_moment(acc.power_sums, k, c, s, N)
    return MomentReport(N, k, float(value), float(gaussian_moment(k)), r, statistic, acc.filter_tag)


def normal_cdf(a: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-a / math.sqrt(2.0))


def normalized_values(samples, r: int, N: int) -> np.ndarray:
    c, s = normalization(r, N)
    return (np.asarray(samples, dtype=np.float64) - float(c)) / float(s)


@dataclass(frozen=True)
class CdfRow:
    a: float
    empirical: float
    limit: float

    @property
    def abs_error(self) -> float:
        return abs(self.empirical - self.limit)


def cdf_compare(samples, r: int, N: int | None = None, grid=DEFAULT_GRID):
    """Grid KS distance between the normalized sample and the standard normal.

    Returns ``(ks_distance, rows)``; the empirical fraction at ``a`` counts
    samples with normalized value ``<= a`` over ``N`` (default: sample size).
    """
    samples = np.asarray(samples)
    N = samples.size if N is None else N
    if N < 3:
        raise DomainError("N must be at least 3")
    c, s = normalization(r, N)
    rows = []
    xs = np.sort(samples.astype(np.int64))
    for a in grid:
        # x <= c + a*s, evaluated exactly against the integer sample
        with localcontext() as ctx:
            ctx.prec = DEC_PREC
            threshold = c + Decimal(repr(a)) * s
        cut = math.floor(threshold)
        frac = np.searchsorted(xs, cut, side="right") / N
        rows.append(CdfRow(a, float(frac), normal_cdf(a)))
    return max(row.abs_error for row in rows), rows


def density_below(samples, C, N: int | None = None) -> float:
    """Fraction of ``n <= N`` with sample value ``<= C``."""
    samples = np.asarray(samples)
    N = samples.size if N is None else N
    if N == 0:
        return 0.0
    return int(np.count_nonzero(samples[:N] <= C)) / N


def normal_order_violations(samples, eps: float, N: int | None = None, r: int = 1) -> float:
    """Fraction of ``n <= N`` (counted from n = 3) with ``|x(n) - r loglog n| > eps * r loglog n``.

    ``samples[i]`` is the value at ``n = i + 1``.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    samples = np.asarray(samples)
    N = samples.size if N is None else N
    if N < 3:
        return 0.0
    n = np.arange(3, N + 1, dtype=np.float64)
    ll = r * np.log(np.log(n))
    x = samples[2:N].astype(np.float64)
    return int(np.count_nonzero(np.abs(x - ll) > eps * ll)) / N


def count_violations(samples, eps: float, n_start: int, r: int = 1) -> int:
    """Number of normal-order violations in a chunk starting at ``n_start``."""
    samples = np.asarray(samples)
    n = np.arange(n_start, n_start + samples.size, dtype=np.float64)
    keep = n >= 3
    ll = r * np.log(np.log(n[keep]))
    return int(np.count_nonzero(np.abs(samples[keep] - ll) > eps * ll))


def _m_a_values(P, a: int, N: int, trial_bound: int, seed: int) -> np.ndarray:
    vals = kernel.m_a_block(list(P), a, 1, N + 1, trial_bound, seed)
    if np.any(vals < 0):
        bad = int(np.flatnonzero(vals < 0)[0]) + 1
        raise DomainError(f"P({bad}) = 0")
    return vals


def m_a_power_mean(P, a: int, k: int, N: int, *, trial_bound: int = DEFAULT_TRIAL_BOUND,
                  seed: int = DEFAULT_SEED) -> float:
    """``(1/N) * sum_{n<=N} m_a(|P(n)|)**k``; bounded in N for ``a >= 2``."""
    if a < 2:
        raise DomainError("a must be at least 2; for a = 1 the average grows like loglog N")
    acc = MomentAccumulator(k)
    acc.push_many(_m_a_values(P, a, N, trial_bound, seed))
    return acc.power_sums[k] / N


def halberstam_moment(spec: CoverSpec, k: int, N: int, *, trial_bound: int = DEFAULT_TRIAL_BOUND,
                      seed: int = DEFAULT_SEED) -> MomentReport:
    """Normalized k-th moment of ``omega(P_E(n))`` over ``n <= N``, branch points excluded."""
    block = kernel.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, None, 1, N + 1, trial_bound, seed)
    ok = block[:, kernel.STATUS] == kernel.STATUS_OK
    acc = MomentAccumulator(k)
    acc.push_many(block[ok, kernel.OMEGA_PE])
    return finalize_moment(acc, k, spec.r, N, statistic="omega_PE")
