"""Invariant suites for every module, sized to finish well under a minute.

Each check records the module, the invariant and, on failure, a witness. The
report contains no timings, so two runs with the same seed print the same
text.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import kernel, polys
from ..arith import DEFAULT_SEED, factor, is_prime, m_a, omega, primes_up_to, squarefree_kernel
from ..cover import cover_from_json, cover_to_dict, cover_to_json, make_cover, make_quadratic_cover
from ..ramify import ram_oracle_quadratic
from ..stats import (
    MomentAccumulator,
    central_moment,
    density_below,
    gaussian_moment,
    normal_cdf,
    normal_order_violations,
)
from .runner import SweepParams, sweep


@dataclass
class Check:
    module: str
    name: str
    passed: bool
    witness: str = ""


@dataclass
class Report:
    seed: int
    N: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, module: str, name: str, witness=None) -> None:
        self.checks.append(Check(module, name, witness is None, "" if witness is None else str(witness)))

    def render(self) -> str:
        lines = [f"selftest N={self.N} seed={self.seed} backend={kernel.BACKEND}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            tail = f"  witness: {c.witness}" if c.witness else ""
            lines.append(f"{status} {c.module}.{c.name}{tail}")
        failed = sum(not c.passed for c in self.checks)
        lines.append(f"{len(self.checks) - failed}/{len(self.checks)} passed")
        return "\n".join(lines) + "\n"


def _first(items, pred):
    for x in items:
        if pred(x):
            return x
    return None


def _arith(rep: Report, N: int, rng: random.Random) -> None:
    # products of random primes below 10^7 keep the rho stage fast for any seed
    big = []
    for _ in range(40):
        v = 1
        for _ in range(rng.randint(2, 4)):
            p = rng.randrange(10**5, 10**7)
            while not is_prime(p):
                p += 1
            v *= p ** rng.randint(1, 2)
        big.append(v)
    big += [(2**61 - 1) * (2**31 - 1), 10**18 + 9]
    rep.add("arith", "factor_reconstructs", _first(list(range(1, N + 1)) + big, lambda n: factor(n).value() != n
                                                 or not all(is_prime(p) for p in factor(n).primes)))
    sieve = set(primes_up_to(N).tolist())
    rep.add("arith", "is_prime_matches_sieve", _first(range(N + 1), lambda n: is_prime(n) != (n in sieve)))
    rep.add("arith", "m1_equals_omega", _first(range(1, N + 1), lambda n: m_a(n, 1) != omega(n)))

    def bad_kernel(n):
        k = squarefree_kernel(n)
        q, rem = divmod(n, k)
        return rem != 0 or math.isqrt(q) ** 2 != q or any(e > 1 for _, e in factor(k).entries)

    rep.add("arith", "squarefree_kernel", _first(range(1, N + 1), bad_kernel))


def _polys(rep: Report, rng: random.Random) -> None:
    def sylvester(f, g):
        m, n = len(f) - 1, len(g) - 1
        size = m + n
        rows = []
        for i in range(n):
            rows.append([0] * i + list(reversed(f)) + [0] * (size - m - 1 - i))
        for i in range(m):
            rows.append([0] * i + list(reversed(g)) + [0] * (size - n - 1 - i))
        a = [[Fraction(x) for x in row] for row in rows]
        det = Fraction(1)
        for c in range(size):
            piv = _first(range(c, size), lambda r: a[r][c] != 0)
            if piv is None:
                return 0
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det *= a[c][c]
            for r in range(c + 1, size):
                fac = a[r][c] / a[c][c]
                for j in range(c, size):
                    a[r][j] -= fac * a[c][j]
        return int(det)

    witness = None
    for _ in range(60):
        f = tuple(rng.randint(-9, 9) for _ in range(rng.randint(2, 5))) + (rng.randint(1, 5),)
        g = tuple(rng.randint(-9, 9) for _ in range(rng.randint(2, 4))) + (rng.randint(1, 5),)
        if polys.resultant(f, g) != sylvester(f, g):
            witness = (f, g)
            break
    rep.add("polys", "resultant_matches_sylvester", witness)
    rep.add("polys", "discriminant_examples",
            None if (polys.discriminant((1, 1, 1, 1, 1)), polys.discriminant((1, 0, 1))) == (125, -4) else "mismatch")


def _cover(rep: Report) -> None:
    specs = [make_quadratic_cover((0, 1)), make_quadratic_cover((1, 0, 1)), make_quadratic_cover((0, 1, 0, 1)),
             make_cover([((-2, 0, 0, 1), 3)])]
    rep.add("cover", "json_roundtrip", _first(specs, lambda s: cover_from_json(cover_to_json(s)) != s))
    rep.add("cover", "p0_examples", None if [s.p0 for s in specs] == [2, 2, 2, 3] else [s.p0 for s in specs])


def _ramify(rep: Report, N: int, mutate: str | None) -> None:
    def oracle(f, n):
        res = ram_oracle_quadratic(f, n)
        if mutate == "oracle" and 2 in res.ramified_primes:
            return res.ram - 1
        return res.ram

    for f in ((0, 1), (1, 0, 1), (0, 1, 0, 1)):
        spec = make_quadratic_cover(f)
        block = kernel.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, list(f), 1, N + 1)
        crit = block[:, kernel.CRIT_BIG] + block[:, kernel.ORACLE_SMALL]
        ok = block[:, kernel.STATUS] == kernel.STATUS_OK
        bad = _first(range(1, N + 1), lambda n: ok[n - 1] and int(crit[n - 1]) != oracle(f, n))
        rep.add("ramify", f"criterion_equals_oracle[f={list(f)}]", None if bad is None else f"n={bad}")
    spec = make_quadratic_cover((0, 1))
    block = kernel.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, [0, 1], 1, N + 1)
    defect = block[:, kernel.ORACLE_RAM] - block[:, kernel.OMEGA_PE] + block[:, kernel.CORRECTION]
    bad = np.flatnonzero(np.abs(defect) > 2)
    rep.add("ramify", "defect_bound[f=[0, 1]]", None if bad.size == 0 else f"n={int(bad[0]) + 1}")
    degenerate = int(block[:, kernel.DEGENERATE].sum())
    rep.add("ramify", "hilbert_degenerate_count", None if degenerate == math.isqrt(N) else degenerate)
    backends = kernel.backends()
    if len(backends) > 1:
        spec = make_quadratic_cover((1, 0, 1))
        m = min(N, 2000)
        arrays = [b.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, [1, 0, 1], 1, m + 1)
                  for b in backends.values()]
        diff = np.flatnonzero(np.any(arrays[0] != arrays[1], axis=1))
        rep.add("kernel", "backends_agree", None if diff.size == 0 else f"n={int(diff[0]) + 1}")


def _stats(rep: Report, N: int, rng: random.Random) -> None:
    rep.add("stats", "gaussian_recurrence",
            _first(range(2, 30), lambda k: gaussian_moment(k) != (k - 1) * gaussian_moment(k - 2)))
    grid = [x / 100 for x in range(-600, 601)]
    rep.add("stats", "normal_cdf_symmetry", _first(grid, lambda a: abs(normal_cdf(a) + normal_cdf(-a) - 1) > 2e-7))
    rep.add("stats", "normal_cdf_monotone", _first(zip(grid, grid[1:]), lambda p: normal_cdf(p[1]) < normal_cdf(p[0])))

    acc = MomentAccumulator(6)
    acc.push_many(np.full(50, 7))
    rep.add("stats", "constant_sample_moment_zero",
            _first(range(1, 7), lambda k: central_moment(acc.power_sums, k, 7, 2, 50) != 0))
    two = MomentAccumulator(2)
    two.push_many([3, 7])
    rep.add("stats", "two_point_second_moment_one", None if central_moment(two.power_sums, 2, 5, 2, 2) == 1 else "k=2")

    spec = make_quadratic_cover((0, 1))
    params = SweepParams(cover_to_dict(spec), "oracle", "oracle", "all", 6, 0.5, 10**5, DEFAULT_SEED, True, None, 2)
    ref = sweep(params, N, N)
    rams = np.concatenate(ref.rows)[:, 1]
    witness = None
    for trial in range(20):
        cuts = sorted(rng.sample(range(2, N + 1), rng.randint(1, 12)))
        bounds = [(a, b) for a, b in zip([1] + cuts, cuts + [N + 1])]
        got = sweep(params, N, N, chunks=bounds)
        if got.ram.power_sums != ref.ram.power_sums or got.ram_hist != ref.ram_hist:
            witness = f"chunking {bounds}"
            break
    rep.add("stats", "merge_independent_of_chunking", witness)
    Cs = range(-2, 8)
    dens = [density_below(rams, C) for C in Cs]
    rep.add("stats", "density_monotone_in_C", _first(range(len(dens) - 1), lambda i: dens[i] > dens[i + 1]))
    rep.add("stats", "density_extremes", None if dens[0] == 0.0 and density_below(rams, int(rams.max())) == 1.0 else dens)
    epss = [0.1, 0.25, 0.5, 1.0, 2.0, 10.0]
    viol = [normal_order_violations(rams, e) for e in epss]
    rep.add("stats", "violations_monotone_in_eps", _first(range(len(viol) - 1), lambda i: viol[i] < viol[i + 1]))


def run_selftest(N: int = 10**4, seed: int | None = None, mutate: str | None = None) -> Report:
    """Run all suites. ``mutate="oracle"`` corrupts the quadratic oracle to prove the checks bite."""
    seed = DEFAULT_SEED if seed is None else seed
    rng = random.Random(seed)
    rep = Report(seed, N)
    _arith(rep, N, rng)
    _polys(rep, rng)
    _cover(rep)
    _ramify(rep, N, mutate)
    _stats(rep, N, rng)
    return rep


__all__ = ["run_selftest", "Report", "Check"]
