import math
import random
from decimal import Decimal, localcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramstat.cover import make_quadratic_cover
from ramstat.errors import DomainError
from ramstat.stats import (
    MomentAccumulator,
    cdf_compare,
    central_moment,
    density_below,
    finalize_moment,
    gaussian_moment,
    halberstam_moment,
    m_a_power_mean,
    normal_cdf,
    normal_order_violations,
    normalization,
)


def simpson_cdf(a, h=1e-6):
    """0.5 + integral_0^a of the normal density, composite Simpson."""
    n = max(2, int(round(abs(a) / h)) // 2 * 2)
    x = np.linspace(0.0, abs(a), n + 1)
    y = np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    integral = (abs(a) / n) / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
    return 0.5 + math.copysign(integral, a)


def test_push_and_merge():
    acc = MomentAccumulator(2)
    acc.push(1)
    acc.push(1)
    assert acc.power_sums[2] == 2
    a, b = MomentAccumulator(1, power_sums=[1, 3]), MomentAccumulator(1, power_sums=[1, 4])
    assert a.merge(b).power_sums[1] == 7
    acc.push(-1)
    assert acc.power_sums[1] == 1
    with pytest.raises(DomainError):
        MomentAccumulator(2).merge(MomentAccumulator(3))


@given(st.lists(st.integers(-1, 40), max_size=300), st.randoms(use_true_random=False))
def test_merge_any_partition(xs, rnd):
    whole = MomentAccumulator(8)
    whole.push_many(xs)
    cuts = sorted(rnd.sample(range(len(xs) + 1), min(len(xs) + 1, 5)))
    parts = [xs[a:b] for a, b in zip([0] + cuts, cuts + [len(xs)])]
    rnd.shuffle(parts)
    merged = MomentAccumulator(8)
    for p in parts:
        acc = MomentAccumulator(8)
        for x in p:
            acc.push(x)
        merged = merged.merge(acc)
    assert merged.power_sums == whole.power_sums
    assert merged.count == len(xs)


def test_gaussian_moment():
    assert [gaussian_moment(k) for k in range(7)] == [1, 0, 1, 0, 3, 0, 15]
    for k in range(2, 40):
        assert gaussian_moment(k) == (k - 1) * gaussian_moment(k - 2)


def test_finalize_targets():
    acc = MomentAccumulator(4)
    acc.push_many([1, 2, 3])
    assert [finalize_moment(acc, k, 1, 1000).gaussian_target for k in (2, 3, 4)] == [1, 0, 3]
    with pytest.raises(DomainError):
        finalize_moment(acc, 2, 1, 2)
    with pytest.raises(DomainError):
        finalize_moment(acc, 5, 1, 1000)


@given(st.integers(-5, 50), st.integers(1, 200), st.integers(1, 6))
def test_constant_sample_central_moment_zero(c, n, k):
    acc = MomentAccumulator(6)
    acc.push_many([c] * n)
    assert central_moment(acc.power_sums, k, c, Decimal(2).sqrt(), n) == 0


def test_two_point_second_moment():
    c, s = normalization(1, 10**6)
    # the sample {c - s, c + s} is not integral, so feed its power sums directly
    with localcontext() as ctx:
        ctx.prec = 60
        sums = [2, 2 * c, (c - s) ** 2 + (c + s) ** 2]
    assert abs(central_moment(sums, 2, c, s, 2) - 1) < Decimal("1e-50")
    acc = MomentAccumulator(2)
    acc.push_many([3, 7])
    assert central_moment(acc.power_sums, 2, 5, 2, 2) == 1


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0, 3.0, -1.0, -2.5])
def test_normal_cdf_against_quadrature(a):
    assert abs(normal_cdf(a) - simpson_cdf(a)) <= 1e-7


def test_normal_cdf_values():
    assert normal_cdf(0) == 0.5
    assert abs(normal_cdf(1.0) - 0.8413447) < 1e-7
    assert abs(normal_cdf(3.0) - 0.99865) < 1e-5


@given(st.floats(-8, 8), st.floats(-8, 8))
def test_normal_cdf_symmetric_monotone(a, b):
    assert abs(normal_cdf(a) + normal_cdf(-a) - 1) <= 2e-7
    if a <= b:
        assert normal_cdf(a) <= normal_cdf(b)


def test_cdf_compare_constant_sample():
    # integer samples cannot sit exactly at c, so the jump lands on the first
    # grid point at or above the sample's normalized value
    N = 1000
    c, s = normalization(1, N)
    x0 = math.floor(c)
    z = float((x0 - c) / s)
    _, rows = cdf_compare(np.full(N, x0), 1, N)
    assert [row.empirical for row in rows] == [float(row.a >= z) for row in rows]
    assert rows[-1].limit == pytest.approx(0.99865, abs=1e-5)


@given(st.lists(st.integers(-1, 12), min_size=1, max_size=200), st.integers(-3, 14), st.integers(-3, 14))
def test_density_monotone(xs, c1, c2):
    lo, hi = sorted((c1, c2))
    assert density_below(xs, lo) <= density_below(xs, hi)


def test_density_extremes():
    xs = [0, 1, 5, -1, 2]
    assert density_below(xs, 5) == 1.0
    assert density_below(xs, -2) == 0.0


@given(st.lists(st.integers(-1, 12), min_size=3, max_size=200), st.floats(0.01, 20), st.floats(0.01, 20))
def test_violations_monotone(xs, e1, e2):
    lo, hi = sorted((e1, e2))
    assert normal_order_violations(xs, hi) <= normal_order_violations(xs, lo)


def test_violations_examples():
    assert normal_order_violations(np.zeros(1000), 0.9) == 998 / 1000
    with pytest.raises(DomainError):
        normal_order_violations([1, 2, 3], 0)


def brute_m2_average(N):
    total = 0
    for n in range(1, N + 1):
        m, p, count = n, 2, 0
        while p * p <= m:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            count += e > 0 and e % 2 == 0
            p += 1
        total += count
    return total / N


def test_m_a_power_mean_brute_force():
    assert m_a_power_mean((0, 1), 2, 1, 1000) == pytest.approx(brute_m2_average(1000), abs=0)
    with pytest.raises(DomainError):
        m_a_power_mean((0, 1), 1, 1, 100)


def test_m_a_power_mean_domination():
    from ramstat.arith import omega

    omega_avg = sum(omega(n) for n in range(1, 10**4 + 1)) / 10**4
    assert m_a_power_mean((0, 1), 5, 3, 10**4) <= m_a_power_mean((0, 1), 2, 3, 10**4)
    assert m_a_power_mean((0, 1), 5, 1, 10**4) <= omega_avg


def test_halberstam_small():
    spec = make_quadratic_cover((0, 1))
    rep = halberstam_moment(spec, 1, 10**4)
    omega_sum = sum(len(set(trial_factor(n))) for n in range(1, 10**4 + 1))
    c, s = normalization(1, 10**4)
    assert rep.normalized_moment == pytest.approx(float((omega_sum / Decimal(10**4) - c) / s), abs=1e-12)


def trial_factor(n):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def test_push_many_order_independent():
    # accumulators are deterministic: identical input in any order gives identical sums
    xs = list(range(-1, 30)) * 3
    a, b = MomentAccumulator(5), MomentAccumulator(5)
    a.push_many(xs)
    random.Random(1).shuffle(xs)
    b.push_many(xs)
    assert a.power_sums == b.power_sums
