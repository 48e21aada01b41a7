import math

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ramstat.arith import (
    RHO_CUTOFF,
    factor,
    is_prime,
    largest_prime_factor,
    m_a,
    omega,
    prime_pi,
    primes_up_to,
    squarefree_kernel,
    valuation,
)
from ramstat.errors import DomainError


def test_factor_examples():
    assert factor(360).entries == ((2, 3), (3, 2), (5, 1))
    assert factor(1).value_is_unit
    assert factor(-12).sign == -1
    assert factor(-12).value() == -12


def test_factor_zero_rejected():
    with pytest.raises(DomainError):
        factor(0)


@pytest.mark.parametrize("n", [
    (2**61 - 1) * (2**31 - 1),
    1000003 * 1000033 * 1000037,
    2**64 + 1,
    (10**12 + 39) ** 2,
    RHO_CUTOFF**2 + 1,
    600851475143,
])
def test_factor_matches_sympy(n):
    assert dict(factor(n).entries) == sympy.factorint(n)


@given(st.integers(min_value=1, max_value=10**18))
def test_factor_reconstruction(n):
    f = factor(n)
    assert f.value() == n
    assert all(is_prime(p) for p in f.primes)
    assert list(f.primes) == sorted(f.primes)


@given(st.integers(min_value=1, max_value=10**15), st.integers(min_value=0, max_value=2**32))
def test_factor_independent_of_seed(n, seed):
    assert factor(n, seed=seed) == factor(n)


def test_is_prime_matches_sieve():
    sieve = set(primes_up_to(20000).tolist())
    assert all(is_prime(n) == (n in sieve) for n in range(-5, 20001))


@given(st.integers(min_value=10**20, max_value=10**40))
def test_is_prime_matches_sympy_large(n):
    assert is_prime(n) == sympy.isprime(n)


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprime to the first 13 prime bases
    assert not is_prime(3317044064679887385961981)
    assert is_prime(2**89 - 1)
    assert not is_prime(2**89 + 1)


def test_prime_pi():
    assert [prime_pi(x) for x in (0, 1, 2, 10, 100, 10**4)] == [0, 0, 1, 4, 25, 1229]


def test_omega_and_m_a():
    assert omega(1) == 0
    assert omega(2**10) == 1
    assert omega(30) == 3
    assert m_a(72, 2) == 1  # 2^3 * 3^2
    assert m_a(72, 3) == 1
    assert m_a(36, 2) == 2
    with pytest.raises(DomainError):
        m_a(5, 0)


@given(st.integers(min_value=1, max_value=10**12))
def test_m1_is_omega(n):
    assert m_a(n, 1) == omega(n) == len(sympy.primefactors(n))


@given(st.integers(min_value=1, max_value=10**12), st.integers(min_value=1, max_value=6))
def test_m_a_bounded_by_omega(n, a):
    assert 0 <= m_a(n, a) <= omega(n)


def test_valuation():
    assert valuation(48, 2) == 4
    assert valuation(-48, 3) == 1
    assert valuation(7, 5) == 0
    with pytest.raises(DomainError):
        valuation(12, 4)
    with pytest.raises(DomainError):
        valuation(0, 2)


@given(st.integers(min_value=-10**12, max_value=10**12).filter(bool))
def test_squarefree_kernel_property(n):
    k = squarefree_kernel(n)
    q, rem = divmod(n, k)
    assert rem == 0 and q > 0
    assert math.isqrt(q) ** 2 == q
    assert all(e == 1 for _, e in factor(k).entries)


def test_squarefree_kernel_examples():
    assert squarefree_kernel(12) == 3
    assert squarefree_kernel(-8) == -2
    assert squarefree_kernel(49) == 1
    assert largest_prime_factor(1) == 1
    assert largest_prime_factor(2 * 3 * 101) == 101
