"""Exact integer arithmetic: primes, factorization and prime-divisor counting.

All counting functions work on ``|n|``; the sign of a value never changes
which primes divide it.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

DEFAULT_TRIAL_BOUND = 10**5
DEFAULT_SEED = 0x5EED
# Trial division stops at this prime; a composite cofactor is then split by rho.
RHO_CUTOFF = 1024

# Miller-Rabin with these bases is deterministic below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BELOW = 3317044064679887385961981


def primes_up_to(limit: int) -> np.ndarray:
    """Sieve of Eratosthenes; returns all primes ``<= limit`` as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=8)
def prime_table(limit: int = DEFAULT_TRIAL_BOUND) -> tuple[int, ...]:
    """Immutable, cached prime table used for trial division."""
    return tuple(int(p) for p in primes_up_to(limit))


def prime_pi(x: int) -> int:
    """Number of primes ``<= x``."""
    if x < 2:
        return 0
    return int(primes_up_to(int(x)).size)


def _miller_rabin(n: int, bases) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_prime(n: int) -> bool:
    """Primality test, deterministic below 3.3e24 and BPSW above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    if n < _MR_DETERMINISTIC_BELOW:
        return _miller_rabin(n, _MR_BASES)
    if not _miller_rabin(n, (2,)) or is_square(n):
        return False
    return _strong_lucas(n)


def pollard_brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial divisor of the odd composite ``n``."""
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``sign * prod(p**e)`` of a nonzero integer."""

    entries: tuple[tuple[int, int], ...]
    sign: int = 1

    @property
    def value_is_unit(self) -> bool:
        return not self.entries

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def value(self) -> int:
        v = self.sign
        for p, e in self.entries:
            v *= p**e
        return v

    def exponent(self, p: int) -> int:
        for q, e in self.entries:
            if q == p:
                return e
        return 0


def _factor_abs(m: int, trial_bound: int, seed: int) -> dict[int, int]:
    found: dict[int, int] = {}
    limit = 2
    for p in prime_table(trial_bound):
        if p * p > m or p > RHO_CUTOFF:
            limit = p
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
        limit = p
    if m == 1:
        return found
    if m < limit * limit or is_prime(m):
        found[m] = found.get(m, 0) + 1
        return found
    rng = random.Random(seed)
    stack = [m]
    while stack:
        c = stack.pop()
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        if is_square(c):
            root = math.isqrt(c)
            stack.extend((root, root))
            continue
        d = pollard_brent(c, rng)
        stack.extend((d, c // d))
    return found


def factor(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND, seed: int = DEFAULT_SEED) -> Factorization:
    """Factor a nonzero integer.

    Trial division by the sieved primes below ``min(trial_bound, RHO_CUTOFF)``;
    a composite cofactor is then split by Pollard-Brent with a generator seeded
    by ``seed``. The result does not depend on the seed.
    """
    if n == 0:
        raise DomainError("cannot factor 0")
    found = _factor_abs(abs(n), trial_bound, seed)
    return Factorization(tuple(sorted(found.items())), -1 if n < 0 else 1)


def omega(n: int) -> int:
    """Number of distinct prime divisors of ``n``."""
    return len(factor(n).entries)


def m_a(n: int, a: int) -> int:
    """Number of primes ``p | n`` whose exponent in ``n`` is divisible by ``a``."""
    if a < 1:
        raise DomainError(f"a must be positive, got {a}")
    return sum(1 for _, e in factor(n).entries if e % a == 0)


def valuation(n: int, p: int) -> int:
    """Largest ``e`` with ``p**e | n``."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def squarefree_kernel(n: int) -> int:
    """``sign(n)`` times the product of primes dividing ``n`` to an odd power."""
    f = factor(n)
    k = f.sign
    for p, e in f.entries:
        if e % 2:
            k *= p
    return k


def largest_prime_factor(n: int) -> int:
    """Largest prime dividing ``n``; 1 for units."""
    f = factor(n)
    return f.entries[-1][0] if f.entries else 1


def eval_poly(coeffs, x: int) -> int:
    """Horner evaluation of an integer polynomial given in ascending degree."""
    if len(coeffs) == 0:
        raise DomainError("empty coefficient list")
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
