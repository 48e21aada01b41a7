"""Dense univariate polynomials over Z and F_q.

Polynomials are tuples of coefficients in ascending degree with no trailing
zeros; the zero polynomial is ``()``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from .arith import factor, prime_table
from .errors import DomainError


def trim(coeffs) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(f) -> int:
    return len(f) - 1 if f else -1


def lc(f) -> int:
    return f[-1] if f else 0


def add(f, g):
    n = max(len(f), len(g))
    return trim((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n))


def neg(f):
    return tuple(-c for c in f)


def sub(f, g):
    return add(f, neg(g))


def scale(f, k):
    return trim(c * k for c in f)


def mul(f, g):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out)


def product(polys):
    acc = (1,)
    for p in polys:
        acc = mul(acc, p)
    return acc


def derivative(f):
    return trim(i * f[i] for i in range(1, len(f)))


def content(f) -> int:
    g = 0
    for c in f:
        g = math.gcd(g, c)
    return g


def primitive_part(f):
    """Primitive part with positive leading coefficient."""
    if not f:
        return ()
    c = content(f)
    if lc(f) < 0:
        c = -c
    return tuple(x // c for x in f)


def prem(a, b):
    """Pseudo-remainder of ``lc(b)**(deg a - deg b + 1) * a`` by ``b``."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = degree(b)
    r = list(a)
    e = degree(a) - db + 1
    lb = lc(b)
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        top = r[-1]
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[i + k] -= top * y
        r = list(trim(r))
        e -= 1
    if e > 0:
        r = [x * lb**e for x in r]
    return trim(r)


def divmod_q(a, b):
    """Quotient and remainder over Q, as tuples of Fractions."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in a]
    db = degree(b)
    q = [Fraction(0)] * max(len(a) - db, 0)
    lb = Fraction(lc(b))
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        t = r[-1] / lb
        q[k] = t
        for i, y in enumerate(b):
            r[i + k] -= t * y
        r = list(trim(r))
    return trim(q), trim(r)


def exact_quotient(a, b):
    """Quotient ``a / b`` over Q when the division is exact, else ``None``.

    Returned coefficients are Fractions.
    """
    q, r = divmod_q(a, b)
    return None if r else q


def gcd(a, b):
    """Primitive gcd over Z[T] with positive leading coefficient."""
    a, b = primitive_part(a), primitive_part(b)
    if not a:
        return b
    if not b:
        return a
    if degree(a) < degree(b):
        a, b = b, a
    while b:
        r = prem(a, b)
        a, b = b, primitive_part(r)
    return primitive_part(a) if degree(a) > 0 else (1,)


def is_squarefree(f) -> bool:
    return degree(gcd(f, derivative(f))) == 0


def resultant(a, b) -> int:
    """Resultant over Z via the fraction-free subresultant sequence."""
    a, b = trim(a), trim(b)
    if not a or not b:
        return 0
    s = 1
    if degree(a) < degree(b):
        a, b = b, a
        if degree(a) % 2 and degree(b) % 2:
            s = -1
    if degree(b) == 0:
        return s * b[0] ** degree(a)
    ca, cb = content(a), content(b)
    t = ca ** degree(b) * cb ** degree(a)
    a = tuple(x // ca for x in a)
    b = tuple(x // cb for x in b)
    g = h = 1
    while True:
        delta = degree(a) - degree(b)
        if degree(a) % 2 and degree(b) % 2:
            s = -s
        r = prem(a, b)
        a = b
        div = g * h**delta
        b = tuple(x // div for x in r)
        if not b:
            return 0
        g = lc(a)
        h = g**delta // h ** (delta - 1) if delta >= 1 else h
        if degree(b) <= 0:
            break
    da = degree(a)
    h = lc(b) ** da // h ** (da - 1) if da >= 1 else h * lc(b) ** da
    return s * t * h


def discriminant(f) -> int:
    """``(-1)**(n(n-1)/2) * Res(f, f') / lc(f)``; 1 for linear polynomials."""
    f = trim(f)
    n = degree(f)
    if n < 1:
        raise DomainError("discriminant of a constant polynomial")
    if n == 1:
        return 1
    res = resultant(f, derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, r = divmod(sign * res, lc(f))
    assert r == 0
    return q


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor(n).entries:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def rational_roots(f) -> list[Fraction]:
    """All rational roots of an integer polynomial, ascending."""
    f = trim(f)
    if degree(f) < 1:
        return []
    roots = set()
    k = 0
    while f[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    g = f[k:]
    if len(g) > 1:
        for u in _divisors(g[0]):
            for v in _divisors(lc(g)):
                for cand in (Fraction(u, v), Fraction(-u, v)):
                    if _eval_frac(g, cand) == 0:
                        roots.add(cand)
    return sorted(roots)


def _eval_frac(f, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


# -- arithmetic in F_q[T] ----------------------------------------------------


def reduce_mod(f, q):
    return trim(c % q for c in f)


def _monic_mod(f, q):
    inv = pow(f[-1], -1, q)
    return tuple(c * inv % q for c in f)


def mulmod_q(f, g, m, q):
    """``f * g mod (m, q)`` with ``m`` monic."""
    return divmod_q_mod(reduce_mod(mul(f, g), q), m, q)[1]


def divmod_q_mod(a, b, q):
    a = list(reduce_mod(a, q))
    b = reduce_mod(b, q)
    db = degree(b)
    inv = pow(b[-1], -1, q)
    quo = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        k = len(a) - 1 - db
        t = a[-1] * inv % q
        quo[k] = t
        for i, y in enumerate(b):
            a[i + k] = (a[i + k] - t * y) % q
        a = list(trim(a))
    return trim(quo), trim(a)


def gcd_mod(a, b, q):
    a, b = reduce_mod(a, q), reduce_mod(b, q)
    while b:
        a, b = b, divmod_q_mod(a, b, q)[1]
    return _monic_mod(a, q) if a else ()


def powmod_q(base, e: int, m, q):
    result = (1,)
    base = divmod_q_mod(base, m, q)[1]
    while e:
        if e & 1:
            result = mulmod_q(result, base, m, q)
        base = mulmod_q(base, base, m, q)
        e >>= 1
    return result


def is_irreducible_mod(f, q: int) -> bool:
    """Ben-Or test for irreducibility of ``f`` over F_q; ``q`` must not divide lc(f)."""
    f = reduce_mod(f, q)
    n = degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    f = _monic_mod(f, q)
    x = (0, 1)
    xp = x
    for _ in range(n // 2):
        xp = powmod_q(xp, q, f, q)
        if degree(gcd_mod(f, sub(xp, x), q)) > 0:
            return False
    return True


def irreducibility_certificate(f, max_q: int = 100):
    """Evidence that a primitive polynomial is irreducible over Q.

    Returns ``"rational-roots"`` for degree <= 3 without rational roots,
    ``("mod", q)`` when ``f`` stays irreducible modulo a prime ``q`` not
    dividing the leading coefficient, ``None`` when nothing was found.
    Raises ``DomainError`` if a rational root proves ``f`` reducible.
    """
    n = degree(f)
    if n == 1:
        return "linear"
    if rational_roots(f):
        raise DomainError(f"polynomial {f} has a rational root")
    if n <= 3:
        return "rational-roots"
    for q in prime_table(max_q):
        if lc(f) % q and is_irreducible_mod(f, q):
            return ("mod", q)
    return None


def pairwise_coprime(polys) -> bool:
    return all(degree(gcd(a, b)) == 0 for a, b in combinations(polys, 2))
