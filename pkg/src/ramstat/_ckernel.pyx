# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sweep kernel, row-for-row identical to ramstat._kernel_py.

Values are handled in 64-bit arithmetic; any n whose polynomial values leave
the signed 64-bit range is delegated to the pure-Python row function.
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint32_t, uint64_t
from libc.math cimport sqrt

from ramstat import _kernel_py
from ramstat.arith import DEFAULT_SEED, DEFAULT_TRIAL_BOUND, primes_up_to
from ramstat.errors import ConsistencyError

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 rs_u128;
    typedef __int128 rs_i128;
    """
    ctypedef unsigned long long rs_u128
    ctypedef long long rs_i128
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil

cdef enum:
    MAXF = 24
    MAXR = 32
    MAXDEG = 64
    MAXSTACK = 128
    TABLE_LIMIT = 100000
    CHECKPOINT = 1024

cdef enum:
    ROW_OK = 0
    ROW_BRANCH = 1
    ROW_OVERFLOW = 2
    ROW_INCONSISTENT = 3

cdef uint32_t PRIMES[9592]
cdef int NPRIMES = 0

_table = primes_up_to(TABLE_LIMIT)
for _i in range(_table.shape[0]):
    PRIMES[_i] = <uint32_t>_table[_i]
NPRIMES = _table.shape[0]
del _table

# Divisibility by an odd prime p: m % p == 0 iff m * PINV[i] <= PLIM[i] (mod 2^64),
# and then m * PINV[i] == m // p.
cdef uint64_t PINV[9592]
cdef uint64_t PLIM[9592]
for _i in range(1, NPRIMES):
    PINV[_i] = pow(int(PRIMES[_i]), -1, 2**64)
    PLIM[_i] = (2**64 - 1) // PRIMES[_i]

cdef rs_i128 I64_LIM = 9223372036854775807

# Deterministic Miller-Rabin base sets: below 2^32, below 1122004669633, and
# for every 64-bit input.
cdef uint64_t SMALL_P[7]
for _i, _b in enumerate((2, 3, 5, 7, 11, 13, 17)):
    SMALL_P[_i] = _b
cdef uint64_t MR_SMALL[3]
cdef uint64_t MR_MID[4]
cdef uint64_t MR_FULL[7]
for _i, _b in enumerate((2, 7, 61)):
    MR_SMALL[_i] = _b
for _i, _b in enumerate((2, 13, 23, 1662803)):
    MR_MID[_i] = _b
for _i, _b in enumerate((2, 325, 9375, 28178, 450775, 9780504, 1795265022)):
    MR_FULL[_i] = _b


cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) noexcept nogil:
    if m <= <uint64_t>0xFFFFFFFF:
        return (a * b) % m
    return <uint64_t>((<rs_u128>a * b) % m)


cdef uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1
    a %= m
    while e:
        if e & 1:
            r = mulmod(r, a, m)
        a = mulmod(a, a, m)
        e >>= 1
    return r


# Montgomery arithmetic modulo an odd n < 2^63 with R = 2^64.
ctypedef struct Mont:
    uint64_t n
    uint64_t nneg   # -n^-1 mod 2^64
    uint64_t one    # R mod n


cdef inline Mont mont_init(uint64_t n) noexcept nogil:
    cdef Mont M
    cdef uint64_t x = n
    cdef int i
    for i in range(5):
        x *= 2 - n * x
    M.n = n
    M.nneg = <uint64_t>0 - x
    M.one = <uint64_t>(((<rs_u128>1) << 64) % n)
    return M


cdef inline uint64_t mont_mul(uint64_t a, uint64_t b, const Mont* M) noexcept nogil:
    cdef rs_u128 t = <rs_u128>a * b
    cdef uint64_t m = <uint64_t>t * M.nneg
    cdef uint64_t u = <uint64_t>((t + <rs_u128>m * M.n) >> 64)
    return u - M.n if u >= M.n else u


cdef inline uint64_t to_mont(uint64_t a, const Mont* M) noexcept nogil:
    return <uint64_t>(((<rs_u128>a) << 64) % M.n)


cdef uint64_t mont_pow(uint64_t a, uint64_t e, const Mont* M) noexcept nogil:
    cdef uint64_t r = M.one
    while e:
        if e & 1:
            r = mont_mul(r, a, M)
        a = mont_mul(a, a, M)
        e >>= 1
    return r


cdef inline uint64_t gcd_u64(uint64_t a, uint64_t b) noexcept nogil:
    cdef int shift
    cdef uint64_t t
    if a == 0:
        return b
    if b == 0:
        return a
    shift = ctz64(a | b)
    a >>= ctz64(a)
    while b:
        b >>= ctz64(b)
        if a > b:
            t = a
            a = b
            b = t
        b -= a
    return a << shift


cdef inline uint64_t absdiff(uint64_t a, uint64_t b) noexcept nogil:
    return a - b if a > b else b - a


cdef int _mr_small(uint64_t n, uint64_t d, int s) noexcept nogil:
    cdef int i, j
    cdef uint64_t x, a
    for i in range(3):
        a = MR_SMALL[i] % n
        if a == 0:
            continue
        x = powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for j in range(s - 1):
            x = mulmod(x, x, n)
            if x == n - 1:
                break
        else:
            return 0
    return 1


cdef int _mr_mont(uint64_t n, uint64_t d, int s, const uint64_t* bases, int nb) noexcept nogil:
    cdef Mont M = mont_init(n)
    cdef uint64_t minus_one = n - M.one
    cdef uint64_t x, a
    cdef int i, j
    for i in range(nb):
        a = bases[i] % n
        if a == 0:
            continue
        x = mont_pow(to_mont(a, &M), d, &M)
        if x == M.one or x == minus_one:
            continue
        for j in range(s - 1):
            x = mont_mul(x, x, &M)
            if x == minus_one:
                break
        else:
            return 0
    return 1


cdef int is_prime_u64(uint64_t n) noexcept nogil:
    cdef int i, s = 0
    cdef uint64_t d
    if n < 2:
        return 0
    for i in range(7):
        if n % SMALL_P[i] == 0:
            return n == SMALL_P[i]
    if n < 289:
        return 1
    d = n - 1
    while d % 2 == 0:
        d //= 2
        s += 1
    if n <= <uint64_t>0xFFFFFFFF:
        return _mr_small(n, d, s)
    if n < <uint64_t>1122004669633:
        return _mr_mont(n, d, s, MR_MID, 4)
    return _mr_mont(n, d, s, MR_FULL, 7)


cdef inline uint64_t splitmix(uint64_t* state) noexcept nogil:
    cdef uint64_t z
    state[0] += <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t n) noexcept nogil:
    a += b
    return a - n if a >= n else a


cdef uint64_t pollard_brent(uint64_t n, uint64_t* state) noexcept nogil:
    """Nontrivial divisor of an odd composite n; iterates y -> y*y/R + c in Montgomery form."""
    cdef Mont M = mont_init(n)
    cdef uint64_t y, c, x, ys, q, g, r, k, i, lim
    cdef uint64_t m = 128
    while True:
        y = splitmix(state) % (n - 1) + 1
        c = splitmix(state) % (n - 1) + 1
        g = 1
        r = 1
        q = M.one
        x = y
        ys = y
        while g == 1:
            x = y
            for i in range(r):
                y = addmod(mont_mul(y, y, &M), c, n)
            k = 0
            while k < r and g == 1:
                ys = y
                lim = m if m < r - k else r - k
                for i in range(lim):
                    y = addmod(mont_mul(y, y, &M), c, n)
                    q = mont_mul(q, absdiff(x, y), &M)
                g = gcd_u64(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = addmod(mont_mul(ys, ys, &M), c, n)
                g = gcd_u64(absdiff(x, ys), n)
        if g != n:
            return g


cdef inline uint64_t isqrt_u64(uint64_t n) noexcept nogil:
    cdef uint64_t s = <uint64_t>sqrt(<double>n)
    while s * s > n:
        s -= 1
    while (s + 1) * (s + 1) <= n:
        s += 1
    return s


cdef inline void add_factor(uint64_t p, int e, uint64_t* ps, int* es, int* cnt) noexcept nogil:
    cdef int i
    for i in range(cnt[0]):
        if ps[i] == p:
            es[i] += e
            return
    ps[cnt[0]] = p
    es[cnt[0]] = e
    cnt[0] += 1


cdef int factor_u64(uint64_t m, int nprimes, uint64_t seed, uint64_t* ps, int* es) noexcept nogil:
    """Distinct prime factors of m >= 1 into ps/es; returns their count."""
    cdef int cnt = 0, i, e, top
    cdef uint64_t p, limit = 2, c, d, root
    cdef uint64_t stack[MAXSTACK]
    cdef uint64_t state = seed
    if nprimes > 0 and m % 2 == 0:
        e = ctz64(m)
        m >>= e
        ps[0] = 2
        es[0] = e
        cnt = 1
    for i in range(1, nprimes):
        p = PRIMES[i]
        if p * p > m or p > CHECKPOINT:
            # composite cofactors go straight to rho from here
            limit = p
            break
        if m * PINV[i] <= PLIM[i]:
            e = 0
            while m * PINV[i] <= PLIM[i]:
                m *= PINV[i]
                e += 1
            ps[cnt] = p
            es[cnt] = e
            cnt += 1
        limit = p
    if m == 1:
        return cnt
    if m < limit * limit or is_prime_u64(m):
        add_factor(m, 1, ps, es, &cnt)
        return cnt
    stack[0] = m
    top = 1
    while top:
        top -= 1
        c = stack[top]
        if is_prime_u64(c):
            add_factor(c, 1, ps, es, &cnt)
            continue
        root = isqrt_u64(c)
        if root * root == c:
            stack[top] = root
            stack[top + 1] = root
            top += 2
            continue
        d = pollard_brent(c, &state)
        stack[top] = d
        stack[top + 1] = c // d
        top += 2
    return cnt


cdef inline int eval_i64(const int64_t* coeffs, int deg, int64_t n, int64_t* out) noexcept nogil:
    cdef rs_i128 acc = 0
    cdef int j
    for j in range(deg, -1, -1):
        acc = acc * n + coeffs[j]
        if acc > I64_LIM or acc < -I64_LIM:
            return 0
    out[0] = <int64_t>acc
    return 1


cdef inline uint64_t abs_u64(int64_t v) noexcept nogil:
    return <uint64_t>(-v) if v < 0 else <uint64_t>v


cdef inline int find(uint64_t p, const uint64_t* ps, int cnt) noexcept nogil:
    cdef int i
    for i in range(cnt):
        if ps[i] == p:
            return i
    return -1


cdef int row_stats(const int64_t* coeffs, const int* degs, const int* eidx, int r,
                   uint64_t p0, const int64_t* fco, int fdeg, int64_t n,
                   int nprimes, uint64_t seed, int64_t* row) noexcept nogil:
    cdef int64_t vals[MAXR]
    cdef uint64_t ps[MAXR][MAXF]
    cdef int es[MAXR][MAXF]
    cdef int cnt[MAXR]
    cdef uint64_t fps[MAXF]
    cdef int fes[MAXF]
    cdef int i, j, k, l, fcnt, hits, seen, pos
    cdef int64_t fv, omega_pe = 0, correction = 0, crit_big = 0, small_div = 0
    cdef int64_t oracle_ram, oracle_small
    cdef uint64_t p, kabs
    cdef int ksign
    for i in range(r):
        if not eval_i64(coeffs + i * (MAXDEG + 1), degs[i], n, &vals[i]):
            return ROW_OVERFLOW
    if fdeg >= 0:
        if not eval_i64(fco, fdeg, n, &fv):
            return ROW_OVERFLOW
    for i in range(r):
        if vals[i] == 0:
            row[0] = ROW_BRANCH
            for j in range(1, 8):
                row[j] = 0
            row[5] = -1
            return ROW_BRANCH
    for i in range(r):
        cnt[i] = factor_u64(abs_u64(vals[i]), nprimes, seed, ps[i], es[i])
        for j in range(cnt[i]):
            if es[i][j] % eidx[i] == 0:
                correction += 1
    for i in range(r):
        for j in range(cnt[i]):
            p = ps[i][j]
            seen = 0
            for k in range(i):
                if find(p, ps[k], cnt[k]) >= 0:
                    seen = 1
                    break
            if seen:
                continue
            omega_pe += 1
            if p <= p0:
                small_div += 1
                continue
            hits = 0
            for k in range(r):
                pos = find(p, ps[k], cnt[k])
                if pos >= 0 and es[k][pos] % eidx[k] != 0:
                    hits += 1
            if hits > 1:
                return ROW_INCONSISTENT
            crit_big += hits
    oracle_ram = -1
    oracle_small = 0
    row[7] = 0
    if fdeg >= 0:
        fcnt = factor_u64(abs_u64(fv), nprimes, seed, fps, fes)
        kabs = 1
        oracle_ram = 0
        for l in range(fcnt):
            if fes[l] % 2:
                kabs *= fps[l]
                if fps[l] != 2:
                    oracle_ram += 1
                    if fps[l] <= p0:
                        oracle_small += 1
        ksign = -1 if fv < 0 else 1
        # 2 ramifies iff the squarefree kernel is not 1 mod 4
        if (ksign > 0 and kabs % 4 != 1) or (ksign < 0 and kabs % 4 != 3):
            oracle_ram += 1
            if 2 <= p0:
                oracle_small += 1
        row[7] = 1 if (ksign > 0 and kabs == 1) else 0
    row[0] = ROW_OK
    row[1] = omega_pe
    row[2] = correction
    row[3] = crit_big
    row[4] = small_div
    row[5] = oracle_ram
    row[6] = oracle_small
    return ROW_OK


def _prime_count(trial_bound):
    return int(np.searchsorted(primes_up_to(TABLE_LIMIT), min(int(trial_bound), TABLE_LIMIT), side="right"))


def _pack(orbits):
    r = len(orbits)
    coeffs = np.zeros((max(r, 1), MAXDEG + 1), dtype=np.int64)
    degs = np.zeros(max(r, 1), dtype=np.intc)
    for i, c in enumerate(orbits):
        if len(c) - 1 > MAXDEG:
            raise OverflowError("degree too large for the compiled kernel")
        coeffs[i, : len(c)] = c
        degs[i] = len(c) - 1
    return coeffs, degs


def evaluate_block(orbits, ram_indices, p0, f, n_start, n_stop,
                   trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """Rows for ``n_start <= n < n_stop``; see ``ramstat._kernel_py`` for the columns."""
    cdef Py_ssize_t count = max(n_stop - n_start, 0)
    try:
        if len(orbits) > MAXR or p0 >= 2**63 or n_start < -2**62 or n_stop > 2**62:
            raise OverflowError
        coeffs_a, degs_a = _pack(orbits)
        eidx_a = np.asarray(ram_indices, dtype=np.intc)
        if f is None:
            f_a = np.zeros(1, dtype=np.int64)
            fdeg = -1
        else:
            if len(f) - 1 > MAXDEG:
                raise OverflowError
            f_a = np.asarray(f, dtype=np.int64)
            fdeg = len(f) - 1
    except OverflowError:
        return _kernel_py.evaluate_block(orbits, ram_indices, p0, f, n_start, n_stop, trial_bound, seed)

    out = np.zeros((count, 8), dtype=np.int64)
    cdef int64_t[:, ::1] out_v = out
    cdef int64_t[:, ::1] co_v = coeffs_a
    cdef int[::1] degs_v = degs_a
    cdef int[::1] eidx_v = eidx_a
    cdef int64_t[::1] f_v = f_a
    cdef int r = len(orbits)
    cdef uint64_t c_p0 = p0
    cdef int c_fdeg = fdeg
    cdef int nprimes = _prime_count(trial_bound)
    cdef uint64_t c_seed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t base = n_start
    cdef Py_ssize_t i
    cdef int code
    for i in range(count):
        code = row_stats(&co_v[0, 0], &degs_v[0], &eidx_v[0], r, c_p0, &f_v[0], c_fdeg,
                         base + i, nprimes, c_seed, &out_v[i, 0])
        if code == ROW_OVERFLOW:
            out[i] = _kernel_py.eval_one(orbits, ram_indices, p0, f, n_start + i, trial_bound, seed)
        elif code == ROW_INCONSISTENT:
            # re-run in Python for the detailed message
            _kernel_py.eval_one(orbits, ram_indices, p0, f, n_start + i, trial_bound, seed)
            raise ConsistencyError(f"criterion uniqueness violated at n={n_start + i}; p0={p0} is too small")
    return out


def m_a_block(coeffs, a, n_start, n_stop, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """``m_a(|P(n)|)`` for ``n_start <= n < n_stop``; -1 where ``P(n) = 0``."""
    cdef Py_ssize_t count = max(n_stop - n_start, 0)
    try:
        if n_start < -2**62 or n_stop > 2**62 or a < 1:
            raise OverflowError
        packed, degs = _pack([coeffs])
    except OverflowError:
        return _kernel_py.m_a_block(coeffs, a, n_start, n_stop, trial_bound, seed)
    out = np.zeros(count, dtype=np.int64)
    cdef int64_t[::1] out_v = out
    cdef int64_t[:, ::1] co_v = packed
    cdef int deg = degs[0]
    cdef int c_a = a
    cdef int nprimes = _prime_count(trial_bound)
    cdef uint64_t c_seed = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t ps[MAXF]
    cdef int es[MAXF]
    cdef int64_t v, base = n_start
    cdef int cnt, j, m
    cdef Py_ssize_t i
    for i in range(count):
        if not eval_i64(&co_v[0, 0], deg, base + i, &v):
            out_v[i] = _kernel_py.m_a_one(coeffs, a, n_start + i, trial_bound, seed)
            continue
        if v == 0:
            out_v[i] = -1
            continue
        cnt = factor_u64(abs_u64(v), nprimes, c_seed, ps, es)
        m = 0
        for j in range(cnt):
            if es[j] % c_a == 0:
                m += 1
        out_v[i] = m
    return out


def factor_int(m, trial_bound=DEFAULT_TRIAL_BOUND, seed=DEFAULT_SEED):
    """Factorization entries of a positive integer as a sorted list of pairs."""
    if m < 1 or m >= 2**63:
        return _kernel_py.factor_int(m, trial_bound, seed)
    cdef uint64_t ps[MAXF]
    cdef int es[MAXF]
    cdef int cnt = factor_u64(<uint64_t>m, _prime_count(trial_bound), <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF), ps, es)
    return sorted((int(ps[i]), int(es[i])) for i in range(cnt))
