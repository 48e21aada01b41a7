"""Counting ramified primes in the specialization of a cover at an integer.

Three ways to get the count:

* ``criterion``: above the good-prime threshold ``p0`` a prime ramifies iff
  exactly one orbit polynomial has a positive valuation there that is not a
  multiple of its ramification index. Below ``p0`` a small-prime policy decides.
* ``oracle``: exact answer for the quadratic family from the discriminant of
  ``Q(sqrt(f(n)))``.
* ``superset``: ``omega(Delta(n))`` for a discriminant polynomial ``Delta``,
  an upper bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from . import kernel
from .arith import DEFAULT_SEED, DEFAULT_TRIAL_BOUND, eval_poly, factor, is_square, omega, squarefree_kernel
from .cover import CoverSpec, is_branch_point
from .errors import BranchPointError, DomainError, UnsupportedError

MODES = ("criterion", "oracle", "superset")
POLICIES = ("oracle", "exclude", "include_superset")


@dataclass(frozen=True)
class RamRecord:
    n: int
    ram: int
    omega_PE: int
    correction: int
    mode: str
    small_prime_policy: str
    degenerate: bool
    branch_point: bool
    defect: int | None = None
    overcount_possible: bool = False


class OracleResult(NamedTuple):
    ram: int
    ramified_primes: tuple[int, ...]
    degenerate: bool


def default_policy(spec: CoverSpec) -> str:
    return "oracle" if spec.is_quadratic else "exclude"


def _check_policy(spec: CoverSpec, policy: str) -> None:
    if policy not in POLICIES:
        raise DomainError(f"unknown small-prime policy {policy!r}")
    if policy == "oracle" and not spec.is_quadratic:
        raise UnsupportedError("the oracle small-prime policy needs the quadratic family")


def ram_oracle_quadratic(f, n: int) -> OracleResult:
    """Ramified primes of ``Q(sqrt(f(n)))``.

    With ``m`` the squarefree kernel of ``f(n)``: every odd prime dividing
    ``m``, and 2 unless ``m = 1 mod 4``. ``m = 1`` is the degenerate case.
    """
    v = eval_poly(f, n)
    if v == 0:
        raise BranchPointError(f"f({n}) = 0")
    m = squarefree_kernel(v)
    if m == 1:
        return OracleResult(0, (), True)
    primes = [p for p in factor(m).primes if p != 2]
    if m % 4 != 1:
        primes.append(2)
    primes.sort()
    return OracleResult(len(primes), tuple(primes), False)


def _row(spec: CoverSpec, n: int, trial_bound: int, seed: int):
    f = list(spec.family.f) if spec.is_quadratic else None
    block = kernel.evaluate_block(spec.orbit_coeffs(), spec.ram_indices(), spec.p0, f, n, n + 1, trial_bound, seed)
    return block[0]


def _branch_record(n, mode, policy) -> RamRecord:
    return RamRecord(n, -1, 0, 0, mode, policy, False, True, None)


def record_from_row(spec: CoverSpec, n: int, row, mode: str, policy: str, superset_value: int | None = None) -> RamRecord:
    """Assemble a :class:`RamRecord` from one kernel row."""
    if row[kernel.STATUS] == kernel.STATUS_BRANCH:
        return _branch_record(n, mode, policy)
    crit = int(row[kernel.CRIT_BIG]) + small_prime_term(row, policy)
    best = int(row[kernel.ORACLE_RAM]) if spec.is_quadratic else crit
    if mode == "criterion":
        ram = crit
    elif mode == "oracle":
        ram = int(row[kernel.ORACLE_RAM])
    else:
        ram = superset_value
    omega_pe = int(row[kernel.OMEGA_PE])
    correction = int(row[kernel.CORRECTION])
    return RamRecord(
        n=n,
        ram=ram,
        omega_PE=omega_pe,
        correction=correction,
        mode=mode,
        small_prime_policy=policy,
        degenerate=bool(row[kernel.DEGENERATE]),
        branch_point=False,
        defect=best - omega_pe + correction,
        overcount_possible=(mode == "criterion" and policy == "include_superset"),
    )


def small_prime_term(row, policy: str) -> int:
    if policy == "oracle":
        return int(row[kernel.ORACLE_SMALL])
    if policy == "include_superset":
        return int(row[kernel.SMALL_DIV])
    return 0


def ram_criterion(spec: CoverSpec, n: int, policy: str | None = None, *,
                  trial_bound: int = DEFAULT_TRIAL_BOUND, seed: int = DEFAULT_SEED) -> RamRecord:
    """Ramified-prime count at ``n`` from the valuation criterion.

    Raises ``ConsistencyError`` if a prime above ``p0`` meets the criterion in
    more than one orbit.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    policy = policy or default_policy(spec)
    _check_policy(spec, policy)
    return record_from_row(spec, n, _row(spec, n, trial_bound, seed), "criterion", policy)


def ram_oracle_record(spec: CoverSpec, n: int, *, trial_bound: int = DEFAULT_TRIAL_BOUND,
                      seed: int = DEFAULT_SEED) -> RamRecord:
    if not spec.is_quadratic:
        raise UnsupportedError("oracle mode needs the quadratic family")
    return record_from_row(spec, n, _row(spec, n, trial_bound, seed), "oracle", "oracle")


def ram_upper_via_disc(spec: CoverSpec, n: int) -> int:
    """``omega(|Delta(n)|)``, an upper bound for the ramified-prime count."""
    if spec.disc_poly is None:
        raise UnsupportedError("cover has no discriminant polynomial")
    v = eval_poly(spec.disc_poly, n)
    if v == 0:
        raise BranchPointError(f"Delta({n}) = 0")
    return omega(v)


def ram_superset_record(spec: CoverSpec, n: int, policy: str | None = None) -> RamRecord:
    policy = policy or default_policy(spec)
    _check_policy(spec, policy)
    row = _row(spec, n, DEFAULT_TRIAL_BOUND, DEFAULT_SEED)
    if row[kernel.STATUS] == kernel.STATUS_BRANCH:
        return _branch_record(n, "superset", policy)
    return record_from_row(spec, n, row, "superset", policy, ram_upper_via_disc(spec, n))


def evaluate(spec: CoverSpec, n: int, mode: str = "criterion", policy: str | None = None) -> RamRecord:
    if mode == "criterion":
        return ram_criterion(spec, n, policy)
    if mode == "oracle":
        return ram_oracle_record(spec, n)
    if mode == "superset":
        return ram_superset_record(spec, n, policy)
    raise DomainError(f"unknown mode {mode!r}")


def defect_terms(spec: CoverSpec, n: int) -> tuple[int, int, int]:
    """``(omega(P_E(n)), sum_i m_{e_i}(P_i(n)), defect)``.

    The defect is ``Ram(n) - omega(P_E(n)) + sum_i m_{e_i}(P_i(n))`` with Ram
    taken from the oracle for the quadratic family and from the criterion
    (default policy) otherwise.
    """
    if is_branch_point(spec, n):
        raise BranchPointError(f"{n} is a branch point")
    rec = ram_criterion(spec, n)
    return rec.omega_PE, rec.correction, rec.defect


def is_hilbert_degenerate(spec: CoverSpec, n: int) -> bool:
    """True iff the specialization at ``n`` has a smaller group; quadratic family only."""
    if not spec.is_quadratic:
        raise UnsupportedError("degeneracy is only decidable for the quadratic family")
    v = eval_poly(spec.family.f, n)
    if v == 0:
        raise BranchPointError(f"f({n}) = 0")
    return is_square(v)
