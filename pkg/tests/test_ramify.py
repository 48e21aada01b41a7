import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ramstat.arith import eval_poly, m_a, omega, prime_pi
from ramstat.cover import make_cover, make_quadratic_cover
from ramstat.errors import BranchPointError, ConsistencyError, UnsupportedError
from ramstat.ramify import (
    evaluate,
    is_hilbert_degenerate,
    defect_terms,
    ram_criterion,
    ram_oracle_quadratic,
    ram_upper_via_disc,
)


def field_disc_primes(v):
    """Primes dividing the discriminant of Q(sqrt(v)), via sympy."""
    m = 1
    for p, e in sympy.factorint(v).items():
        if p == -1:
            m = -m
        elif e % 2:
            m *= p
    if m == 1:
        return []
    d = m if m % 4 == 1 else 4 * m
    return sorted(sympy.primefactors(d))


def test_oracle_examples():
    assert ram_oracle_quadratic((0, 1), 5).ram == 1
    assert ram_oracle_quadratic((0, 1), 3) == (2, (2, 3), False)
    assert ram_oracle_quadratic((0, 1), 4) == (0, (), True)
    assert ram_oracle_quadratic((0, 1), 12).ramified_primes == (2, 3)
    with pytest.raises(BranchPointError):
        ram_oracle_quadratic((0, 1), 0)


@given(st.integers(-10**9, 10**9).filter(bool))
def test_oracle_matches_field_discriminant(n):
    assert list(ram_oracle_quadratic((0, 1), n).ramified_primes) == field_disc_primes(n)


@pytest.mark.parametrize("f", [(0, 1), (1, 0, 1), (0, 1, 0, 1), (-2, 0, 0, 0, 0, 1), (3, 5, 0, 7)])
def test_criterion_matches_oracle(f):
    spec = make_quadratic_cover(f)
    for n in range(1, 600):
        if eval_poly(f, n) == 0:
            continue
        assert ram_criterion(spec, n).ram == ram_oracle_quadratic(f, n).ram, n


def test_criterion_examples():
    spec = make_quadratic_cover((0, 1))
    assert ram_criterion(spec, 5).ram == 1
    rec = ram_criterion(spec, 12)
    assert (rec.ram, rec.omega_PE, rec.correction, rec.defect) == (2, 2, 1, 1)
    rec = ram_criterion(spec, 4)
    assert rec.degenerate and rec.ram == 0 and rec.defect == 0


def test_branch_point_record():
    spec = make_quadratic_cover((0, 1, 0, 1))
    rec = evaluate(make_quadratic_cover((-4, 1)), 4)
    assert rec.branch_point and rec.ram == -1 and rec.defect is None
    assert not evaluate(spec, 1).branch_point


def test_policies():
    spec = make_quadratic_cover((0, 1))
    # n = 2: Q(sqrt 2) ramifies only at 2 = p0
    assert ram_criterion(spec, 2, "exclude").ram == 0
    assert ram_criterion(spec, 2, "oracle").ram == 1
    rec = ram_criterion(spec, 2, "include_superset")
    assert rec.ram == 1 and rec.overcount_possible
    generic = make_cover([((-2, 0, 0, 1), 3)])
    with pytest.raises(UnsupportedError):
        ram_criterion(generic, 5, "oracle")
    assert ram_criterion(generic, 5).small_prime_policy == "exclude"


def test_generic_criterion_by_hand():
    # T^3 - 2 with e = 3: above p0 = 3, p ramifies iff 3 does not divide v_p(n^3 - 2)
    spec = make_cover([((-2, 0, 0, 1), 3)])
    for n in range(2, 300):
        v = n**3 - 2
        expect = sum(1 for p, e in sympy.factorint(abs(v)).items() if p > 3 and e % 3)
        assert ram_criterion(spec, n).ram == expect


def test_modes():
    spec = make_quadratic_cover((0, 1), disc_poly=(0, 4))
    assert evaluate(spec, 15, "oracle").ram == 3  # 15 = 3 mod 4, so 2, 3, 5
    assert evaluate(spec, 15, "superset").ram == ram_upper_via_disc(spec, 15) == 3
    with pytest.raises(UnsupportedError):
        evaluate(make_cover([((-2, 0, 0, 1), 3)]), 5, "oracle")


@given(st.integers(1, 10**6))
def test_superset_is_upper_bound(n):
    spec = make_quadratic_cover((0, 1), disc_poly=(0, 4))
    assert ram_upper_via_disc(spec, n) >= ram_oracle_quadratic((0, 1), n).ram


@given(st.integers(1, 10**7))
def test_defect_terms_bounded(n):
    spec = make_quadratic_cover((0, 1))
    om, corr, defect = defect_terms(spec, n)
    assert om == omega(n)
    assert corr == m_a(n, 2)
    assert abs(defect) <= 1 + prime_pi(spec.p0)
    assert 0 <= corr <= om + spec.r


def test_hilbert_degenerate():
    spec = make_quadratic_cover((0, 1))
    assert sum(is_hilbert_degenerate(spec, n) for n in range(1, 101)) == 10
    assert not is_hilbert_degenerate(make_quadratic_cover((-5, 1)), 1)  # f(1) = -4
    with pytest.raises(UnsupportedError):
        is_hilbert_degenerate(make_cover([((-2, 0, 0, 1), 3)]), 2)


def test_consistency_error_when_p0_too_small():
    from ramstat import kernel

    # T and T + 3 both vanish mod 3; forcing p0 = 2 must trip the uniqueness check.
    with pytest.raises(ConsistencyError):
        kernel.evaluate_block([[0, 1], [3, 1]], [2, 2], 2, None, 3, 4)
