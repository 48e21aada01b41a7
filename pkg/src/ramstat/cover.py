"""Branch data of a Galois cover of the projective line over Q.

A cover is described by its orbits of finite branch points: for each orbit an
irreducible integer polynomial whose roots are the orbit, together with the
common ramification index. Only branch points different from infinity are
recorded, so an odd-degree quadratic family ``Y^2 = f(T)`` has no orbit for
its branch point at infinity.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import polys
from .arith import eval_poly, largest_prime_factor
from .errors import DomainError, FactorizationError, InvalidOrbitError, OrbitCollisionError

CERTIFIED = "certified"
UNVERIFIED = "unverified"

_SAFE_INT = 2**53 - 1


@dataclass(frozen=True)
class BranchOrbit:
    coeffs: tuple[int, ...]
    ram_index: int
    irreducibility_status: str = UNVERIFIED
    certificate: object = field(default=None, compare=False)

    @property
    def leading_coeff(self) -> int:
        return self.coeffs[-1]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, n: int) -> int:
        return eval_poly(self.coeffs, n)


@dataclass(frozen=True)
class QuadraticFamily:
    """Tag for covers of the form ``Q(T, sqrt(f(T)))``."""

    f: tuple[int, ...]


@dataclass(frozen=True)
class CoverSpec:
    orbits: tuple[BranchOrbit, ...]
    p0: int
    family: QuadraticFamily | None = None
    group_order: int | None = None
    disc_poly: tuple[int, ...] | None = None

    @property
    def r(self) -> int:
        return len(self.orbits)

    @property
    def is_quadratic(self) -> bool:
        return self.family is not None

    @property
    def certified(self) -> bool:
        return all(o.irreducibility_status == CERTIFIED for o in self.orbits)

    def orbit_coeffs(self) -> list[list[int]]:
        return [list(o.coeffs) for o in self.orbits]

    def ram_indices(self) -> list[int]:
        return [o.ram_index for o in self.orbits]


def _as_pairs(orbits):
    for o in orbits:
        if isinstance(o, BranchOrbit):
            yield o.coeffs, o.ram_index
        else:
            coeffs, e = o
            yield tuple(coeffs), e


def p0_bound(orbits) -> int:
    """Conservative good-prime threshold for a list of orbits.

    Maximum of 2, the largest ramification index, and the largest prime factor
    of each leading coefficient, each orbit discriminant and each pairwise
    resultant. Primes above the result satisfy the valuation criterion.
    """
    pairs = [(polys.trim(c), e) for c, e in _as_pairs(orbits)]
    bound = 2
    for coeffs, e in pairs:
        bound = max(bound, e, largest_prime_factor(polys.lc(coeffs)))
        disc = polys.discriminant(coeffs)
        bound = max(bound, largest_prime_factor(disc))
    for (a, _), (b, _) in combinations(pairs, 2):
        res = polys.resultant(a, b)
        if res == 0:
            raise OrbitCollisionError(f"orbits {a} and {b} share a root")
        bound = max(bound, largest_prime_factor(res))
    return bound


def _certify(coeffs):
    try:
        cert = polys.irreducibility_certificate(coeffs)
    except DomainError as exc:
        raise InvalidOrbitError(f"orbit polynomial {coeffs} is reducible over Q") from exc
    return (CERTIFIED if cert is not None else UNVERIFIED), cert


def _make_orbit(coeffs, e) -> BranchOrbit:
    if isinstance(e, bool) or not isinstance(e, int) or e < 2:
        raise DomainError(f"ramification index must be an integer >= 2, got {e!r}")
    c = polys.trim(int(x) for x in coeffs)
    if polys.degree(c) < 1:
        raise InvalidOrbitError(f"orbit polynomial {list(coeffs)} is constant")
    if c[-1] < 0:
        c = polys.neg(c)
    if not polys.is_squarefree(c):
        raise InvalidOrbitError(f"orbit polynomial {list(c)} is not squarefree")
    status, cert = _certify(c)
    return BranchOrbit(c, e, status, cert)


def _family_constant_primes(f, orbit_polys) -> int:
    """Largest prime in the constant ``f / prod(P_i)``; rejects mismatches."""
    q = polys.exact_quotient(f, polys.product(orbit_polys))
    if q is None or polys.degree(q) != 0:
        raise InvalidOrbitError("quadratic f is not a constant multiple of the orbit product")
    lam = Fraction(q[0])
    return max(largest_prime_factor(lam.numerator), largest_prime_factor(lam.denominator))


def make_cover(orbits, *, family: QuadraticFamily | None = None, group_order=None, disc_poly=None) -> CoverSpec:
    """Validate branch orbits and build a :class:`CoverSpec`.

    ``orbits`` is a sequence of ``(coeffs, e)`` pairs with coefficients in
    ascending degree.
    """
    built = tuple(_make_orbit(c, e) for c, e in _as_pairs(orbits))
    if not built:
        raise DomainError("a cover nontrivial over Qbar has at least one branch orbit")
    for a, b in combinations(built, 2):
        if polys.degree(polys.gcd(a.coeffs, b.coeffs)) > 0:
            raise OrbitCollisionError(f"orbits {list(a.coeffs)} and {list(b.coeffs)} share a factor")
    p0 = p0_bound(built)
    if family is not None:
        f = polys.trim(int(x) for x in family.f)
        if any(o.ram_index != 2 for o in built):
            raise InvalidOrbitError("quadratic family requires every ramification index to be 2")
        p0 = max(p0, _family_constant_primes(f, [o.coeffs for o in built]))
        family = QuadraticFamily(f)
    if group_order is not None and group_order < 1:
        raise DomainError("group order must be positive")
    if disc_poly is not None:
        disc_poly = polys.trim(int(x) for x in disc_poly)
        if not disc_poly:
            raise DomainError("discriminant polynomial is zero")
    return CoverSpec(built, p0, family, group_order, disc_poly)


def split_rational_factors(f):
    """Split a squarefree integer polynomial into irreducible factors over Z.

    Linear factors come from rational roots; the remaining cofactor must be
    certifiably irreducible. Returns ``(factors, constant)`` with
    ``f == constant * prod(factors)``.
    """
    g = polys.primitive_part(f)
    factors = []
    for root in polys.rational_roots(g):
        lin = (-root.numerator, root.denominator)
        q = polys.exact_quotient(g, lin)
        g = polys.trim(int(x) for x in q)
        factors.append(lin)
    if polys.degree(g) >= 1:
        if polys.degree(g) > 3 and polys.irreducibility_certificate(g) is None:
            raise FactorizationError(
                f"cannot certify that {list(g)} is irreducible; supply the orbits explicitly"
            )
        factors.append(g)
    q = polys.exact_quotient(f, polys.product(factors))
    return factors, Fraction(q[0])


def make_quadratic_cover(f, *, disc_poly=None) -> CoverSpec:
    """Cover ``Q(T, sqrt(f(T)))``: one orbit per irreducible factor of ``f``, each with index 2."""
    f = polys.trim(int(x) for x in f)
    if polys.degree(f) < 1:
        raise DomainError("f must be nonconstant")
    if not polys.is_squarefree(f):
        raise DomainError(f"f = {list(f)} is not squarefree")
    factors, _ = split_rational_factors(f)
    return make_cover([(c, 2) for c in factors], family=QuadraticFamily(f), group_order=2, disc_poly=disc_poly)


def product_poly(spec: CoverSpec) -> tuple[int, ...]:
    return polys.product(o.coeffs for o in spec.orbits)


def is_branch_point(spec: CoverSpec, n: int) -> bool:
    return any(o(n) == 0 for o in spec.orbits)


# -- JSON ---------------------------------------------------------------------


def _enc(x: int):
    return x if abs(x) <= _SAFE_INT else str(x)


def _dec(x, where: str) -> int:
    if isinstance(x, bool):
        raise DomainError(f"{where}: expected integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError:
            pass
    raise DomainError(f"{where}: expected integer, got {x!r}")


def _dec_list(xs, where: str) -> list[int]:
    if not isinstance(xs, list):
        raise DomainError(f"{where}: expected a list of integers")
    return [_dec(x, where) for x in xs]


def cover_to_dict(spec: CoverSpec) -> dict:
    out: dict = {"orbits": [{"coeffs": [_enc(c) for c in o.coeffs], "e": o.ram_index} for o in spec.orbits]}
    if spec.family is not None:
        out["family"] = {"quadratic": {"f": [_enc(c) for c in spec.family.f]}}
    if spec.disc_poly is not None:
        out["disc_poly"] = [_enc(c) for c in spec.disc_poly]
    if spec.group_order is not None:
        out["group_order"] = spec.group_order
    return out


def cover_from_dict(data: dict) -> CoverSpec:
    """Inverse of :func:`cover_to_dict`; also accepts ``{"quadratic_f": [...]}``."""
    if not isinstance(data, dict):
        raise DomainError("cover: expected a JSON object")
    disc = data.get("disc_poly")
    disc = _dec_list(disc, "cover.disc_poly") if disc is not None else None
    if "quadratic_f" in data and "orbits" not in data:
        return make_quadratic_cover(_dec_list(data["quadratic_f"], "cover.quadratic_f"), disc_poly=disc)
    if "orbits" not in data:
        raise DomainError("cover: missing 'orbits'")
    orbits = []
    for i, o in enumerate(data["orbits"]):
        where = f"cover.orbits[{i}]"
        if not isinstance(o, dict) or "coeffs" not in o or "e" not in o:
            raise DomainError(f"{where}: expected {{'coeffs': [...], 'e': int}}")
        orbits.append((_dec_list(o["coeffs"], where + ".coeffs"), _dec(o["e"], where + ".e")))
    family = None
    fam = data.get("family")
    if fam is not None:
        if not isinstance(fam, dict) or "quadratic" not in fam:
            raise DomainError("cover.family: only the quadratic family is supported")
        family = QuadraticFamily(tuple(_dec_list(fam["quadratic"].get("f"), "cover.family.quadratic.f")))
    return make_cover(orbits, family=family, group_order=data.get("group_order"), disc_poly=disc)


def cover_to_json(spec: CoverSpec) -> str:
    return json.dumps(cover_to_dict(spec), sort_keys=True)


def cover_from_json(text: str) -> CoverSpec:
    return cover_from_dict(json.loads(text))


def describe(spec: CoverSpec) -> dict:
    """Summary used in run manifests and report headers."""
    return {
        "r": spec.r,
        "p0": spec.p0,
        "family": "quadratic" if spec.is_quadratic else "generic",
        "orbits": [
            {"coeffs": [_enc(c) for c in o.coeffs], "e": o.ram_index, "irreducibility": o.irreducibility_status}
            for o in spec.orbits
        ],
        "infinity_branch_point_excluded": bool(spec.is_quadratic and polys.degree(spec.family.f) % 2 == 1),
    }


__all__ = [
    "BranchOrbit",
    "CoverSpec",
    "QuadraticFamily",
    "make_cover",
    "make_quadratic_cover",
    "p0_bound",
    "product_poly",
    "is_branch_point",
    "cover_to_json",
    "cover_from_json",
]
