"""Exception hierarchy shared across the package."""


class RamstatError(Exception):
    """Base class for all package errors."""


class DomainError(RamstatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidOrbitError(DomainError):
    """A branch orbit polynomial violates a structural requirement."""


class OrbitCollisionError(DomainError):
    """Two branch orbits share a common factor over Q."""


class FactorizationError(DomainError):
    """A polynomial could not be split into certified irreducible factors."""


class BranchPointError(DomainError):
    """The requested specialization point is a branch point."""


class UnsupportedError(RamstatError):
    """The operation is not available for this cover family."""


class ConsistencyError(RamstatError):
    """An internal consistency check failed during a sweep."""


class ConfigError(RamstatError):
    """Invalid experiment configuration."""
