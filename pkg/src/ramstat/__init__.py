"""Ramified-prime statistics for specializations of Galois covers of the line."""
from .arith import factor, m_a, omega, squarefree_kernel
from .cover import CoverSpec, cover_from_json, cover_to_json, make_cover, make_quadratic_cover
from .errors import ConfigError, ConsistencyError, DomainError, RamstatError, UnsupportedError
from .ramify import RamRecord, evaluate, ram_criterion, ram_oracle_quadratic

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "CoverSpec",
    "DomainError",
    "RamRecord",
    "RamstatError",
    "UnsupportedError",
    "cover_from_json",
    "cover_to_json",
    "evaluate",
    "factor",
    "m_a",
    "make_cover",
    "make_quadratic_cover",
    "omega",
    "ram_criterion",
    "ram_oracle_quadratic",
    "squarefree_kernel",
]
