"""Experiment configuration: JSON file, command-line overrides, validation."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace

from ..arith import DEFAULT_SEED, DEFAULT_TRIAL_BOUND
from ..cover import CoverSpec, cover_from_dict
from ..errors import ConfigError, RamstatError
from ..ramify import MODES, POLICIES, default_policy

EXPERIMENTS = ("ram", "moments", "cdf", "density", "normal-order", "lemma5-audit", "lemma6", "halberstam")
FILTERS = ("all", "hilbert")
FORMATS = ("csv", "json")
DEFAULT_CHUNK = 1 << 16
DEFAULT_GRID = [x / 2 for x in range(-6, 7)]
_MOMENT_LIKE = {"moments", "cdf", "halberstam", "normal-order"}


@dataclass
class ExperimentConfig:
    cover: dict
    N: int = 1000
    k_max: int = 8
    k: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    mode: str = "criterion"
    small_prime_policy: str | None = None
    filter: str = "all"
    experiments: list[str] = field(default_factory=lambda: ["moments"])
    seed: int = DEFAULT_SEED
    workers: int = 1
    output: str = "csv"
    out_path: str | None = None
    chunk_size: int = DEFAULT_CHUNK
    trial_bound: int = DEFAULT_TRIAL_BOUND
    C: int = 1
    eps: float = 0.5
    a: int = 2
    poly: list[int] | None = None
    grid: list[float] = field(default_factory=lambda: list(DEFAULT_GRID))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResolvedConfig:
    """A validated configuration together with its built cover."""

    config: ExperimentConfig
    spec: CoverSpec
    policy: str


def _fail(name: str, msg: str):
    raise ConfigError(f"config.{name}: {msg}")


def _posint(name, v, minimum=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        _fail(name, f"must be an integer >= {minimum}, got {v!r}")


def default_workers() -> int:
    raw = os.environ.get("RAMSTAT_WORKERS")
    if raw is None:
        return 1
    try:
        w = int(raw)
    except ValueError:
        raise ConfigError(f"RAMSTAT_WORKERS: expected a positive integer, got {raw!r}") from None
    if w < 1:
        raise ConfigError(f"RAMSTAT_WORKERS: expected a positive integer, got {raw!r}")
    return w


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    """Read a JSON config (if any) and apply non-``None`` overrides on top."""
    data: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    for key in data:
        if key not in known:
            raise ConfigError(f"config.{key}: unknown field")
    data.setdefault("workers", default_workers())
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if "cover" not in data:
        raise ConfigError("config.cover: missing (give --config, --cover or --quadratic-f)")
    return ExperimentConfig(**data)


def validate(cfg: ExperimentConfig) -> ResolvedConfig:
    """Check every field; raise :class:`ConfigError` naming the offending one."""
    try:
        spec = cover_from_dict(cfg.cover)
    except RamstatError as exc:
        raise ConfigError(f"config.cover: {exc}") from None
    except (TypeError, AttributeError) as exc:
        raise ConfigError(f"config.cover: malformed ({exc})") from None
    _posint("N", cfg.N)
    _posint("k_max", cfg.k_max)
    _posint("workers", cfg.workers)
    _posint("chunk_size", cfg.chunk_size)
    _posint("trial_bound", cfg.trial_bound, 2)
    if not isinstance(cfg.k, list) or not cfg.k:
        _fail("k", "must be a nonempty list of integers")
    for k in cfg.k:
        _posint("k", k)
    if max(cfg.k) > cfg.k_max:
        cfg = replace(cfg, k_max=max(cfg.k))
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int):
        _fail("seed", f"must be an integer, got {cfg.seed!r}")
    if cfg.mode not in MODES:
        _fail("mode", f"must be one of {', '.join(MODES)}, got {cfg.mode!r}")
    if cfg.mode == "oracle" and not spec.is_quadratic:
        _fail("mode", "oracle mode requires the quadratic family")
    if cfg.mode == "superset" and spec.disc_poly is None:
        _fail("mode", "superset mode requires cover.disc_poly")
    policy = cfg.small_prime_policy or default_policy(spec)
    if policy not in POLICIES:
        _fail("small_prime_policy", f"must be one of {', '.join(POLICIES)}, got {policy!r}")
    if policy == "oracle" and not spec.is_quadratic:
        _fail("small_prime_policy", "the oracle policy requires the quadratic family")
    if cfg.filter not in FILTERS:
        _fail("filter", f"must be one of {', '.join(FILTERS)}, got {cfg.filter!r}")
    if cfg.filter == "hilbert" and not spec.is_quadratic:
        _fail("filter", "the hilbert filter requires the quadratic family")
    if not isinstance(cfg.experiments, list) or not cfg.experiments:
        _fail("experiments", "must be a nonempty list")
    for e in cfg.experiments:
        if e not in EXPERIMENTS:
            _fail("experiments", f"unknown experiment {e!r}; choose from {', '.join(EXPERIMENTS)}")
    if _MOMENT_LIKE & set(cfg.experiments) and cfg.N < 3:
        _fail("N", "must be at least 3 for moment experiments (loglog N must be positive)")
    if cfg.output not in FORMATS:
        _fail("output", f"must be csv or json, got {cfg.output!r}")
    if isinstance(cfg.C, bool) or not isinstance(cfg.C, int):
        _fail("C", f"must be an integer, got {cfg.C!r}")
    if not isinstance(cfg.eps, (int, float)) or isinstance(cfg.eps, bool) or not cfg.eps > 0:
        _fail("eps", f"must be a positive number, got {cfg.eps!r}")
    if "lemma6" in cfg.experiments:
        _posint("a", cfg.a, 2)
        if cfg.poly is not None and (not isinstance(cfg.poly, list) or not all(isinstance(c, int) for c in cfg.poly)):
            _fail("poly", "must be a list of integer coefficients")
    if not isinstance(cfg.grid, list) or not cfg.grid or sorted(cfg.grid) != cfg.grid:
        _fail("grid", "must be a nonempty ascending list of reals")
    return ResolvedConfig(cfg, spec, policy)
