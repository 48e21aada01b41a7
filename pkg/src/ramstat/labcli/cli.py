"""Command-line entry point.

Exit codes: 0 success, 1 selftest failure, 2 configuration or usage error,
3 internal-consistency error (no result files are written).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from ..errors import ConfigError, ConsistencyError, RamstatError
from .config import EXPERIMENTS, ExperimentConfig, load_config, validate

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_CONSISTENCY = 3

SWEEP_COMMANDS = ("ram", "sweep", "moments", "cdf", "density", "normal-order", "lemma5-audit", "lemma6", "halberstam")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("cover")
    g.add_argument("--config", help="JSON experiment config")
    g.add_argument("--cover", help="cover JSON, inline or a file path")
    g.add_argument("--quadratic-f", type=_int_list, metavar="C0,C1,...",
                   help="quadratic family Y^2 = f(T), coefficients in ascending degree")
    o = p.add_argument_group("overrides")
    o.add_argument("--N", type=int)
    o.add_argument("--k", type=_int_list, metavar="K[,K...]", help="moment orders to report")
    o.add_argument("--k-max", dest="k_max", type=int)
    o.add_argument("--mode", choices=("criterion", "oracle", "superset"))
    o.add_argument("--policy", dest="small_prime_policy", choices=("oracle", "exclude", "include_superset"))
    o.add_argument("--filter", choices=("all", "hilbert"))
    o.add_argument("--workers", type=int)
    o.add_argument("--seed", type=int)
    o.add_argument("--out", dest="out_path", help="output directory (default: tables to stdout)")
    o.add_argument("--format", dest="output", choices=("csv", "json"))
    o.add_argument("--chunk-size", dest="chunk_size", type=int)
    o.add_argument("--trial-bound", dest="trial_bound", type=int)
    o.add_argument("--C", type=int, help="threshold for density")
    o.add_argument("--eps", type=float, help="tolerance for normal-order")
    o.add_argument("--a", type=int, help="exponent divisor a for the lemma6 experiment")
    o.add_argument("--poly", type=_int_list, metavar="C0,C1,...",
                   help="polynomial P for the lemma6 experiment (default P_E)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramstat", description="Ramified-prime statistics for specializations of covers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "ram": "ramified-prime count at one n (--n) or a RamRecord CSV for 1..N",
        "sweep": "run the experiments listed in the config",
        "moments": "normalized moments of Ram",
        "cdf": "empirical CDF against the standard normal",
        "density": "density of n with Ram(n) <= C",
        "normal-order": "fraction of n far from r loglog n",
        "lemma5-audit": "defect between Ram and omega(P_E) - sum m_e",
        "lemma6": "averages of m_a(P(n))^k",
        "halberstam": "normalized moments of omega(P_E(n))",
    }
    for name in SWEEP_COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        _common(p)
        if name == "ram":
            p.add_argument("--n", type=int, help="single specialization point")
    st = sub.add_parser("selftest", help="run every invariant suite")
    st.add_argument("--N", type=int, default=10**4)
    st.add_argument("--seed", type=int, default=None)
    st.add_argument("--mutate", choices=("oracle",), help=argparse.SUPPRESS)
    return parser


def _cover_arg(args) -> dict | None:
    if args.quadratic_f is not None:
        return {"quadratic_f": args.quadratic_f}
    if args.cover is None:
        return None
    text = args.cover
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--cover: not valid JSON ({exc})") from None


def config_from_args(args) -> ExperimentConfig:
    overrides = {
        key: getattr(args, key)
        for key in ExperimentConfig.__dataclass_fields__
        if key not in ("cover", "experiments") and getattr(args, key, None) is not None
    }
    overrides["cover"] = _cover_arg(args)
    if args.command != "sweep":
        overrides["experiments"] = [args.command]
    elif args.config is None:
        overrides["experiments"] = [e for e in EXPERIMENTS if e != "ram"]
    return load_config(args.config, overrides)


def _single_ram(rc, n: int) -> int:
    from ..ramify import evaluate

    cfg = rc.config
    rec = evaluate(rc.spec, n, cfg.mode, rc.policy)
    defect = "" if rec.defect is None else rec.defect
    print(
        f"ram={rec.ram} n={rec.n} mode={rec.mode} policy={rec.small_prime_policy} omega_PE={rec.omega_PE} "
        f"correction={rec.correction} defect={defect} degenerate={int(rec.degenerate)} "
        f"branch_point={int(rec.branch_point)}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest

        report = run_selftest(N=args.N, seed=args.seed, mutate=args.mutate)
        sys.stdout.write(report.render())
        return EXIT_OK if report.passed else EXIT_SELFTEST
    try:
        rc = validate(config_from_args(args))
        if args.command == "ram" and args.n is not None:
            if args.n < 1:
                raise ConfigError("--n: must be a positive integer")
            return _single_ram(rc, args.n)
        from .runner import run, write

        out = run(rc)
        write(out, rc.config.out_path)
    except ConfigError as exc:
        print(f"ramstat: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"ramstat: internal consistency error, results discarded: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except RamstatError as exc:
        print(f"ramstat: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
