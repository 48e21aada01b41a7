"""Chunked, parallel sweeps over ``1 <= n <= N`` and result emission.

``[1, N]`` is cut into contiguous chunks. Chunk ``i`` always goes to worker
``i % workers`` and every chunk produces its own exact accumulators, which the
coordinator merges in chunk order. Output bytes therefore do not depend on the
worker count.
"""
from __future__ import annotations

import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .. import __version__, kernel
from ..arith import eval_poly, omega, prime_pi
from ..cover import cover_from_dict, describe, product_poly
from ..errors import DomainError
from ..stats import MomentAccumulator, count_violations, finalize_moment, normal_cdf, normalization
from .config import ResolvedConfig
from .formatting import fmt_cell, fmt_real

RAM_HEADER = ("n", "ram", "omega_PE", "correction", "defect", "degenerate", "mode", "policy")
MOMENT_HEADER = ("N", "k", "statistic_name", "value", "gaussian_target", "r", "filter")
CDF_HEADER = ("a", "empirical", "limit", "abs_error")
SUMMARY_HEADER = ("N", "statistic_name", "parameter", "value")


@dataclass
class SweepParams:
    """Everything a worker needs; plain data so it pickles cheaply."""

    cover: dict
    mode: str
    policy: str
    filter: str
    k_max: int
    eps: float
    trial_bound: int
    seed: int
    keep_rows: bool
    m_a_poly: tuple[int, ...] | None
    a: int
    defect_bound: int | None = None


@dataclass
class ChunkResult:
    start: int
    stop: int
    ram: MomentAccumulator
    ram_hist: Counter
    ram_hist_all: Counter
    omega: MomentAccumulator
    abs_defect: MomentAccumulator
    max_abs_defect: int = 0
    defect_witness: int | None = None
    degenerate: int = 0
    branch: int = 0
    violations: int = 0
    defect_violations: int = 0
    m_a: MomentAccumulator | None = None
    m_1_sum: int = 0
    rows: np.ndarray | None = None


@dataclass
class SweepResult:
    N: int
    ram: MomentAccumulator
    ram_hist: Counter
    ram_hist_all: Counter
    omega: MomentAccumulator
    abs_defect: MomentAccumulator
    max_abs_defect: int
    defect_witness: int | None
    degenerate: int
    branch: int
    violations: int
    defect_violations: int
    m_a: MomentAccumulator | None
    m_1_sum: int
    rows: list[np.ndarray] = field(default_factory=list)


def chunk_bounds(N: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk_size, N + 1)) for s in range(1, N + 1, chunk_size)]


def _superset_values(disc_poly, start, stop) -> np.ndarray:
    out = np.empty(stop - start, dtype=np.int64)
    for i, n in enumerate(range(start, stop)):
        v = eval_poly(disc_poly, n)
        out[i] = omega(v) if v else -1
    return out


def run_chunk(params: SweepParams, start: int, stop: int) -> ChunkResult:
    """Evaluate one contiguous range and reduce it to exact accumulators."""
    spec = cover_from_dict(params.cover)
    f = list(spec.family.f) if spec.is_quadratic else None
    block = kernel.evaluate_block(
        spec.orbit_coeffs(), spec.ram_indices(), spec.p0, f, start, stop, params.trial_bound, params.seed
    )
    branch = block[:, kernel.STATUS] == kernel.STATUS_BRANCH
    crit = block[:, kernel.CRIT_BIG].copy()
    if params.policy == "oracle":
        crit += block[:, kernel.ORACLE_SMALL]
    elif params.policy == "include_superset":
        crit += block[:, kernel.SMALL_DIV]
    if params.mode == "criterion":
        ram = crit
    elif params.mode == "oracle":
        ram = block[:, kernel.ORACLE_RAM].copy()
    else:
        ram = _superset_values(spec.disc_poly, start, stop)
    ram[branch] = -1
    best = block[:, kernel.ORACLE_RAM] if spec.is_quadratic else crit
    omega_pe = block[:, kernel.OMEGA_PE]
    correction = block[:, kernel.CORRECTION]
    defect = best - omega_pe + correction
    degenerate = block[:, kernel.DEGENERATE].astype(bool) & ~branch
    keep = ~degenerate if params.filter == "hilbert" else np.ones(len(ram), dtype=bool)

    res = ChunkResult(
        start,
        stop,
        MomentAccumulator(params.k_max, params.filter),
        Counter(),
        Counter(),
        MomentAccumulator(params.k_max),
        MomentAccumulator(params.k_max),
    )
    res.ram.push_many(ram[keep])
    res.ram_hist.update(dict(zip(*map(np.ndarray.tolist, np.unique(ram[keep], return_counts=True)))))
    res.ram_hist_all.update(dict(zip(*map(np.ndarray.tolist, np.unique(ram, return_counts=True)))))
    ok = ~branch
    res.omega.push_many(omega_pe[ok])
    absd = np.abs(defect[ok])
    res.abs_defect.push_many(absd)
    if absd.size:
        idx = int(np.argmax(absd))
        res.max_abs_defect = int(absd[idx])
        res.defect_witness = int(np.arange(start, stop)[ok][idx])
        if params.defect_bound is not None:
            res.defect_violations = int(np.count_nonzero(absd > params.defect_bound))
    res.degenerate = int(np.count_nonzero(degenerate))
    res.branch = int(np.count_nonzero(branch))
    res.violations = count_violations(ram, params.eps, start, spec.r)
    if params.m_a_poly is not None:
        ma = kernel.m_a_block(list(params.m_a_poly), params.a, start, stop, params.trial_bound, params.seed)
        m1 = kernel.m_a_block(list(params.m_a_poly), 1, start, stop, params.trial_bound, params.seed)
        if np.any(ma < 0):
            bad = start + int(np.flatnonzero(ma < 0)[0])
            raise DomainError(f"m_a polynomial vanishes at n={bad}")
        res.m_a = MomentAccumulator(params.k_max)
        res.m_a.push_many(ma)
        res.m_1_sum = int(m1.sum())
    if params.keep_rows:
        defect_col = np.where(branch, 0, defect)
        res.rows = np.column_stack(
            [np.arange(start, stop), ram, omega_pe, correction, defect_col, degenerate.astype(np.int64), branch]
        ).astype(np.int64)
    return res


def _run_worker(params: SweepParams, bounds: list[tuple[int, int]]) -> list[ChunkResult]:
    return [run_chunk(params, s, e) for s, e in bounds]


def _merge(N: int, chunks: list[ChunkResult]) -> SweepResult:
    first = chunks[0]
    out = SweepResult(
        N, first.ram, Counter(), Counter(), first.omega, first.abs_defect, 0, None, 0, 0, 0, 0, first.m_a, 0
    )
    for i, c in enumerate(chunks):
        if i:
            out.ram = out.ram.merge(c.ram)
            out.omega = out.omega.merge(c.omega)
            out.abs_defect = out.abs_defect.merge(c.abs_defect)
            if c.m_a is not None:
                out.m_a = out.m_a.merge(c.m_a)
        out.ram_hist.update(c.ram_hist)
        out.ram_hist_all.update(c.ram_hist_all)
        if c.defect_witness is not None and (out.defect_witness is None or c.max_abs_defect > out.max_abs_defect):
            out.max_abs_defect, out.defect_witness = c.max_abs_defect, c.defect_witness
        out.degenerate += c.degenerate
        out.branch += c.branch
        out.violations += c.violations
        out.defect_violations += c.defect_violations
        out.m_1_sum += c.m_1_sum
        if c.rows is not None:
            out.rows.append(c.rows)
    return out


def sweep(params: SweepParams, N: int, chunk_size: int, workers: int = 1, chunks=None) -> SweepResult:
    """Run ``[1, N]`` with static chunk assignment; ``chunks`` overrides the partition."""
    bounds = chunks if chunks is not None else chunk_bounds(N, chunk_size)
    if workers <= 1 or len(bounds) <= 1:
        results = _run_worker(params, bounds)
    else:
        assigned = [bounds[w::workers] for w in range(workers)]
        assigned = [a for a in assigned if a]
        with ProcessPoolExecutor(max_workers=len(assigned)) as pool:
            futures = [pool.submit(_run_worker, params, a) for a in assigned]
            per_worker = [fut.result() for fut in futures]
        results = [None] * len(bounds)
        for w, res in enumerate(per_worker):
            for j, r in enumerate(res):
                results[w + j * len(assigned)] = r
    return _merge(N, results)


# -- tables -------------------------------------------------------------------


@dataclass
class Table:
    name: str
    header: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt_cell(x) for x in row) + "\n")
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        def conv(x):
            s = fmt_cell(x)
            if isinstance(x, (float, np.floating)):
                return float(s)
            if isinstance(x, (bool, int, np.integer)):
                return int(s)
            return x

        return {"columns": list(self.header), "rows": [[conv(x) for x in row] for row in self.rows]}


def cdf_table(hist: Counter, r: int, N: int, grid) -> tuple[float, Table]:
    """Empirical CDF of ``(x - c)/s`` from a value histogram, over ``N``."""
    c, s = normalization(r, N)
    values = sorted(hist)
    cum = np.cumsum([hist[v] for v in values]) if values else np.zeros(0)
    table = Table("cdf", CDF_HEADER)
    for a in grid:
        cut = math.floor(c + s * Decimal(repr(float(a))))
        idx = int(np.searchsorted(values, cut, side="right"))
        emp = float(cum[idx - 1]) / N if idx else 0.0
        lim = normal_cdf(a)
        table.rows.append((float(a), emp, lim, abs(emp - lim)))
    ks = max(row[3] for row in table.rows)
    return ks, table


def build_tables(rc: ResolvedConfig, res: SweepResult) -> list[Table]:
    cfg, spec = rc.config, rc.spec
    N, r = cfg.N, spec.r
    exps = set(cfg.experiments)
    tables: list[Table] = []
    summary = Table("summary", SUMMARY_HEADER)
    if "ram" in exps:
        t = Table("ram", RAM_HEADER)
        for block in res.rows:
            for n, ram, om, corr, d, deg, br in block.tolist():
                t.rows.append((n, ram, om, corr, None if br else d, deg, cfg.mode, rc.policy))
        tables.append(t)
    if "moments" in exps:
        t = Table("moments", MOMENT_HEADER)
        for k in cfg.k:
            rep = finalize_moment(res.ram, k, r, N)
            t.rows.append((N, k, "ram", rep.normalized_moment, rep.gaussian_target, r, cfg.filter))
        tables.append(t)
    if "halberstam" in exps:
        t = Table("halberstam", MOMENT_HEADER)
        for k in cfg.k:
            rep = finalize_moment(res.omega, k, r, N, statistic="omega_PE")
            t.rows.append((N, k, "omega_PE", rep.normalized_moment, rep.gaussian_target, r, "all"))
        tables.append(t)
        c, _ = normalization(r, N)
        mean = res.omega.power_sums[1] / N
        summary.rows.append((N, "omega_PE_mean", "", mean))
        summary.rows.append((N, "omega_PE_mean_minus_r_loglog_N", "", mean - float(c)))
    if "cdf" in exps:
        ks, t = cdf_table(res.ram_hist, r, N, cfg.grid)
        tables.append(t)
        summary.rows.append((N, "ks_distance", cfg.filter, ks))
    if cfg.filter == "hilbert":
        summary.rows.append((N, "hilbert_degenerate_count", "", res.degenerate))
    if "density" in exps:
        below = sum(cnt for v, cnt in res.ram_hist_all.items() if v <= cfg.C)
        summary.rows.append((N, "density_below", f"C={cfg.C}", below / N))
    if "normal-order" in exps:
        summary.rows.append((N, "normal_order_violations", f"eps={fmt_real(cfg.eps)}", res.violations / N))
    if "lemma5-audit" in exps:
        summary.rows.append((N, "max_abs_defect", f"witness_n={res.defect_witness}", res.max_abs_defect))
        if spec.is_quadratic:
            bound = 1 + prime_pi(spec.p0)
            summary.rows.append((N, "defect_bound", "1+pi(p0)", bound))
            summary.rows.append((N, "defect_bound_violations", f"bound={bound}", res.defect_violations))
        for k in cfg.k:
            summary.rows.append((N, "mean_abs_defect_pow", f"k={k}", res.abs_defect.power_sums[k] / N))
    if "lemma6" in exps:
        for k in cfg.k:
            summary.rows.append((N, "m_a_power_mean", f"a={cfg.a};k={k}", res.m_a.power_sums[k] / N))
        summary.rows.append((N, "omega_P_mean", "a=1", res.m_1_sum / N))
    summary.rows.append((N, "branch_points", "", res.branch))
    tables.append(summary)
    return tables


def make_params(rc: ResolvedConfig) -> SweepParams:
    cfg, spec = rc.config, rc.spec
    poly = None
    if "lemma6" in cfg.experiments:
        poly = tuple(cfg.poly) if cfg.poly is not None else product_poly(spec)
    return SweepParams(
        cover=cfg.cover,
        mode=cfg.mode,
        policy=rc.policy,
        filter=cfg.filter,
        k_max=cfg.k_max,
        eps=float(cfg.eps),
        trial_bound=cfg.trial_bound,
        seed=cfg.seed,
        keep_rows="ram" in cfg.experiments,
        m_a_poly=poly,
        a=cfg.a,
        defect_bound=1 + prime_pi(spec.p0) if spec.is_quadratic else None,
    )


@dataclass
class RunOutput:
    tables: list[Table]
    manifest: dict
    files: dict[str, str]


def render(tables: list[Table], fmt: str) -> dict[str, str]:
    """File name -> contents."""
    if fmt == "json":
        obj = {t.name: t.to_json_obj() for t in tables}
        return {"results.json": json.dumps(obj, indent=1, sort_keys=True) + "\n"}
    return {f"{t.name}.csv": t.to_csv() for t in tables}


def run(rc: ResolvedConfig) -> RunOutput:
    """Execute a validated config. Nothing is written if any chunk fails."""
    cfg, spec = rc.config, rc.spec
    t0 = time.perf_counter()
    res = sweep(make_params(rc), cfg.N, cfg.chunk_size, cfg.workers)
    tables = build_tables(rc, res)
    files = render(tables, cfg.output)
    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "cover": describe(spec),
        "p0": spec.p0,
        "r": spec.r,
        "irreducibility_certified": spec.certified,
        "small_prime_policy": rc.policy,
        "seed": cfg.seed,
        "kernel_backend": kernel.BACKEND,
        "python": platform.python_version(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "files": {name: hashlib.sha256(body.encode()).hexdigest() for name, body in sorted(files.items())},
    }
    for t in tables:
        if t.name == "summary":
            for row in t.rows:
                if row[1] == "ks_distance":
                    manifest["ks_distance"] = float(fmt_real(row[3]))
    return RunOutput(tables, manifest, files)


def write(out: RunOutput, out_path: str | None, stream=None) -> None:
    """Write result files and the manifest to ``out_path``, or the tables to ``stream``."""
    if out_path is None:
        stream = stream or sys.stdout
        many = len(out.files) > 1
        for name, body in out.files.items():
            if many:
                stream.write(f"# {name}\n")
            stream.write(body)
        return
    os.makedirs(out_path, exist_ok=True)
    staged = dict(out.files)
    staged["manifest.json"] = json.dumps(out.manifest, indent=1, sort_keys=True) + "\n"
    for name, body in staged.items():
        tmp = os.path.join(out_path, f".{name}.tmp")
        with open(tmp, "w", newline="") as fh:
            fh.write(body)
        os.replace(tmp, os.path.join(out_path, name))


__all__ = ["run", "sweep", "write", "run_chunk", "chunk_bounds", "SweepParams", "SweepResult", "Table"]
