"""Monte Carlo coverage/length experiments and real-data scans.

Replicate ``r`` draws from its own generator seeded by
``SeedSequence(master_seed, spawn_key=(r,))``, and results are reduced in
replicate order, so output does not depend on the worker count.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import HeavyDist, sample, second_order, upper_quantile
from .errors import InvalidInputError, TailcrError
from .lr import lr_region, lr_stat
from .normal import cdf_expansion, normal_region, predicted_coverage
from .region import METHODS
from .special import chi2_1_quantile, two_sided_z
from .tail import hill, make_tail_sample, weissman_quantile
from .tilt import outer_solve, tilt_region

log = logging.getLogger(__name__)

THREADS_ENV = "TAILCR_THREADS"
DEFAULT_REPS = 2000
PAPER_REPS = 10_000


@dataclass
class ExperimentTable:
    """Column names plus rows of plain Python values (``nan`` for missing)."""

    columns: list
    rows: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def where(self, **conds):
        out = ExperimentTable(list(self.columns))
        idx = {c: self.columns.index(c) for c in conds}
        out.rows = [r for r in self.rows if all(r[idx[c]] == v for c, v in conds.items())]
        return out


@dataclass
class ExperimentConfig:
    dist: HeavyDist
    n: int
    reps: int
    p: float
    k_grid: list
    methods: tuple = METHODS
    level: float = 0.9
    master_seed: int = 0
    region_mode: str = "bisect"
    step: float = 0.1

    def __post_init__(self):
        self.k_grid = [int(k) for k in self.k_grid]
        self.methods = tuple(m.lower() for m in self.methods)
        if self.reps < 1:
            raise InvalidInputError("reps must be at least 1")
        if not self.k_grid:
            raise InvalidInputError("k grid is empty")
        bad = [k for k in self.k_grid if not 2 <= k < self.n]
        if bad:
            raise InvalidInputError(f"k values must satisfy 2 <= k < n={self.n}: {bad}")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown or not self.methods:
            raise InvalidInputError(f"methods must be a subset of {METHODS}, got {self.methods}")
        if not 0 < self.p < 1:
            raise InvalidInputError("p must lie in (0, 1)")
        if not 0 < self.level < 1:
            raise InvalidInputError("level must lie in (0, 1)")
        if self.region_mode not in ("bisect", "step"):
            raise InvalidInputError("region mode must be 'bisect' or 'step'")
        if self.region_mode == "step" and not self.step > 0:
            raise InvalidInputError("step must be positive")


def replicate_rng(master_seed, rep):
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(rep,)))


def worker_count():
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, env)
    return os.cpu_count() or 1


def _parallel_map(fn, cfg, reps, workers):
    """Apply ``fn(cfg, rep)`` over replicates, returning results in replicate order."""
    if workers is None:
        workers = worker_count()
    workers = max(1, min(workers, reps))
    if workers == 1:
        return [fn(cfg, r) for r in range(reps)]
    chunks = np.array_split(np.arange(reps), workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [(fn, cfg, list(c)) for c in chunks if len(c)])
        return [res for part in parts for res in part]


def _run_chunk(args):
    fn, cfg, reps = args
    return [fn(cfg, r) for r in reps]


def _covers(ts, cfg, method, x0, u):
    if method == "normal":
        return x0 in normal_region(ts, cfg.p, cfg.level)
    if method == "lr":
        return lr_stat(ts, cfg.p, x0).stat <= u
    return outer_solve(x0, ts, cfg.p).stat <= u


def _coverage_replicate(cfg, rep):
    """Per (k, method): 1 covered, 0 missed, -1 solver failure."""
    x = sample(cfg.dist, cfg.n, replicate_rng(cfg.master_seed, rep))
    x0 = upper_quantile(cfg.dist, cfg.p)
    u = chi2_1_quantile(cfg.level)
    out = np.zeros((len(cfg.k_grid), len(cfg.methods)), dtype=np.int8)
    for i, k in enumerate(cfg.k_grid):
        try:
            ts = make_tail_sample(x, k)
        except TailcrError:
            out[i, :] = -1
            continue
        for j, m in enumerate(cfg.methods):
            try:
                out[i, j] = 1 if _covers(ts, cfg, m, x0, u) else 0
            except TailcrError:
                out[i, j] = -1
    return out


def _region(ts, cfg, method):
    if method == "normal":
        return normal_region(ts, cfg.p, cfg.level)
    fn = lr_region if method == "lr" else tilt_region
    return fn(ts, cfg.p, cfg.level, mode=cfg.region_mode, step=cfg.step)


def _length_replicate(cfg, rep):
    """Per (k, method): region length, ``nan`` on failure."""
    x = sample(cfg.dist, cfg.n, replicate_rng(cfg.master_seed, rep))
    out = np.full((len(cfg.k_grid), len(cfg.methods)), np.nan)
    for i, k in enumerate(cfg.k_grid):
        try:
            ts = make_tail_sample(x, k)
        except TailcrError:
            continue
        for j, m in enumerate(cfg.methods):
            try:
                r = _region(ts, cfg, m)
            except TailcrError:
                continue
            if math.isfinite(r.lo) and math.isfinite(r.hi):
                out[i, j] = r.hi - r.lo
    return out


TABLE_COLUMNS = ["dist", "n", "p", "level", "seed", "reps", "k", "method",
                 "metric", "value", "se", "n_ok", "n_failed"]


def _echo(cfg):
    return [cfg.dist.label, cfg.n, cfg.p, cfg.level, cfg.master_seed, cfg.reps]


def run_coverage(cfg, workers=None):
    """Empirical coverage of each method's region for the true quantile.

    Membership for LR and tilt is decided by comparing the statistic at the
    true quantile with the critical value. Solver failures count as misses.
    """
    res = np.stack(_parallel_map(_coverage_replicate, cfg, cfg.reps, workers))
    table = ExperimentTable(list(TABLE_COLUMNS))
    for i, k in enumerate(cfg.k_grid):
        for j, m in enumerate(cfg.methods):
            col = res[:, i, j]
            failed = int(np.sum(col < 0))
            v = float(np.sum(col == 1)) / cfg.reps
            se = math.sqrt(v * (1.0 - v) / cfg.reps)
            table.rows.append(_echo(cfg) + [k, m, "coverage", v, se, cfg.reps - failed, failed])
    return table


def run_length(cfg, workers=None):
    """Mean region length per (k, method); failed regions are excluded and counted."""
    res = np.stack(_parallel_map(_length_replicate, cfg, cfg.reps, workers))
    table = ExperimentTable(list(TABLE_COLUMNS))
    for i, k in enumerate(cfg.k_grid):
        for j, m in enumerate(cfg.methods):
            col = res[:, i, j]
            ok = col[np.isfinite(col)]
            failed = cfg.reps - ok.size
            if ok.size:
                v = float(np.mean(ok))
                se = float(np.std(ok, ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else math.nan
            else:
                v = se = math.nan
            table.rows.append(_echo(cfg) + [k, m, "mean_length", v, se, int(ok.size), failed])
    return table


PROFILE_COLUMNS = ["x_p", "offset", "tilt", "lr", "flag"]


def profile_curve(data, p, k, offsets, center=None):
    """Tilting and likelihood-ratio statistics along ``center + offset``.

    ``center`` defaults to the Weissman estimate. Points where a statistic
    cannot be computed get ``nan`` and a flag instead of being dropped.
    """
    ts = make_tail_sample(data, k)
    if center is None:
        center = weissman_quantile(ts, p)
    table = ExperimentTable(list(PROFILE_COLUMNS))
    for off in offsets:
        x = center + off
        flags = []
        tilt_v = lr_v = math.nan
        if x > 0:
            try:
                tilt_v = outer_solve(x, ts, p).stat
            except TailcrError:
                flags.append("tilt_infeasible")
            try:
                lr_v = lr_stat(ts, p, x).stat
            except TailcrError:
                flags.append("lr_infeasible")
        else:
            flags.append("nonpositive")
        table.rows.append([x, float(off), tilt_v, lr_v, "infeasible" if flags else ""])
    return table


KSCAN_COLUMNS = ["k", "method", "lo", "hi", "x_hat", "gamma_hat", "status"]


def kscan(data, p, level, k_grid, methods=METHODS, mode="bisect", step=0.1):
    """Confidence regions of each method across a grid of k on one dataset."""
    data = np.asarray(data, dtype=float)
    if data.size <= max(k_grid) + 1:
        raise InvalidInputError(f"need more than {max(k_grid) + 1} observations, got {data.size}")
    table = ExperimentTable(list(KSCAN_COLUMNS))
    for k in k_grid:
        try:
            ts = make_tail_sample(data, k)
            g = hill(ts)
            x_hat = weissman_quantile(ts, p, g)
        except TailcrError as exc:
            for m in methods:
                table.rows.append([k, m, math.nan, math.nan, math.nan, math.nan, f"failed: {exc}"])
            continue
        for m in methods:
            try:
                if m == "normal":
                    r = normal_region(ts, p, level)
                elif m == "lr":
                    r = lr_region(ts, p, level, mode=mode, step=step)
                else:
                    r = tilt_region(ts, p, level, mode=mode, step=step)
                status = "ok" if not r.diagnostics.get("multimodal") else "ok_multimodal"
                table.rows.append([k, m, r.lo, r.hi, x_hat, g, status])
            except TailcrError as exc:
                table.rows.append([k, m, math.nan, math.nan, x_hat, g, f"failed: {exc}"])
    return table


EXPANSION_COLUMNS = ["k", "n", "p", "level", "log_extrapolation", "predicted_coverage",
                     "deficit", "cdf_at_0", "cdf_at_z"]


def expansion_table(n, p, level, k_grid, dist=None, convention="exponent"):
    """Predicted coverage of the normal interval over a k grid.

    With ``dist`` given, also the second-order CDF expansion of the
    studentized error at 0 and at ``z_level``, using the model's
    ``(gamma, rho, A(n/k))`` in the requested gamma convention.
    """
    z = two_sided_z(level)
    table = ExperimentTable(list(EXPANSION_COLUMNS))
    so = second_order(dist) if dist is not None else None
    for k in k_grid:
        lr = math.log(k / (n * p))
        pc = predicted_coverage(k, n, p, level)
        c0 = cz = math.nan
        if so is not None:
            g = so.gamma_as(convention)
            a_val = so.rate(n / k)
            c0 = cdf_expansion(0.0, k, n, p, g, so.rho, a_val)
            cz = cdf_expansion(z, k, n, p, g, so.rho, a_val)
        table.rows.append([k, n, p, level, lr, pc, level - pc, c0, cz])
    return table
