"""
Random network generation and the Monte-Carlo comparison harness.

Instances follow the usual ad-hoc layout: transmitters uniform over a square,
each receiver uniform (by area) in a disc around its transmitter, gains
``d^-n``, budgets a fixed multiple of the interference-free minimum power.

Randomness
----------
Every trial draws from its own PCG64 stream (numpy's ``Generator``) keyed by
``SeedSequence([master_seed, K, trial])``. The per-trial integer seed written
to the CSV is the first 63-bit word of that sequence, and
``generate_instance(cfg, K, seed)`` rebuilds the instance from it. Only
``Generator.random`` (53-bit uniform doubles) is consumed, and in a fixed
order: transmitter x, transmitter y (K each), then receiver radius draws and
angle draws (K each). PCG64 and SeedSequence are platform independent, so
seeds reproduce bit for bit.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .feasibility import ORACLE_MAX_K, brute_force_optimum
from .model import LinkNetwork, build_normalized, db_to_linear, dbm_to_watts
from .nlpd import NlpdParams, alpha_nlpd, run_nlpd
from .pnmd import PnmdParams, run_pnmd

__all__ = [
    "InstanceConfig",
    "TrialRow",
    "BenchReport",
    "trial_seed",
    "generate_instance",
    "ALGORITHMS",
    "run_benchmark",
    "emit",
]

log = logging.getLogger(__name__)

TRIAL_HEADER = ["K", "algorithm", "trial", "seed", "supported", "total_power_w", "wall_time_s", "status"]
SUMMARY_HEADER = ["K", "algorithm", "mean_supported", "mean_power_w", "mean_time_s", "n"]


@dataclass(frozen=True)
class InstanceConfig:
    area_side_m: float = 2000.0
    rx_radius_m: float = 400.0
    gamma_db: float = 2.0
    eta_dbm: float = -90.0
    budget_multiplier: float = 2.0
    pathloss_exponent: float = 4.0
    distance_floor_m: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        for name in ("area_side_m", "rx_radius_m", "pathloss_exponent", "distance_floor_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.budget_multiplier >= 1:
            raise ValueError("budget_multiplier must be at least 1")


def trial_seed(master_seed: int, K: int, trial: int) -> int:
    ss = np.random.SeedSequence([int(master_seed), int(K), int(trial)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def generate_instance(cfg: InstanceConfig, K: int, seed: int) -> LinkNetwork:
    if K < 1:
        raise ValueError("K must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    tx = np.column_stack([rng.random(K), rng.random(K)]) * cfg.area_side_m
    radius = cfg.rx_radius_m * np.sqrt(rng.random(K))
    angle = 2.0 * math.pi * rng.random(K)
    rx = tx + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    # d[k, j]: transmitter j to receiver k
    d = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2)
    d = np.maximum(d, cfg.distance_floor_m)
    G = d ** (-cfg.pathloss_exponent)
    gamma = float(db_to_linear(cfg.gamma_db))
    eta = float(dbm_to_watts(cfg.eta_dbm))
    p_min = gamma * eta / np.diag(G)
    return LinkNetwork(G, np.full(K, eta), np.full(K, gamma), cfg.budget_multiplier * p_min)


def _run_oracle(net: LinkNetwork):
    chan = build_normalized(net)
    res = brute_force_optimum(chan, alpha_nlpd(chan).alpha)
    return len(res.best_set), res.total_power


ALGORITHMS: dict[str, Callable[[LinkNetwork, dict], tuple[int, float]]] = {
    "nlpd": lambda net, opts: _summary(run_nlpd(net, opts.get("nlpd", NlpdParams()))),
    "pnmd": lambda net, opts: _summary(run_pnmd(net, opts.get("pnmd", PnmdParams()))),
    "oracle": lambda net, opts: _run_oracle(net),
}


def _summary(result):
    return len(result.supported), result.total_power


@dataclass(frozen=True)
class TrialRow:
    K: int
    algorithm: str
    trial: int
    seed: int
    supported: int
    total_power_w: float
    wall_time_s: float
    status: str


@dataclass
class BenchReport:
    config: InstanceConfig
    K_list: tuple
    algorithms: tuple
    trials: int
    rows: list = field(default_factory=list)

    def summary(self) -> list[dict]:
        out = []
        for K in self.K_list:
            for algo in self.algorithms:
                ok = [r for r in self.rows if r.K == K and r.algorithm == algo and r.status == "ok"]
                n = len(ok)
                out.append({
                    "K": K,
                    "algorithm": algo,
                    "mean_supported": math.fsum(r.supported for r in ok) / n if n else math.nan,
                    "mean_power_w": math.fsum(r.total_power_w for r in ok) / n if n else math.nan,
                    "mean_time_s": math.fsum(r.wall_time_s for r in ok) / n if n else math.nan,
                    "n": n,
                })
        return out


def run_benchmark(cfg: InstanceConfig, K_list: Iterable[int], trials: int, algorithms: Iterable[str],
                  options: dict | None = None, on_row: Callable[[TrialRow], None] | None = None) -> BenchReport:
    """Run every algorithm on the same ``trials`` instances for each ``K``.

    ``cfg.seed`` is the master seed. A failing algorithm call yields a row
    with status ``failed``; the sweep continues. ``on_row`` is called with
    each row as it completes.
    """
    K_list = tuple(int(k) for k in K_list)
    algorithms = tuple(algorithms)
    options = options or {}
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")
    if "oracle" in algorithms and any(K > ORACLE_MAX_K for K in K_list):
        raise ValueError(f"the oracle is limited to K <= {ORACLE_MAX_K}")

    report = BenchReport(cfg, K_list, algorithms, trials)
    for K in K_list:
        for trial in range(trials):
            seed = trial_seed(cfg.seed, K, trial)
            net = generate_instance(cfg, K, seed)
            for algo in algorithms:
                t0 = time.perf_counter()
                try:
                    supported, power = ALGORITHMS[algo](net, options)
                    status = "ok"
                except Exception:  # a single trial must never abort the sweep
                    log.exception("%s failed on K=%d trial=%d", algo, K, trial)
                    supported, power, status = 0, math.nan, "failed"
                row = TrialRow(K, algo, trial, seed, supported, power, time.perf_counter() - t0, status)
                report.rows.append(row)
                if on_row is not None:
                    on_row(row)
    return report


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit(report: BenchReport, path, fmt: str = "csv", timing: bool = True) -> list[str]:
    """Write ``<path>`` (per-trial rows) and ``<stem>_summary.csv``.

    ``fmt="json"`` additionally writes ``<stem>.json`` with config, rows and
    summary. ``timing=False`` blanks the wall-time columns so repeated runs
    are byte-identical. Returns the written paths.
    """
    path = str(path)
    stem = path[:-4] if path.endswith(".csv") else path
    trial_path = stem + ".csv"
    summary_path = stem + "_summary.csv"
    with open(trial_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_HEADER)
        for r in report.rows:
            values = [r.K, r.algorithm, r.trial, r.seed, r.supported, r.total_power_w,
                      r.wall_time_s if timing else "", r.status]
            writer.writerow([_fmt(v) for v in values])
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for s in report.summary():
            if not timing:
                s = dict(s, mean_time_s="")
            writer.writerow([_fmt(s[h]) for h in SUMMARY_HEADER])
    written = [trial_path, summary_path]
    if fmt == "json":
        json_path = stem + ".json"
        doc = {
            "config": asdict(report.config),
            "K_list": list(report.K_list),
            "algorithms": list(report.algorithms),
            "trials": report.trials,
            "rows": [asdict(r) for r in report.rows],
            "summary": report.summary(),
        }
        if not timing:
            for r in doc["rows"]:
                r["wall_time_s"] = None
            for s in doc["summary"]:
                s["mean_time_s"] = None
        with open(json_path, "w") as fh:
            json.dump(doc, fh, indent=2, allow_nan=True)
            fh.write("\n")
        written.append(json_path)
    return written
