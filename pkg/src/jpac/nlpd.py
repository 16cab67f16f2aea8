"""
Deflation by l1 approximation (NLPD), plus the pieces every deflation run
shares: the necessary-condition preprocessing, the alpha rule, readmission
of removed links, and the admission result record.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .feasibility import foschini_miljanic, is_supportable
from .lp import LpError, LpStatus, solve_l1_approx
from .model import LinkNetwork, NormalizedChannel, build_normalized, restrict
from .numerics import spectral_radius

__all__ = [
    "NecessaryConditionReport",
    "AlphaParams",
    "Removal",
    "AdmissionResult",
    "NlpdParams",
    "necessary_condition",
    "preprocess",
    "removal_index_l1",
    "alpha_nlpd",
    "readmit",
    "final_powers",
    "run_nlpd",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NecessaryConditionReport:
    mu: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    margin: float

    @property
    def holds(self) -> bool:
        return self.margin >= 0.0


@dataclass(frozen=True)
class AlphaParams:
    c1: float
    c2: float
    c3: float | None
    alpha1: float
    alpha2: float
    rho: float
    alpha: float
    branch: str  # "rho>=1" or "rho<1"


@dataclass(frozen=True)
class Removal:
    stage: str  # "PRE" or "ADMISSION"
    link: int
    metric: float


@dataclass
class AdmissionResult:
    """Outcome of one deflation run.

    ``supported`` and ``readmitted`` hold 0-based link ids; ``to_dict``
    converts them to 1-based ids for output.
    """

    algorithm: str
    K: int
    supported: tuple
    powers_watts: np.ndarray
    removal_trace: list
    readmitted: tuple
    stats: dict = field(default_factory=dict)
    iterations: list = field(default_factory=list)

    @property
    def total_power(self) -> float:
        return float(self.powers_watts.sum())

    def to_dict(self, trace: bool = False) -> dict:
        doc = {
            "algorithm": self.algorithm,
            "K": self.K,
            "supported": [k + 1 for k in self.supported],
            "num_supported": len(self.supported),
            "powers_watts": [float(p) for p in self.powers_watts],
            "total_power_watts": self.total_power,
            "removal_trace": [{"stage": r.stage, "link": r.link + 1, "metric": float(r.metric)}
                              for r in self.removal_trace],
            "readmitted": [k + 1 for k in self.readmitted],
            "stats": self.stats,
        }
        if trace:
            doc["iterations"] = self.iterations
        return doc


def necessary_condition(chan: NormalizedChannel) -> NecessaryConditionReport:
    """Column-sum test ``(mu+)^T e - (mu- + e)^T c >= 0`` with ``mu = A^T e``.

    Every supportable channel passes it; failing it proves infeasibility.
    """
    mu = chan.A.sum(axis=0)
    mu_plus = np.maximum(mu, 0.0)
    mu_minus = np.maximum(-mu, 0.0)
    margin = float(mu_plus.sum() - (mu_minus + 1.0) @ chan.c)
    return NecessaryConditionReport(mu, mu_plus, mu_minus, margin)


def _argmax_first(values) -> int:
    # np.argmax already returns the first maximal position
    return int(np.argmax(values))


def _footprint(chan: NormalizedChannel) -> np.ndarray:
    absA = np.abs(chan.A)
    np.fill_diagonal(absA, 0.0)
    return absA.sum(axis=1) + absA.sum(axis=0) + chan.c


def preprocess(chan: NormalizedChannel):
    """Drop the strongest interferer until the necessary condition holds.

    Returns the reduced channel (``None`` if every link was dropped) and the
    list of :class:`Removal` records.
    """
    removed = []
    current = chan
    while not necessary_condition(current).holds:
        metric = _footprint(current)
        pos = _argmax_first(metric)
        link = current.link_ids[pos]
        removed.append(Removal("PRE", link, float(metric[pos])))
        rest = [k for k in current.link_ids if k != link]
        if not rest:
            return None, removed
        current = restrict(current, rest)
    return current, removed


def removal_index_l1(chan: NormalizedChannel, q_e) -> tuple[int, float]:
    """Link maximizing ``sum_{j != k} |a_kj| qe_j + |a_jk| qe_k``.

    Negative excess entries (links served above target) are clamped to 0.
    Returns ``(link_id, metric)``.
    """
    q_e = np.asarray(q_e, dtype=float)
    if np.any(q_e < 0):
        log.debug("clamping %d negative excess entries before the removal metric", int((q_e < 0).sum()))
    qe = np.maximum(q_e, 0.0)
    absA = np.abs(chan.A)
    np.fill_diagonal(absA, 0.0)
    metric = absA @ qe + absA.sum(axis=0) * qe
    if not np.any(metric > 0):
        log.info("l1 removal metric is identically zero; falling back to largest normalized noise")
        pos = _argmax_first(chan.c)
        return chan.link_ids[pos], 0.0
    pos = _argmax_first(metric)
    return chan.link_ids[pos], float(metric[pos])


def _alpha_base(chan: NormalizedChannel, alpha2):
    alpha1 = 1.0 / chan.pbar.sum()
    if alpha2 is None:
        alpha2 = alpha1
    sr = spectral_radius(chan.B)
    # unconverged estimates take the conservative rho >= 1 branch
    small = sr.converged and sr.rho < 1.0
    return alpha1, float(alpha2), sr.rho, small


def alpha_nlpd(chan: NormalizedChannel, c1: float = 0.2, c2: float = 0.2, alpha2: float | None = None) -> AlphaParams:
    """``c1*alpha1`` if ``rho(I - A) >= 1`` else ``c2*min(alpha1, alpha2)``.

    ``alpha1 = 1 / sum(pbar)``; ``alpha2`` defaults to ``alpha1``.
    """
    if not 0 < c1 <= c2 < 1:
        raise ValueError("require 0 < c1 <= c2 < 1")
    alpha1, alpha2, rho, small = _alpha_base(chan, alpha2)
    if small:
        return AlphaParams(c1, c2, None, alpha1, alpha2, rho, c2 * min(alpha1, alpha2), "rho<1")
    return AlphaParams(c1, c2, None, alpha1, alpha2, rho, c1 * alpha1, "rho>=1")


def readmit(chan_full: NormalizedChannel, supported, removed) -> tuple[tuple, tuple]:
    """Try to re-add removed links, smallest recorded metric first.

    A link is kept iff the enlarged set is still supportable. Returns
    ``(supported, readmitted)`` as sorted tuples of link ids.
    """
    current = set(supported)
    readmitted = []
    for rem in sorted(removed, key=lambda r: (r.metric, r.link)):
        trial = sorted(current | {rem.link})
        if is_supportable(restrict(chan_full, trial)).feasible:
            current.add(rem.link)
            readmitted.append(rem.link)
        else:
            log.debug("link %d cannot be readmitted", rem.link + 1)
    return tuple(sorted(current)), tuple(sorted(readmitted))


def final_powers(net: LinkNetwork, chan_full: NormalizedChannel, supported) -> np.ndarray:
    """Watt-level powers for ``supported`` from Foschini-Miljanic started at zero."""
    p = np.zeros(net.K)
    if not supported:
        return p
    sub = restrict(chan_full, supported)
    trace, converged = foschini_miljanic(sub, keep_trace=False)
    q = trace[-1]
    if not converged:
        log.warning("Foschini-Miljanic did not converge on the supported set; using the direct solve")
        q = is_supportable(sub).qstar
    idx = list(supported)
    p[idx] = q * net.pbar[idx]
    return p


@dataclass(frozen=True)
class NlpdParams:
    c1: float = 0.2
    c2: float = 0.2
    alpha2: float | None = None


def _deflate(net: LinkNetwork, name: str, step, trace: bool) -> AdmissionResult:
    """Shared five-step skeleton; ``step(chan)`` returns ``(link, metric, info)``."""
    t0 = time.perf_counter()
    chan_full = build_normalized(net)
    current, removed = preprocess(chan_full)
    t1 = time.perf_counter()

    iterations = []
    solver_iters = 0
    while current is not None:
        if is_supportable(current).feasible:
            break
        link, metric, info = step(current)
        solver_iters += info.get("solver_iterations", 0)
        removed.append(Removal("ADMISSION", link, metric))
        if trace:
            info.update(K_current=current.K, removed=link + 1, metric=metric)
            iterations.append(info)
        rest = [k for k in current.link_ids if k != link]
        current = restrict(current, rest) if rest else None
    t2 = time.perf_counter()

    survivors = () if current is None else current.link_ids
    supported, readmitted = readmit(chan_full, survivors, removed)
    powers = final_powers(net, chan_full, supported)
    t3 = time.perf_counter()
    stats = {
        "preprocess_removals": sum(r.stage == "PRE" for r in removed),
        "admission_removals": sum(r.stage == "ADMISSION" for r in removed),
        "solver_iterations": solver_iters,
        "time_preprocess_s": t1 - t0,
        "time_admission_s": t2 - t1,
        "time_postprocess_s": t3 - t2,
    }
    return AdmissionResult(name, net.K, supported, powers, removed, readmitted, stats, iterations)


def run_nlpd(net: LinkNetwork, params: NlpdParams = NlpdParams(), trace: bool = False) -> AdmissionResult:
    """Joint power and admission control by l1-guided deflation."""

    def step(chan):
        ap = alpha_nlpd(chan, params.c1, params.c2, params.alpha2)
        try:
            sol = solve_l1_approx(chan, ap.alpha)
        except LpError as exc:
            sol = None
            log.warning("l1 subproblem failed (%s); removing by interference footprint", exc)
        if sol is None or sol.status != LpStatus.OPTIMAL.value:
            metric = _footprint(chan)
            pos = _argmax_first(metric)
            return chan.link_ids[pos], float(metric[pos]), {"alpha": ap.alpha, "fallback": True}
        link, metric = removal_index_l1(chan, sol.q_e)
        info = {"alpha": ap.alpha, "branch": ap.branch, "objective": sol.objective,
                "kkt_residual": sol.kkt_residual, "solver_iterations": sol.newton_steps}
        return link, metric, info

    return _deflate(net, "nlpd", step, trace)
