"""
Exact supportability of a link set, Foschini-Miljanic power control, and
an exhaustive optimal-admission oracle for small networks.
"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .model import NormalizedChannel, restrict
from .numerics import SingularMatrixError, solve_linear, spectral_radius

__all__ = [
    "RHO_MARGIN",
    "BUDGET_SLACK",
    "ORACLE_MAX_K",
    "Reason",
    "FeasibilityCertificate",
    "OracleResult",
    "is_supportable",
    "foschini_miljanic",
    "brute_force_optimum",
]

log = logging.getLogger(__name__)

RHO_MARGIN = 1e-12
BUDGET_SLACK = 1e-9
ORACLE_MAX_K = 16


class Reason(str, enum.Enum):
    OK = "OK"
    RHO_GE_1 = "RHO_GE_1"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    NUMERICAL = "NUMERICAL"


@dataclass(frozen=True)
class FeasibilityCertificate:
    feasible: bool
    rho: float
    qstar: np.ndarray | None
    reason: Reason


@dataclass(frozen=True)
class OracleResult:
    best_set: tuple
    qstar: np.ndarray
    l0_objective: float
    total_power: float


def is_supportable(chan: NormalizedChannel) -> FeasibilityCertificate:
    """Certify whether every link of ``chan`` can meet its target within budget.

    The set is supportable iff ``rho(I - A) < 1`` and the minimal power
    vector ``q* = A^{-1} c`` satisfies ``q* <= 1``.
    """
    sr = spectral_radius(chan.B)
    qstar = None
    try:
        qstar = solve_linear(chan.A, chan.c)
    except SingularMatrixError:
        pass

    if sr.converged:
        below = sr.rho < 1.0 - RHO_MARGIN
        above = not below
    else:
        # fall back on the rigorous bracket; undecided means not certifiable
        below = sr.upper < 1.0 - RHO_MARGIN
        above = sr.lower >= 1.0 - RHO_MARGIN
    if above:
        return FeasibilityCertificate(False, sr.rho, qstar, Reason.RHO_GE_1)
    if not below or qstar is None:
        return FeasibilityCertificate(False, sr.rho, qstar, Reason.NUMERICAL)
    # A is a non-singular M-matrix here, so A^{-1} >= 0 and q* >= 0
    assert np.all(qstar >= -BUDGET_SLACK), "M-matrix inverse produced negative powers"
    if np.all(qstar <= 1.0 + BUDGET_SLACK):
        return FeasibilityCertificate(True, sr.rho, qstar, Reason.OK)
    return FeasibilityCertificate(False, sr.rho, qstar, Reason.BUDGET_EXCEEDED)


def foschini_miljanic(chan: NormalizedChannel, q0=None, tol: float = 1e-12, max_iter: int = 100_000,
                      keep_trace: bool = True):
    """Iterate ``q <- (I - A) q + c`` without clamping to the budget.

    Each link rescales its power by target/achieved SINR, which in
    normalized form is the affine map above.

    Returns
    -------
    trace : ndarray, shape (T+1, K)
        Iterates including ``q0``; only the first and last when
        ``keep_trace`` is False.
    converged : bool
        Whether ``||q(t+1) - q(t)||_inf <= tol`` was reached.
    """
    B = chan.B
    c = chan.c
    q = np.zeros(chan.K) if q0 is None else np.array(q0, dtype=float)
    trace = [q.copy()]
    converged = False
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            q_next = B @ q + c
            step = np.abs(q_next - q).max()
            q = q_next
            if keep_trace:
                trace.append(q.copy())
            if step <= tol:
                converged = True
                break
            if not np.isfinite(step):
                break
    if not keep_trace:
        trace.append(q.copy())
    return np.array(trace), converged


def brute_force_optimum(chan: NormalizedChannel, alpha: float) -> OracleResult:
    """Maximum admissible set with minimum total power, by enumeration.

    Subsets are scanned in decreasing cardinality; the first cardinality
    with a supportable subset wins, ties on watt-level power are broken
    lexicographically on link ids. ``l0_objective`` is the value of the
    single-stage sparse objective ``(K - |S|) + alpha * pbar_S^T q*_S``.
    """
    K = chan.K
    if K > ORACLE_MAX_K:
        raise ValueError(f"brute-force oracle is capped at K <= {ORACLE_MAX_K}, got K = {K}")
    ids = chan.link_ids
    for size in range(K, 0, -1):
        best = None
        for subset in itertools.combinations(ids, size):
            sub = restrict(chan, subset)
            cert = is_supportable(sub)
            if not cert.feasible:
                continue
            power = float(sub.pbar @ cert.qstar)
            # combinations() yields in lexicographic order, so strict < keeps the first tie
            if best is None or power < best[1]:
                best = (subset, power, cert.qstar)
        if best is not None:
            subset, power, qstar = best
            return OracleResult(tuple(subset), qstar, (K - size) + alpha * power, power)
    return OracleResult((), np.zeros(0), float(K), 0.0)
