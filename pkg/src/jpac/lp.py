"""
Dense LPs with an explicit optimality certificate, and the l1 power-control
subproblem

    min  ||c - A q||_1 + alpha * pbar^T q    s.t.  0 <= q <= 1.

The LP itself is solved by HiGHS (dual simplex) through ``scipy.optimize``;
the certificate (primal/dual residuals, duality gap) is recomputed here from
the returned primal point and multipliers, so callers never depend on the
backend's own status reporting.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .model import NormalizedChannel, SolverSolution

__all__ = ["LpStatus", "LpProblem", "LpSolution", "LpError", "solve_lp", "solve_l1_approx"]

CERT_TOL = 1e-8


class LpStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    MAXITER = "MAXITER"


class LpError(RuntimeError):
    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True)
class LpProblem:
    """``min cost^T x  s.t.  G x <= h,  lo <= x <= hi`` (bounds may be infinite)."""

    cost: np.ndarray
    G: np.ndarray
    h: np.ndarray
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=float)
        n = cost.shape[0]
        G = np.asarray(self.G, dtype=float).reshape(-1, n)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        lo = np.full(n, -np.inf) if self.lo is None else np.broadcast_to(np.asarray(self.lo, float), (n,)).copy()
        hi = np.full(n, np.inf) if self.hi is None else np.broadcast_to(np.asarray(self.hi, float), (n,)).copy()
        if G.shape[0] != h.shape[0]:
            raise ValueError("G and h disagree on the number of constraints")
        if not (np.all(np.isfinite(cost)) and np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError("LP data must be finite")
        for name, val in (("cost", cost), ("G", G), ("h", h), ("lo", lo), ("hi", hi)):
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    y: np.ndarray          # multipliers of G x <= h (non-positive)
    z_lo: np.ndarray       # multipliers of x >= lo (non-negative)
    z_hi: np.ndarray       # multipliers of x <= hi (non-positive)
    objective: float
    primal_residual: float
    dual_residual: float
    gap: float
    status: LpStatus
    iterations: int

    @property
    def certified(self) -> bool:
        return (self.primal_residual <= CERT_TOL and self.dual_residual <= CERT_TOL
                and self.gap <= CERT_TOL * (1.0 + abs(self.objective)))


def _certificate(prob: LpProblem, x, y, z_lo, z_hi):
    viol = [np.maximum(prob.G @ x - prob.h, 0.0).max(initial=0.0),
            np.maximum(prob.lo - x, 0.0).max(initial=0.0),
            np.maximum(x - prob.hi, 0.0).max(initial=0.0)]
    primal = float(max(viol))
    stat = prob.cost - prob.G.T @ y - z_lo - z_hi
    dual = float(max(np.abs(stat).max(initial=0.0),
                     np.maximum(y, 0.0).max(initial=0.0),
                     np.maximum(-z_lo, 0.0).max(initial=0.0),
                     np.maximum(z_hi, 0.0).max(initial=0.0)))
    lo_fin = np.isfinite(prob.lo)
    hi_fin = np.isfinite(prob.hi)
    dual_obj = prob.h @ y + prob.lo[lo_fin] @ z_lo[lo_fin] + prob.hi[hi_fin] @ z_hi[hi_fin]
    # multipliers on infinite bounds must vanish
    dual = max(dual, float(np.abs(z_lo[~lo_fin]).max(initial=0.0)), float(np.abs(z_hi[~hi_fin]).max(initial=0.0)))
    primal_obj = float(prob.cost @ x)
    return primal_obj, primal, dual, abs(primal_obj - float(dual_obj))


def solve_lp(prob: LpProblem, tol: float = 1e-8, max_iter: int | None = None) -> LpSolution:
    """Solve ``prob`` and certify the answer.

    ``status`` is OPTIMAL only when the recomputed residuals are at most
    ``tol`` and the gap at most ``tol * (1 + |objective|)``.

    Raises
    ------
    LpError
        On an infeasible or unbounded problem (``.solution`` carries the
        diagnostic residual).
    """
    n = prob.cost.shape[0]
    m = prob.G.shape[0]
    if max_iter is None:
        max_iter = 10 * (n + m)
    bounds = [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u)
              for l, u in zip(prob.lo, prob.hi)]
    opts = {"maxiter": max_iter, "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10}
    res = linprog(prob.cost, A_ub=prob.G if m else None, b_ub=prob.h if m else None,
                  bounds=bounds, method="highs-ds", options=opts)

    if res.status in (2, 3) or res.x is None:
        x = np.zeros(n) if res.x is None else res.x
        sol = LpSolution(x, np.zeros(m), np.zeros(n), np.zeros(n), np.nan, np.inf, np.inf, np.inf,
                         LpStatus.INFEASIBLE, int(getattr(res, "nit", 0)))
        raise LpError(f"LP has no optimal solution: {res.message}", sol)

    x = res.x
    y = np.asarray(res.ineqlin.marginals, float) if m else np.zeros(0)
    z_lo = np.asarray(res.lower.marginals, float)
    z_hi = np.asarray(res.upper.marginals, float)
    obj, pres, dres, gap = _certificate(prob, x, y, z_lo, z_hi)
    ok = res.status == 0 and pres <= tol and dres <= tol and gap <= tol * (1.0 + abs(obj))
    status = LpStatus.OPTIMAL if ok else LpStatus.MAXITER
    return LpSolution(x, y, z_lo, z_hi, obj, pres, dres, gap, status, int(res.nit))


def solve_l1_approx(chan: NormalizedChannel, alpha: float) -> SolverSolution:
    """Solve the l1 power-control LP on ``chan``.

    Variables are ``[q, t]`` with epigraph constraints ``t >= +-(c - A q)``.
    The returned ``q_e = c - A q`` may have negative entries (links served
    above target).
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    K = chan.K
    A, c = chan.A, chan.c
    eye = np.eye(K)
    cost = np.concatenate([alpha * chan.pbar, np.ones(K)])
    G = np.block([[-A, -eye], [A, -eye]])
    h = np.concatenate([-c, c])
    lo = np.concatenate([np.zeros(K), np.full(K, -np.inf)])
    hi = np.concatenate([np.ones(K), np.full(K, np.inf)])
    lp = solve_lp(LpProblem(cost, G, h, lo, hi))
    q = np.clip(lp.x[:K], 0.0, 1.0)
    q_e = c - A @ q
    objective = float(np.abs(q_e).sum() + alpha * chan.pbar @ q)
    residual = max(lp.primal_residual, lp.dual_residual, lp.gap)
    sol = SolverSolution(q=q, q_e=q_e, s=1.0 - q, objective=objective, kkt_residual=residual,
                         newton_steps=lp.iterations, converged=lp.status is LpStatus.OPTIMAL,
                         status=lp.status.value, lp_solution=lp)
    return sol
