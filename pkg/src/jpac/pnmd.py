"""
Deflation by lp-norm (0 < p < 1) minimization (PNMD).

The power-control subproblem is

    min  sum_k (c - A q)_k^p + alpha * pbar^T q
    s.t. q >= 0,  1 - q >= 0,  c - A q >= 0,

a concave objective over a polytope. It is solved by a log-barrier
continuation with damped, regularized Newton steps in ``q`` and stops at an
epsilon-KKT point. Removals then follow the interference-plus-noise
footprint of each link at the computed powers.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import LinkNetwork, NormalizedChannel, SolverSolution
from .nlpd import AlphaParams, _alpha_base, _deflate

__all__ = [
    "IpmParams",
    "PnmdParams",
    "alpha_pnmd",
    "start_point",
    "solve_lp_norm",
    "kkt_residual",
    "removal_index_smart",
    "run_pnmd",
]

log = logging.getLogger(__name__)

_ARMIJO = 1e-4
_MAX_BACKTRACK = 60
_MAX_RESTARTS = 5
_FLAT = 1e-13


@dataclass(frozen=True)
class IpmParams:
    """Barrier-continuation settings.

    ``mu0=None`` means ``max(1, G(q0)) / (3K)``. ``p == 1`` is accepted only
    with ``allow_p_one`` (used to cross-check against the LP route).
    """

    p: float = 0.5
    epsilon: float = 1e-6
    mu0: float | None = None
    mu_shrink: float = 0.2
    max_newton_per_stage: int = 100
    boundary_fraction: float = 0.99
    reg_floor: float = 1e-10
    max_factorizations: int = 60
    allow_p_one: bool = False

    def __post_init__(self):
        upper_ok = self.p < 1 or (self.p == 1 and self.allow_p_one)
        if not (0 < self.p and upper_ok):
            raise ValueError(f"exponent p must lie in (0, 1), got {self.p}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.mu_shrink < 1:
            raise ValueError("mu_shrink must lie in (0, 1)")
        if not 0 < self.boundary_fraction < 1:
            raise ValueError("boundary_fraction must lie in (0, 1)")

    def max_stages(self, mu0: float) -> int:
        """Stages including the initial one: ``ceil(log(mu0/eps)/log(1/shrink)) + 1``."""
        if mu0 <= self.epsilon:
            return 1
        return math.ceil(math.log(mu0 / self.epsilon) / math.log(1.0 / self.mu_shrink)) + 1


@dataclass(frozen=True)
class PnmdParams:
    c1: float = 0.2
    c2: float = 0.2
    c3: float = 4.0
    alpha2: float | None = None
    ipm: IpmParams = field(default_factory=IpmParams)


def alpha_pnmd(chan: NormalizedChannel, c1: float = 0.2, c2: float = 0.2, c3: float = 4.0,
               alpha2: float | None = None) -> AlphaParams:
    """``c1*alpha1`` if ``rho(I - A) >= 1`` else ``min(c2*alpha1, c3*alpha2)``."""
    if not (0 < c1 < 1 and 0 < c2 < 1 and c3 > c2):
        raise ValueError("require 0 < c1, c2 < 1 and c3 > c2")
    alpha1, alpha2, rho, small = _alpha_base(chan, alpha2)
    if small:
        return AlphaParams(c1, c2, c3, alpha1, alpha2, rho, min(c2 * alpha1, c3 * alpha2), "rho<1")
    return AlphaParams(c1, c2, c3, alpha1, alpha2, rho, c1 * alpha1, "rho>=1")


def start_point(chan: NormalizedChannel) -> np.ndarray:
    """``t * e`` with ``t = min(0.5, min(c) / (2 max(1, max|Ae|)))``, strictly interior."""
    t = min(0.5, chan.c.min() / (2.0 * max(1.0, np.abs(chan.A.sum(axis=1)).max())))
    return np.full(chan.K, t)


class _Barrier:
    """Objective, barrier and derivatives for one channel; ``r`` is the excess."""

    def __init__(self, chan, alpha, p):
        self.A = chan.A
        self.w = alpha * chan.pbar
        self.p = p

    def G(self, q, r):
        return float(np.sum(r ** self.p) + self.w @ q)

    def psi(self, q, r, mu):
        s = 1.0 - q
        if q.min() <= 0 or s.min() <= 0 or r.min() <= 0:
            return np.inf
        return self.G(q, r) - mu * (np.log(q).sum() + np.log(s).sum() + np.log(r).sum())

    def grad(self, q, r, mu):
        p = self.p
        # net multiplier on each excess coordinate; r is kept to full relative precision
        v = p * r ** (p - 1.0) - mu / r
        return self.w - mu / q + mu / (1.0 - q) - self.A.T @ v

    def hess(self, q, r, mu):
        p = self.p
        h_r = p * (p - 1.0) * r ** (p - 2.0) + mu / r ** 2
        H = (self.A.T * h_r) @ self.A
        H[np.diag_indices_from(H)] += mu / q ** 2 + mu / (1.0 - q) ** 2
        return H


def _newton_direction(H, g, floor, max_fact):
    """Regularized Newton direction; returns ``(d, factorizations, fell_back)``.

    The Hessian is Jacobi-scaled first so that ``lam * I`` acts on a unit
    diagonal; ``lam`` doubles from ``floor`` until Cholesky succeeds.
    """
    d_scale = np.sqrt(np.maximum(np.abs(np.diag(H)), np.finfo(float).tiny))
    Hs = H / np.outer(d_scale, d_scale)
    gs = g / d_scale
    lam = 0.0
    for attempt in range(1, max_fact + 1):
        try:
            factor = scipy.linalg.cho_factor(Hs + lam * np.eye(len(g)), check_finite=False)
            return -scipy.linalg.cho_solve(factor, gs, check_finite=False) / d_scale, attempt, False
        except scipy.linalg.LinAlgError:
            lam = floor if lam == 0.0 else 2.0 * lam
    return -gs / d_scale, max_fact, True


def _max_step(q, r, d, dr):
    t = np.inf
    neg = d < 0
    if neg.any():
        t = min(t, np.min(-q[neg] / d[neg]))
    pos = d > 0
    if pos.any():
        t = min(t, np.min((1.0 - q[pos]) / d[pos]))
    negr = dr < 0
    if negr.any():
        t = min(t, np.min(-r[negr] / dr[negr]))
    return t


def kkt_residual(chan: NormalizedChannel, alpha: float, params: IpmParams, q, mu: float,
                 q_e=None) -> float:
    """epsilon-KKT residual of ``q`` for barrier weight ``mu``.

    ``max(||grad G - J^T lam||_inf, max_i |lam_i g_i|)`` with multiplier
    estimates ``lam_i = mu / g_i`` over the 3K constraint slacks ``g_i``.
    Pass the solver-tracked excess as ``q_e`` to avoid recomputing
    ``c - A q`` (which loses relative precision near zero). Boundary
    points give ``inf``.
    """
    q = np.asarray(q, dtype=float)
    r = chan.c - chan.A @ q if q_e is None else np.asarray(q_e, dtype=float)
    if q.min() <= 0 or (1.0 - q).min() <= 0 or r.min() <= 0:
        return np.inf
    stationarity = np.abs(_Barrier(chan, alpha, params.p).grad(q, r, mu)).max()
    # lam_i * g_i == mu for every constraint by construction
    return float(max(stationarity, mu))


def solve_lp_norm(chan: NormalizedChannel, alpha: float, params: IpmParams = IpmParams(),
                  q0=None) -> SolverSolution:
    """Approximate an epsilon-KKT point of the lp power-control subproblem.

    Returns a :class:`SolverSolution` with ``q``, ``q_e`` (tracked excess,
    equal to ``c - A q`` up to rounding), ``s = 1 - q`` and the objective
    ``sum q_e^p + alpha pbar^T q``. ``converged`` is True when the final
    ``kkt_residual <= params.epsilon``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    K = chan.K
    f = _Barrier(chan, alpha, params.p)
    q = start_point(chan) if q0 is None else np.array(q0, dtype=float)
    r = chan.c - chan.A @ q
    if q.min() <= 0 or q.max() >= 1 or r.min() <= 0:
        raise ValueError("starting point must be strictly interior")

    mu = params.mu0 if params.mu0 is not None else max(1.0, f.G(q, r)) / (3 * K)
    eps = params.epsilon
    max_stages = params.max_stages(mu)
    history = []
    newton_total = 0
    converged = False
    kkt = np.inf

    for stage in range(max_stages):
        final = mu <= eps
        entry = (q.copy(), r.copy())
        cap = params.boundary_fraction
        restarts = 0
        steps = 0
        while True:
            g = f.grad(q, r, mu)
            gnorm = np.abs(g).max()
            if gnorm <= eps or steps >= params.max_newton_per_stage:
                break
            d, _, fell_back = _newton_direction(f.hess(q, r, mu), g, params.reg_floor,
                                                params.max_factorizations)
            slope = g @ d
            if not slope < 0:
                d = -g
                slope = -(g @ g)
            dr = -(chan.A @ d)
            t = min(1.0, cap * _max_step(q, r, d, dr))
            psi0 = f.psi(q, r, mu)
            if not np.isfinite(psi0):
                # interiority lost numerically: rewind the stage with a tighter step cap
                restarts += 1
                if restarts > _MAX_RESTARTS:
                    log.warning("barrier stage %d lost interiority repeatedly", stage)
                    break
                q, r = entry[0].copy(), entry[1].copy()
                cap *= 0.5
                continue
            # below the rounding level of psi the Armijo test is blind; there
            # the step is judged by the gradient norm instead
            flat = -slope <= _FLAT * max(1.0, abs(psi0))
            for _ in range(_MAX_BACKTRACK):
                q1, r1 = q + t * d, r + t * dr
                psi1 = f.psi(q1, r1, mu)
                if flat:
                    if np.isfinite(psi1) and np.abs(f.grad(q1, r1, mu)).max() < gnorm:
                        break
                elif psi1 <= psi0 + _ARMIJO * t * slope:
                    break
                t *= 0.5
            else:
                break
            q = q + t * d
            r = r + t * dr
            steps += 1
            if not final and -slope <= 1e-3 * mu:
                # close enough to the central path for a non-final stage
                break
        newton_total += steps
        kkt = kkt_residual(chan, alpha, params, q, mu, q_e=r)
        history.append({"mu": mu, "newton_steps": steps, "kkt_residual": kkt})
        if final:
            converged = kkt <= eps
            break
        mu = max(mu * params.mu_shrink, eps)

    if not converged:
        log.info("lp-norm solve stopped with kkt residual %.3e (target %.1e)", kkt, eps)
    return SolverSolution(q=q, q_e=r, s=1.0 - q, objective=f.G(q, r), kkt_residual=kkt,
                          barrier_stages=len(history), newton_steps=newton_total,
                          converged=converged, status="CONVERGED" if converged else "NOT_CONVERGED",
                          stage_history=history)


def removal_index_smart(chan: NormalizedChannel, q) -> tuple[int, float]:
    """Link with the largest interference-plus-noise footprint at powers ``q``.

    Metric ``sum_{j != k} |a_kj| q_j + sum_{j != k} |a_jk| q_k + c_k``;
    ties go to the smallest id. Returns ``(link_id, metric)``.
    """
    q = np.asarray(q, dtype=float)
    absA = np.abs(chan.A)
    np.fill_diagonal(absA, 0.0)
    metric = absA @ q + absA.sum(axis=0) * q + chan.c
    pos = int(np.argmax(metric))
    return chan.link_ids[pos], float(metric[pos])


def run_pnmd(net: LinkNetwork, params: PnmdParams = PnmdParams(), trace: bool = False):
    """Joint power and admission control by lp-guided deflation."""

    def step(chan):
        ap = alpha_pnmd(chan, params.c1, params.c2, params.c3, params.alpha2)
        sol = solve_lp_norm(chan, ap.alpha, params.ipm)
        if not sol.converged:
            log.info("removing by the best lp-norm iterate (solver not converged)")
        link, metric = removal_index_smart(chan, sol.q)
        info = {"alpha": ap.alpha, "branch": ap.branch, "objective": sol.objective,
                "kkt_residual": sol.kkt_residual, "converged": sol.converged,
                "barrier_stages": sol.barrier_stages, "solver_iterations": sol.newton_steps}
        return link, metric, info

    return _deflate(net, "pnmd", step, trace)
