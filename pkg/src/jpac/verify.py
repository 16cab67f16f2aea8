"""
Quick self-checks behind ``jpac verify``.

Each check returns ``(name, ok, detail)``. They are cheap versions of the
acceptance suite: closed-form 2-link cases, certificate agreement with
Foschini-Miljanic, necessary-condition soundness, and oracle agreement on
small random networks.
"""
from __future__ import annotations

import numpy as np

from .bench import InstanceConfig, generate_instance, trial_seed
from .feasibility import Reason, brute_force_optimum, foschini_miljanic, is_supportable
from .lp import solve_l1_approx
from .model import LinkNetwork, build_normalized, restrict
from .nlpd import alpha_nlpd, necessary_condition, run_nlpd
from .pnmd import IpmParams, run_pnmd, solve_lp_norm

__all__ = ["two_link", "run_all"]


def two_link(g: float, budget: float = 0.2, gamma: float = 1.0, noise: float = 0.1) -> LinkNetwork:
    """Symmetric 2-link network with unit direct gains and cross gain ``g``."""
    G = np.array([[1.0, g], [g, 1.0]])
    return LinkNetwork(G, np.full(2, noise), np.full(2, gamma), np.full(2, budget))


def _check_two_link():
    # deflation removes the smallest id on a tie, the oracle keeps it
    expected = {0.4: (Reason.OK, 5 / 6, 0.2, (0, 1), (0, 1)),
                0.6: (Reason.BUDGET_EXCEEDED, 1.25, -0.2, (1,), (0,)),
                1.2: (Reason.RHO_GE_1, None, None, (1,), (0,))}
    bad = []
    for g, (reason, q, margin, admitted, oracle) in expected.items():
        net = two_link(g)
        chan = build_normalized(net)
        cert = is_supportable(chan)
        if cert.reason is not reason:
            bad.append(f"g={g}: reason {cert.reason.value}")
        if q is not None and not np.allclose(cert.qstar, q, atol=1e-9):
            bad.append(f"g={g}: q* {cert.qstar}")
        if margin is not None and abs(necessary_condition(chan).margin - margin) > 1e-9:
            bad.append(f"g={g}: margin")
        for res in (run_nlpd(net), run_pnmd(net)):
            if res.supported != admitted:
                bad.append(f"g={g}: {res.algorithm} admitted {res.supported}")
        if brute_force_optimum(chan, alpha_nlpd(chan).alpha).best_set != oracle:
            bad.append(f"g={g}: oracle")
    return "two-link closed forms", not bad, "; ".join(bad) or "3 cases"


def _random_instances(seed, K_values, n):
    cfg = InstanceConfig(seed=seed)
    for i in range(n):
        K = K_values[i % len(K_values)]
        yield generate_instance(cfg, K, trial_seed(seed, K, i))


def _check_certificate_vs_fm(seed, n):
    rng = np.random.default_rng(seed)
    mismatches = 0
    for net in _random_instances(seed, (3, 5, 8), n):
        chan = build_normalized(net)
        size = int(rng.integers(1, net.K + 1))
        sub = restrict(chan, sorted(rng.choice(net.K, size, replace=False).tolist()))
        cert = is_supportable(sub)
        trace, converged = foschini_miljanic(sub, keep_trace=False, max_iter=20_000)
        fm_ok = converged and bool(np.all(trace[-1] <= 1.0 + 1e-9))
        mismatches += cert.feasible != fm_ok
    return "certificate vs Foschini-Miljanic", mismatches == 0, f"{mismatches}/{n} mismatches"


def _check_necessary_condition(seed, n):
    violations = checked = 0
    for net in _random_instances(seed, (2, 4, 6, 10), n):
        chan = build_normalized(net)
        if is_supportable(chan).feasible:
            checked += 1
            violations += not necessary_condition(chan).holds
    return "necessary condition soundness", violations == 0, f"{violations} violations in {checked} feasible"


def _check_oracle(seed, n):
    worse = 0
    for net in _random_instances(seed, (4, 6, 8), n):
        chan = build_normalized(net)
        best = len(brute_force_optimum(chan, alpha_nlpd(chan).alpha).best_set)
        for res in (run_nlpd(net), run_pnmd(net)):
            if res.supported and not is_supportable(restrict(chan, res.supported)).feasible:
                worse += 1
            if len(res.supported) > best:
                worse += 1
    return "admissions certified and bounded by oracle", worse == 0, f"{worse} violations over {n} networks"


def _check_p_one(seed, n):
    worst = 0.0
    params = IpmParams(p=1.0, allow_p_one=True)
    for net in _random_instances(seed, (2, 4, 6), n):
        chan = build_normalized(net)
        alpha = alpha_nlpd(chan).alpha
        worst = max(worst, abs(solve_lp_norm(chan, alpha, params).objective - solve_l1_approx(chan, alpha).objective))
    return "barrier p=1 vs LP", worst <= 1e-5, f"max gap {worst:.2e}"


def run_all(seed: int = 0, quick: bool = False) -> list[tuple[str, bool, str]]:
    n = 20 if quick else 100
    return [
        _check_two_link(),
        _check_certificate_vs_fm(seed, n),
        _check_necessary_condition(seed, 5 * n),
        _check_oracle(seed, n // 4),
        _check_p_one(seed, n // 2),
    ]
