import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jpac.feasibility import is_supportable
from jpac.lp import solve_l1_approx
from jpac.model import LinkNetwork, build_normalized, restrict
from jpac.nlpd import alpha_nlpd
from jpac.pnmd import (IpmParams, alpha_pnmd, kkt_residual, removal_index_smart, run_pnmd, solve_lp_norm,
                       start_point)

from conftest import channel, random_network


def test_params_validation():
    for bad in (dict(p=0.0), dict(p=1.0), dict(p=1.5), dict(epsilon=0.0), dict(mu_shrink=1.0),
                dict(boundary_fraction=1.0)):
        with pytest.raises(ValueError):
            IpmParams(**bad)
    IpmParams(p=1.0, allow_p_one=True)
    assert IpmParams().max_stages(1.0) == 10


def test_alpha_pnmd(sym):
    assert alpha_pnmd(build_normalized(sym(0.4))).alpha == pytest.approx(0.5)
    assert alpha_pnmd(build_normalized(sym(1.2))).alpha == pytest.approx(0.5)
    assert alpha_pnmd(build_normalized(sym(0.4)), alpha2=0.01).alpha == pytest.approx(0.04)
    with pytest.raises(ValueError):
        alpha_pnmd(build_normalized(sym(0.4)), c3=0.1)


def test_start_point_interior(sym):
    for g in (0.4, 0.6, 1.2, 5.0):
        chan = build_normalized(sym(g))
        q = start_point(chan)
        assert np.all(q > 0) and np.all(q < 1) and np.all(chan.c - chan.A @ q > 0)


def test_single_link():
    sol = solve_lp_norm(channel([[1.0]], [0.5]), 0.5)
    assert sol.converged
    assert sol.q[0] == pytest.approx(0.5, abs=1e-6)
    assert 0 < sol.q_e[0] < 1e-6
    assert sol.kkt_residual <= 1e-6


def test_two_link_symmetric(sym):
    sol = solve_lp_norm(build_normalized(sym(0.4)), 0.5)
    assert sol.converged
    np.testing.assert_allclose(sol.q, [5 / 6, 5 / 6], atol=1e-5)
    assert sol.objective == pytest.approx(1 / 6, abs=1e-4)
    # grid check of the same problem
    g = np.linspace(0, 1, 401)
    Q1, Q2 = np.meshgrid(g, g, indexing="ij")
    R1, R2 = 0.5 - Q1 + 0.4 * Q2, 0.5 - Q2 + 0.4 * Q1
    ok = (R1 >= 0) & (R2 >= 0)
    obj = np.where(ok, np.sqrt(np.abs(R1)) + np.sqrt(np.abs(R2)) + 0.1 * (Q1 + Q2), np.inf)
    assert sol.objective <= obj.min() + 1e-4


def test_solution_invariants(sym):
    chan = build_normalized(random_network(np.random.default_rng(1), 6, spread=3.0))
    sol = solve_lp_norm(chan, alpha_pnmd(chan).alpha)
    np.testing.assert_allclose(sol.q_e, chan.c - chan.A @ sol.q, atol=1e-10)
    np.testing.assert_allclose(sol.s + sol.q, 1.0)
    assert min(sol.q.min(), sol.q_e.min(), sol.s.min()) >= -1e-12
    assert np.isfinite(sol.objective)
    assert sol.barrier_stages <= IpmParams().max_stages(sol.stage_history[0]["mu"])


def test_kkt_residual_examples():
    chan = channel([[1.0]], [0.5])
    params = IpmParams()
    # d/dq of (0.5-q)^0.5 + 0.1 q - 0.1 [ln q + ln(1-q) + ln(0.5-q)] at q = 0.25
    expected = abs(0.1 - 0.1 / 0.25 + 0.1 / 0.75 - (0.5 / 0.5 - 0.1 / 0.25))
    assert kkt_residual(chan, 0.5, params, [0.25], 0.1) == pytest.approx(expected)
    assert expected == pytest.approx(0.766666666, abs=1e-8)
    assert kkt_residual(chan, 0.5, params, [0.0], 0.1) == np.inf
    assert kkt_residual(chan, 0.5, params, [0.5], 0.1) == np.inf


def test_kkt_at_stationary_point(sym):
    # a converged final stage is an approximate stationary point of the barrier
    chan = build_normalized(sym(0.4))
    sol = solve_lp_norm(chan, 0.5)
    mu = sol.stage_history[-1]["mu"]
    assert sol.kkt_residual <= 3 * chan.K * mu


def test_smart_examples():
    chan = channel([[1.0, -0.6], [-0.3, 1.0]], [0.5, 0.4])
    link, metric = removal_index_smart(chan, [0.8, 0.6])
    assert link == 0 and metric == pytest.approx(1.10)
    assert removal_index_smart(channel([[1.0, -0.6], [-0.3, 1.0]], [0.2, 0.4]), [0, 0]) == (1, pytest.approx(0.4))
    assert removal_index_smart(channel([[1.0, -0.5], [-0.5, 1.0]], [0.3, 0.3]), [0.4, 0.4])[0] == 0


def test_p_one_matches_lp(sym):
    chan = build_normalized(sym(0.4))
    sol = solve_lp_norm(chan, 0.5, IpmParams(p=1.0, allow_p_one=True))
    assert sol.objective == pytest.approx(solve_l1_approx(chan, 0.5).objective, abs=1e-5)


def test_bad_start_rejected(sym):
    with pytest.raises(ValueError):
        solve_lp_norm(build_normalized(sym(0.4)), 0.5, q0=[0.0, 0.5])
    with pytest.raises(ValueError):
        solve_lp_norm(build_normalized(sym(0.4)), 0.0)


def test_run_pnmd_examples(sym):
    res = run_pnmd(sym(0.4))
    assert res.supported == (0, 1)
    np.testing.assert_allclose(res.powers_watts, np.full(2, 5 / 6 * 0.2), atol=1e-10)
    res = run_pnmd(sym(0.6))
    assert len(res.supported) == 1
    np.testing.assert_allclose(res.total_power, 0.1, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_run_pnmd_output_supportable(K, seed):
    net = random_network(np.random.default_rng(seed), K, spread=3.0)
    res = run_pnmd(net)
    if res.supported:
        assert is_supportable(restrict(build_normalized(net), res.supported)).feasible
