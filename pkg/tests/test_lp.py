import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from jpac.lp import CERT_TOL, LpError, LpProblem, LpStatus, solve_l1_approx, solve_lp
from jpac.model import build_normalized

from conftest import channel


def test_box_minimum():
    sol = solve_lp(LpProblem([1.0], np.zeros((0, 1)), [], lo=[0.0], hi=[1.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.x[0] == pytest.approx(0.0)


def test_simplex_vertex():
    sol = solve_lp(LpProblem([-1.0, -1.0], [[1.0, 1.0]], [1.0], lo=[0.0, 0.0]))
    assert sol.objective == pytest.approx(-1.0)
    assert sol.certified
    # sign conventions: y <= 0 on G x <= h, z_lo >= 0
    assert np.all(sol.y <= 1e-12) and np.all(sol.z_lo >= -1e-12)
    np.testing.assert_allclose(np.array([-1.0, -1.0]) - np.array([[1.0, 1.0]]).T @ sol.y - sol.z_lo - sol.z_hi,
                               0.0, atol=1e-10)


def test_infeasible_and_unbounded():
    with pytest.raises(LpError):
        solve_lp(LpProblem([1.0], [[1.0], [-1.0]], [0.0, -1.0]))
    with pytest.raises(LpError):
        solve_lp(LpProblem([-1.0], [[-1.0]], [0.0]))


def test_l1_single_link():
    sol = solve_l1_approx(channel([[1.0]], [0.5]), 0.5)
    assert sol.q[0] == pytest.approx(0.5, abs=1e-9)
    assert sol.q_e[0] == pytest.approx(0.0, abs=1e-9)
    assert sol.objective == pytest.approx(0.05, abs=1e-9)


def test_l1_two_link(sym):
    sol = solve_l1_approx(build_normalized(sym(0.4)), 0.5)
    np.testing.assert_allclose(sol.q, [5 / 6, 5 / 6], atol=1e-9)
    np.testing.assert_allclose(sol.q_e, [0.0, 0.0], atol=1e-9)


def test_l1_budget_bound_link():
    sol = solve_l1_approx(channel(np.eye(2), [1.4, 0.3]), 0.1)
    assert sol.q[0] == pytest.approx(1.0)
    assert sol.q_e[0] == pytest.approx(0.4)


def test_l1_rejects_bad_alpha(sym):
    with pytest.raises(ValueError):
        solve_l1_approx(build_normalized(sym(0.4)), 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_lps_certified_and_match_ipm(n, m, seed):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, n)
    h = G @ x0 + rng.uniform(0.1, 1, m)       # x0 strictly feasible
    cost = rng.normal(size=n)
    prob = LpProblem(cost, G, h, lo=np.zeros(n), hi=np.ones(n))
    sol = solve_lp(prob)
    assert sol.status is LpStatus.OPTIMAL
    assert max(sol.primal_residual, sol.dual_residual) <= CERT_TOL
    ref = linprog(cost, A_ub=G, b_ub=h, bounds=[(0, 1)] * n, method="highs-ipm")
    assert sol.objective == pytest.approx(ref.fun, abs=1e-7)
