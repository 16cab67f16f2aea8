"""
Inside the lp-norm barrier solver
=================================

The subproblem ``min sum (c - Aq)^p + alpha pbar^T q`` over the polytope
``0 <= q <= 1, Aq <= c`` has a concave objective. The solver follows a
log-barrier path: each stage minimizes the barrier function for a fixed
weight ``mu`` by regularized Newton steps, then shrinks ``mu``.

We print the stage history on a random 8-link network, then check a 2-link
case against a brute-force grid.
"""
import numpy as np

from jpac import InstanceConfig, IpmParams, alpha_pnmd, build_normalized, generate_instance, solve_lp_norm

net = generate_instance(InstanceConfig(), 8, seed=11)
chan = build_normalized(net)
alpha = alpha_pnmd(chan).alpha
sol = solve_lp_norm(chan, alpha)
print(f"alpha = {alpha:.4g}, converged = {sol.converged}, objective = {sol.objective:.6f}")
print(f"{'stage':>5} {'mu':>10} {'newton':>7} {'kkt':>10}")
for i, st in enumerate(sol.stage_history):
    print(f"{i:>5} {st['mu']:>10.3e} {st['newton_steps']:>7} {st['kkt_residual']:>10.3e}")
print("stage bound:", IpmParams().max_stages(sol.stage_history[0]["mu"]))
print("q   =", np.round(sol.q, 4))
print("q_e =", np.round(sol.q_e, 6), "(zeros mark links served exactly at target)")

# p -> 1 recovers the convex l1 problem
from jpac import solve_l1_approx  # noqa: E402

l1 = solve_l1_approx(chan, alpha)
p1 = solve_lp_norm(chan, alpha, IpmParams(p=1.0, allow_p_one=True))
print(f"\np = 1 barrier objective {p1.objective:.8f} vs LP {l1.objective:.8f}")

# a 2-link case against a 400 x 400 grid; grid points rarely land exactly
# on r = 0, where sqrt(r) is steep, so the solver usually comes out lower
two = build_normalized(generate_instance(InstanceConfig(), 2, seed=5))
a2 = alpha_pnmd(two).alpha
s2 = solve_lp_norm(two, a2)
g = np.linspace(0, 1, 400)
Q1, Q2 = np.meshgrid(g, g, indexing="ij")
R = [two.c[k] - two.A[k, 0] * Q1 - two.A[k, 1] * Q2 for k in range(2)]
ok = (R[0] >= 0) & (R[1] >= 0)
obj = np.sqrt(np.clip(R[0], 0, None)) + np.sqrt(np.clip(R[1], 0, None)) + a2 * (two.pbar[0] * Q1 + two.pbar[1] * Q2)
print(f"\n2-link: solver {s2.objective:.6f}, grid minimum {np.where(ok, obj, np.inf).min():.6f}")
