"""
How far from optimal?
=====================

For small K the exhaustive oracle finds the largest supportable set. We
compare both heuristics against it, trial by trial.
"""
import numpy as np

from jpac import InstanceConfig, run_benchmark

report = run_benchmark(InstanceConfig(seed=3), [6, 8], 25, ["nlpd", "pnmd", "oracle"])
for K in report.K_list:
    best = {r.trial: r.supported for r in report.rows if r.K == K and r.algorithm == "oracle"}
    for algo in ("nlpd", "pnmd"):
        ratios = np.array([r.supported / best[r.trial] for r in report.rows if r.K == K and r.algorithm == algo])
        print(f"K={K} {algo}: mean ratio {ratios.mean():.3f}, optimal in {np.mean(ratios == 1):.0%} of trials")
