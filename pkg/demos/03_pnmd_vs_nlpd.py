"""
PNMD against NLPD on random networks
====================================

Both algorithms share preprocessing, the exact feasibility test and the
readmission step; they differ in the subproblem that picks the next link
to drop. Here we run a small paired sweep and print per-K means.
"""
from jpac import InstanceConfig, run_benchmark

cfg = InstanceConfig(seed=7)
report = run_benchmark(cfg, [10, 20, 30], 15, ["nlpd", "pnmd"])
print(f"{'K':>3} {'algorithm':>9} {'supported':>10} {'power [W]':>11} {'time [s]':>9}")
for row in report.summary():
    print(f"{row['K']:>3} {row['algorithm']:>9} {row['mean_supported']:>10.2f} "
          f"{row['mean_power_w']:>11.5f} {row['mean_time_s']:>9.3f}")
