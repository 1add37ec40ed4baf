"""
Efficiency curves
=================

A sweep runs every method over a ladder of stepsizes h = base 2^-j and
records the maximum global error against the number of g evaluations.
Plotting log10(error) against evaluations gives the usual work-precision
picture; adapted methods sit well below their classical companions.
"""

import sys
from pathlib import Path

from atsh.bench import SweepConfig, apply_setting, run_sweep, write_outputs

config = SweepConfig()
apply_setting(config, "problems", "problem1,problem2,problem4")
apply_setting(config, "workers", "4")
records = run_sweep(config)

# Side by side at one stepsize per problem.
for problem, h in (("problem1", 0.125), ("problem2", 1.0), ("problem4", 0.0625)):
    print(problem)
    for r in records:
        if r.problem == problem and r.h == h:
            print(f"  {r.method:<24} evals {r.g_evals:>7}  error {r.max_global_error:.2e}")

out = Path(sys.argv[1] if len(sys.argv) > 1 else "efficiency.csv")
for path in write_outputs(records, out, with_plot=True):
    print("wrote", path)
