"""
Stability in the nu-z plane
===========================

Applied to y'' = -(omega^2 + eps) y with the method fitted to omega, the
two-step recurrence has characteristic polynomial xi^2 - S xi + P. Along
z = 0 the adapted methods are periodic for any nu; off the axis the picture
depends on the method. The scan is written to CSV together with a small
matplotlib script that draws it.
"""

import math
import sys
from pathlib import Path

import numpy as np

from atsh.cli import main
from atsh.methods import ATSH4_ZD, ATSH5_MINERR, build
from atsh.stability import StabilityClass, classify, scan_region, stability_intervals

# A single point: S and P, and what they imply.
tab = build(ATSH5_MINERR, 1.0)
for z in (0.0, 0.2, -0.2):
    pt = classify(tab, 1.0, z)
    print(f"nu = 1, z = {z:+.1f}: S = {pt.S:.6f}, P = {pt.P:.8f} -> {pt.cls.name.lower()}")

# The zero-dissipative method keeps P = 1, so its roots never leave the circle.
tab = build(ATSH4_ZD, 1.0)
print("zero-dissipative P at z = 0.3:", classify(tab, 1.0, 0.3).P)

# Class fractions over the default window.
for method in (ATSH5_MINERR, ATSH4_ZD):
    grid = scan_region(method, grid=(300, 301))
    fractions = {c.name.lower(): float(np.mean(grid.classes == c)) for c in StabilityClass}
    print(method.name, {k: round(v, 3) for k, v in fractions.items()})

# Intervals along one ray: fixed omega and eps, growing h.
for lo, hi, cls in stability_intervals(ATSH5_MINERR, omega=1.0, epsilon=0.1, h_max=6.0):
    print(f"  h in [{lo:.3f}, {hi:.3f}]: {cls.name.lower()}")

# The same scan through the command line, ready for plotting.
out = Path(sys.argv[1] if len(sys.argv) > 1 else "stability_minerr.csv")
main(["stability", "atsh5-minerr", "--grid", "201", "--nu-max", str(3 * math.pi),
      "--out", str(out), "--plot-script"])
print("wrote", out, "and", out.with_name(out.stem + "_plot.py"))
