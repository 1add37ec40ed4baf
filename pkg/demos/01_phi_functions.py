"""
phi-functions and the cosine recurrence
=======================================

The adapted coefficients are built from phi_j(nu). This walk-through shows
their small-nu limits, the two-term recurrence that ties them together and
the point where evaluation switches from the series to the closed form.
"""

import math

import numpy as np

from atsh.phi import g_function, phi, phi_closed, phi_series, phi_table, switch_threshold

# At nu = 0 every phi_j collapses to 1/j!.
for j in range(6):
    print(f"phi_{j}(0) = {phi(j, 0.0):.12f}   1/{j}! = {1 / math.factorial(j):.12f}")

# The recurrence phi_j + nu^2 phi_{j+2} = 1/j! holds for every nu.
nu = 2.5
for j in range(5):
    lhs = phi(j, nu) + nu**2 * phi(j + 2, nu)
    print(f"j = {j}: phi_j + nu^2 phi_(j+2) - 1/j! = {lhs - 1 / math.factorial(j):+.1e}")

# Below the switch the closed form cancels badly; the series does not.
j = 6
nu_s = switch_threshold(j)
for nu in (0.5 * nu_s, nu_s, 2 * nu_s):
    print(f"nu = {nu:6.3f}: series {phi_series(j, nu):.16e}  closed {phi_closed(j, nu):.16e}")
print(f"closed form at nu = 1e-3: {phi_closed(j, 1e-3):.3e} (true value {1 / math.factorial(j):.3e})")

# A whole table at once, and the G-function scaling G_j(h) = h^j phi_j(omega h).
table = phi_table(0.3)
print("phi_0..6(0.3) =", np.round([table[j] for j in range(7)], 10))
print("G_3(0.1) at omega = 10:", g_function(3, 0.1, 10.0))
