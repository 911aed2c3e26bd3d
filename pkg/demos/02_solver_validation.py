"""
Checking the field solver against closed forms
==============================================

Parallel plates have an exact answer; microstrip has the Hammerstad-Jensen
formulas.  A grid-halving run on a real lattice shows discretization error.
"""

import time

from fiberweave.validation import (grid_convergence_case, hammerstad_jensen, microstrip_line,
                                   run_validation)

# A single microstrip, w/h = 1 on er = 4, compared by hand
p = microstrip_line(1.0, 1.0, 4.0, 1 / 16, 1 / 16)
e, z = hammerstad_jensen(1.0, 4.0, 1 / 16)
print(f"solver eps_eff {p.eps_eff:.4f} z0 {p.z0:.2f} ohm")
print(f"closed  eps_eff {e:.4f} z0 {z:.2f} ohm")

# Grid convergence on 1035, trace over the hill
c = grid_convergence_case()
print(c.line())

# Everything at once
t0 = time.perf_counter()
cases = run_validation(log=lambda s: None)
print(f"{sum(c.passed for c in cases)}/{len(cases)} cases passed "
      f"in {time.perf_counter() - t0:.1f} s")
