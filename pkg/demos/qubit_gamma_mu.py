"""
Dephasing uncertainty in a two-qubit transfer
=============================================

The Bloch generator has a pole at the origin, so the sweep stays on a log
grid away from zero. The unperturbed bound certifies closed-loop stability;
the perturbed one is tighter but only describes the error gain.
"""
import numpy as np

from robustsweep.lti import frequency_grid
from robustsweep.models import QubitParams, gamma_structure, two_qubit_bloch
from robustsweep.ssv import mu_bounds, mu_sweep
from robustsweep.uncert import g_perturbed_basic, g_unperturbed_basic

q = QubitParams(Delta=0.0, J=1.0, gamma=0.01)
m = two_qubit_bloch(q)
print("spectrum of A:", np.round(np.linalg.eigvals(m.A), 6))

S = gamma_structure(q)  # gamma -> gamma (1 + delta)
Gu = g_unperturbed_basic(m.A, S, m.C_u)
Gp = g_perturbed_basic(m.A, S, None, m.C_u)

sw = mu_sweep(Gu, frequency_grid(A=m.A))
w, mu = sw.peak
print(f"unperturbed peak mu = {mu:.4f} at omega = {w:.4f}; margin |delta| < {1 / mu:.4f}")

b = mu_bounds(Gp(2j), Gp.structure, 2.0)
print(f"perturbed mu at omega = 2: [{b.lower:.4f}, {b.upper:.4f}]")
