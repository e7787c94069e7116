"""
Excitation transfer fidelity
============================

The closed-form fidelity against a matrix-exponential simulation of the
Bloch equation, then the detuning trade-off: faster transfer, lower peak.
"""
import numpy as np

from robustsweep.models import (QubitParams, fidelity_analytic, fidelity_simulate,
                                max_fidelity, peak_fidelity, transfer_time)

q = QubitParams(Delta=0.0, J=1.0, gamma=0.01)
t = np.linspace(0, 20, 2001)
diff = np.abs(fidelity_analytic(t, q) - fidelity_simulate(t, q))
print(f"max |analytic - simulated| over [0, 20]: {diff.max():.2e}")
print(f"t_f = {transfer_time(q):.6f}, F(t_f) = {peak_fidelity(q):.6f}")

print("\n Delta    t_f     F_max")
for D in np.linspace(0, 3, 7):
    qd = QubitParams(Delta=D, J=1.0, gamma=0.0)
    print(f"{D:5.2f}  {transfer_time(qd):.4f}  {max_fidelity(qd):.4f}")
