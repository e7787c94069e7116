"""
Margins for parameters that enter nonlinearly
=============================================

Detuning and coupling enter the Bloch generator through J_eff, so the
perturbation is A_p(delta) - A rather than delta*S. The margin on each side
is the first delta where |delta| * ||T(delta)||_inf reaches one.
"""
import numpy as np

from robustsweep.fixed_point import delta_bounds
from robustsweep.models import QubitParams, nonlinear_family

for gamma0 in (0.01, 0.1):
    q = QubitParams(gamma=gamma0)
    print(f"gamma0 = {gamma0}")
    for which in ("Delta", "J", "gamma"):
        for form in ("unperturbed", "perturbed"):
            res = delta_bounds(nonlinear_family(q, which, form))
            how = res.trace["positive"].method
            print(f"  {which:5s} {form:11s}  [{res.delta_min:+.4f}, {res.delta_max:+.4f}]"
                  f"  mu_inf = {res.mu_inf:.4f}  ({how})")

# the curve behind one margin: the crossing of ||T(delta)|| with 1/|delta|
fam = nonlinear_family(QubitParams(), "gamma", "unperturbed")
print("\n  delta    ||T||     1/delta")
for d in np.geomspace(0.5, 6, 8):
    print(f"{d:7.3f}  {fam.norm(d):7.4f}  {1 / d:7.4f}")
