"""Robust-performance analysis of uncertain LTI error dynamics.

Structured singular value bounds over frequency, H-infinity norms, and
fixed-point uncertainty margins for parameters that enter nonlinearly.
"""
from .errors import (InvalidDelta, MaxIterExceeded, NoIntersection, SingularLftLoop,
                     SingularResolvent, StructureMismatch, UnstableSystem)
from .fixed_point import (FixedPointResult, PerturbationFamily, delta_bounds, delta_scan,
                          fixed_point_iterate)
from .hinf import HinfResult, hinf_norm, hinf_norm_grid
from .lti import (FrequencyGrid, StateSpaceModel, StructuredPerturbation, error_system_perturbed,
                  error_system_unperturbed, frequency_grid, resolvent, scaling_identity_residual,
                  transfer_eval)
from .models import (QubitParams, SmdParams, fidelity_analytic, fidelity_simulate,
                     gamma_structure, nonlinear_family, smd_colocation_Sc, smd_model,
                     smd_structure, two_qubit_bloch)
from .ssv import MuBounds, mu_bounds, mu_lower, mu_sweep, mu_upper
from .uncert import (BlockStructure, FullComplex, Interconnection, RepeatedRealScalar,
                     direct_bound_perturbed, g_perturbed_basic, g_perturbed_z0,
                     g_unperturbed_basic, g_unperturbed_general, lft_upper)

__version__ = "0.1.0"
