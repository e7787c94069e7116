"""Benchmark models: a two-mass spring/dashpot chain and a dephasing two-qubit chain."""
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .errors import InvalidDelta
from .fixed_point import PerturbationFamily
from .lti import StateSpaceModel

__all__ = [
    "SmdParams",
    "smd_matrices",
    "smd_model",
    "smd_structure",
    "smd_colocation_Sc",
    "SMD_PARAMETERS",
    "QubitParams",
    "BlochModel",
    "two_qubit_bloch",
    "gamma_structure",
    "nonlinear_family",
    "fidelity_analytic",
    "fidelity_simulate",
    "transfer_time",
    "peak_fidelity",
    "max_fidelity",
    "R_LEFT",
    "R_RIGHT",
]

SMD_PARAMETERS = ("k1", "k2", "b1", "b2")
R_LEFT = np.array([0.0, 0.0, 1.0])
R_RIGHT = np.array([0.0, 0.0, -1.0])
J_MIN = 1e-9


@dataclass(frozen=True)
class SmdParams:
    """Masses (kg), stiffnesses (N/m) and damping rates (N s/m)."""

    m1: float = 3.0
    m2: float = 1.0
    k1: float = 1.0
    k2: float = 1.0
    b1: float = 0.1
    b2: float = 0.1

    def __post_init__(self):
        for name in ("m1", "m2", "k1", "k2", "b1", "b2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


def smd_matrices(p):
    """``(A, B, C)`` of the two-mass chain with force inputs and rate outputs.

    The lower blocks use the mass denominators column by column, so row one
    of the stiffness block reads ``[-k1/m1, k1/m2]``.
    """
    M1 = np.array([[-p.k1 / p.m1, p.k1 / p.m2],
                   [p.k1 / p.m1, -(p.k1 + p.k2) / p.m2]])
    M2 = np.array([[-p.b1 / p.m1, p.b1 / p.m2],
                   [p.b1 / p.m1, -(p.b1 + p.b2) / p.m2]])
    Z, I = np.zeros((2, 2)), np.eye(2)
    A = np.block([[Z, I], [M1, M2]])
    B = np.vstack([Z, I])
    C = np.array([[0.0, 0.0, 1.0 / p.m1, 0.0],
                  [0.0, 0.0, 0.0, 1.0 / p.m2]])
    return A, B, C


def smd_model(p=SmdParams()):
    return StateSpaceModel(*smd_matrices(p))


def smd_structure(p, which):
    """``S`` with ``A(param * (1 + delta)) = A + delta * S``.

    ``A`` is affine in each parameter with no constant part, so ``S`` is the
    difference between ``A`` and ``A`` with that parameter set to zero.
    """
    if which not in SMD_PARAMETERS:
        raise ValueError(f"which must be one of {SMD_PARAMETERS}")
    A = smd_matrices(p)[0]
    # bypass validation: the parameter is zeroed only to isolate its term
    zeroed = object.__new__(SmdParams)
    for name in ("m1", "m2", "k1", "k2", "b1", "b2"):
        object.__setattr__(zeroed, name, 0.0 if name == which else getattr(p, name))
    return A - smd_matrices(zeroed)[0]


def smd_colocation_Sc(p=SmdParams()):
    """Output perturbation blending the two rate channels."""
    return np.array([[0.0, 0.0, 0.0, 1.0 / p.m2],
                     [0.0, 0.0, 1.0 / p.m1, 0.0]])


@dataclass(frozen=True)
class QubitParams:
    """Detuning ``Delta``, coupling ``J`` (rad/s) and dephasing rate ``gamma`` (1/s)."""

    Delta: float = 0.0
    J: float = 1.0
    gamma: float = 0.01

    def __post_init__(self):
        if abs(self.J) < J_MIN:
            raise InvalidDelta(f"|J| must exceed {J_MIN:g}, got {self.J!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")

    @property
    def J_eff(self):
        return math.sqrt(self.Delta ** 2 + 4 * self.J ** 2)


@dataclass(frozen=True)
class BlochModel:
    """Bloch-vector generator ``A = A_H + A_L`` with the infidelity output ``C_u``."""

    params: QubitParams
    A_H: np.ndarray
    A_L: np.ndarray
    C_u: np.ndarray = field(default_factory=lambda: 0.5 * np.array([[0.0, 0.0, 1.0]]))
    r_L: np.ndarray = field(default_factory=lambda: R_LEFT.copy())
    r_R: np.ndarray = field(default_factory=lambda: R_RIGHT.copy())

    def __post_init__(self):
        A_H, A_L = self.A_H, self.A_L
        scale = max(1.0, np.abs(A_H).max(), np.abs(A_L).max())
        if not np.allclose(A_H, -A_H.T, atol=1e-12 * scale):
            raise ValueError("A_H must be antisymmetric")
        if not np.allclose(A_L, A_L.T, atol=1e-12 * scale):
            raise ValueError("A_L must be symmetric")
        if np.linalg.eigvalsh(A_L).max() > 1e-12 * scale:
            raise ValueError("A_L must be negative semidefinite")
        q = self.params
        expected = np.array([0.0, -q.gamma + 1j * q.J_eff, -q.gamma - 1j * q.J_eff])
        ev = np.linalg.eigvals(self.A)
        for lam in expected:
            if np.min(np.abs(ev - lam)) > 1e-9 * scale:
                raise ValueError(f"spectrum {ev} does not contain {lam}")

    @property
    def A(self):
        return self.A_H + self.A_L


def two_qubit_bloch(q=QubitParams()):
    D, J, g = q.Delta, q.J, q.gamma
    A_H = np.array([[0.0, D, 0.0],
                    [-D, 0.0, -2 * J],
                    [0.0, 2 * J, 0.0]])
    Je2 = q.J_eff ** 2
    A_L = -g / Je2 * np.array([[D ** 2, 0.0, 2 * D * J],
                               [0.0, Je2, 0.0],
                               [2 * D * J, 0.0, 4 * J ** 2]])
    return BlochModel(q, A_H, A_L)


def gamma_structure(q=QubitParams()):
    """``S`` with ``A(gamma * (1 + delta)) = A + delta * S``, i.e. ``A_L`` at ``gamma``."""
    if not q.gamma > 0:
        raise ValueError("gamma structure needs gamma > 0")
    return two_qubit_bloch(q).A_L.copy()


def _shifted(q, which, delta):
    if which == "Delta":
        return replace(q, Delta=q.Delta + delta)
    if which == "J":
        if abs(q.J + delta) < J_MIN:
            raise InvalidDelta(f"J0 + delta = {q.J + delta:g} makes J_eff degenerate")
        return replace(q, J=q.J + delta)
    if which == "gamma":
        if q.gamma * (1 + delta) < 0:
            raise InvalidDelta(f"gamma * (1 + delta) < 0 for delta={delta:g}")
        return replace(q, gamma=q.gamma * (1 + delta))
    raise ValueError("which must be 'Delta', 'J' or 'gamma'")


def nonlinear_family(q=QubitParams(), which="Delta", formulation="unperturbed", tol=1e-6):
    """Error systems for a shift of one qubit parameter.

    ``Delta`` and ``J`` shift additively, ``gamma`` relatively
    (``gamma0 * (1 + delta)``). The perturbation is ``A_p(delta) - A``; the
    unperturbed formulation uses ``(A_p, A_p - A, C_u, 0)`` and the perturbed
    one ``(A, A_p - A, C_u, 0)``.
    """
    if formulation not in ("unperturbed", "perturbed"):
        raise ValueError("formulation must be 'unperturbed' or 'perturbed'")
    nominal = two_qubit_bloch(q)
    A, C = nominal.A, nominal.C_u

    def model(delta):
        if which == "gamma":
            # linear in gamma; the perturbed formulation also accepts delta < -1
            Ap = A + delta * nominal.A_L
        else:
            Ap = two_qubit_bloch(_shifted(q, which, delta)).A
        drive = Ap - A
        return StateSpaceModel(Ap if formulation == "unperturbed" else A, drive, C)

    if which not in ("Delta", "J", "gamma"):
        raise ValueError("which must be 'Delta', 'J' or 'gamma'")
    lo, hi = -math.inf, math.inf
    if which == "gamma" and formulation == "unperturbed":
        lo = -1.0
    return PerturbationFamily(model, (lo, hi), f"{which}/{formulation}", tol)


def fidelity_analytic(t, q=QubitParams()):
    """``2J^2/J_eff^2 * (1 - exp(-gamma t) cos(J_eff t))``; vectorized in ``t``."""
    t = np.asarray(t, dtype=float)
    return 2 * q.J ** 2 / q.J_eff ** 2 * (1 - np.exp(-q.gamma * t) * np.cos(q.J_eff * t))


def fidelity_simulate(t, q=QubitParams(), r0=R_LEFT):
    """``(1 - z(t)) / 2`` with ``r(t) = expm(t A) r0``; vectorized in ``t``."""
    r0 = np.asarray(r0, dtype=float)
    if np.linalg.norm(r0) > 1 + 1e-12:
        raise ValueError("r0 must lie in the unit ball")
    A = two_qubit_bloch(q).A
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0):
        raise ValueError("t must be nonnegative")
    z = np.array([(expm(tk * A) @ r0)[2] for tk in ts])
    out = 0.5 * (1 - z)
    return out if np.ndim(t) else float(out[0])


def transfer_time(q=QubitParams()):
    """First fidelity maximum ``pi / J_eff``."""
    return math.pi / q.J_eff


def peak_fidelity(q=QubitParams()):
    """Fidelity at the transfer time: ``2J^2/J_eff^2 * (1 + exp(-gamma t_f))``."""
    return 2 * q.J ** 2 / q.J_eff ** 2 * (1 + math.exp(-q.gamma * transfer_time(q)))


def max_fidelity(q=QubitParams()):
    """Dephasing-free peak ``4J^2/J_eff^2``."""
    return 4 * q.J ** 2 / q.J_eff ** 2
