"""State-space models, resolvents and the two error-dynamics realizations.

The error ``e = C_p r_p - C_u r_u`` between a perturbed system
``(A + delta*S, C_p)`` and its nominal model ``(A, C_u)`` has two
disturbance-free realizations sharing the state ``z = r_p - r_u``:

* driven by the nominal state ``w_u``::

      z' = (A + delta*S) z + delta*S w_u,   e = C_p z + (C_p - C_u) w_u

* driven by the perturbed state ``w_p``::

      z' = A z + delta*S w_p,               e = C_u z + (C_p - C_u) w_p

Their transfer matrices differ by the frequency correction factor
``(sI - A)^{-1} (sI - A - delta*S)``.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SingularResolvent

__all__ = [
    "RCOND_MIN",
    "Stability",
    "StateSpaceModel",
    "StructuredPerturbation",
    "FrequencyGrid",
    "classify_stability",
    "resolvent",
    "transfer_eval",
    "freqresp",
    "error_system_unperturbed",
    "error_system_perturbed",
    "scaling_identity_residual",
    "eigenfrequencies",
    "frequency_grid",
    "damp",
]

#: Reciprocal condition number below which ``sI - A`` counts as singular.
RCOND_MIN = 1e-12


class Stability(str, Enum):
    HURWITZ = "strictly-hurwitz"
    MARGINAL = "marginally-stable"
    UNSTABLE = "unstable"


def _as_matrix(x, name, dtype=float):
    a = np.array(x, dtype=dtype)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    a.setflags(write=False)
    return a


def _axis_tol(A):
    return 1e-9 * max(1.0, float(np.linalg.norm(A, np.inf))) if A.size else 1e-9


def classify_stability(A):
    """Classify ``A`` from its eigenvalues.

    Eigenvalues with ``|Re(lambda)|`` under ``1e-9 * max(1, ||A||_inf)`` are
    treated as lying on the imaginary axis.
    """
    A = np.asarray(A)
    if A.size == 0:
        return Stability.HURWITZ
    re = np.linalg.eigvals(A).real
    tol = _axis_tol(A)
    if np.any(re > tol):
        return Stability.UNSTABLE
    if np.any(re >= -tol):
        return Stability.MARGINAL
    return Stability.HURWITZ


@dataclass(frozen=True)
class StateSpaceModel:
    """Continuous-time LTI model ``x' = Ax + Bu, y = Cx + Du``.

    ``D`` defaults to zeros. Arrays are copied and frozen on construction,
    and ``stability`` is recomputed from the eigenvalues of ``A``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray = None
    stability: Stability = field(init=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            if A.size == 0:
                A = np.zeros((0, 0))
            else:
                raise ValueError(f"A must be square, got shape {A.shape}")
        A.setflags(write=False)
        n = A.shape[0]
        B = np.array(self.B, dtype=float)
        C = np.array(self.C, dtype=float)
        if n == 0:
            D = _as_matrix(self.D, "D")
            B = np.zeros((0, D.shape[1]))
            C = np.zeros((D.shape[0], 0))
        else:
            B = B.reshape(n, -1) if B.ndim < 2 else B
            C = C.reshape(-1, n) if C.ndim < 2 else C
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        if self.D is None:
            D = np.zeros((C.shape[0], B.shape[1]))
        else:
            D = np.array(self.D, dtype=float).reshape(C.shape[0], B.shape[1])
        for a in (B, C, D):
            a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "stability", classify_stability(A))

    @property
    def nstates(self):
        return self.A.shape[0]

    @property
    def ninputs(self):
        return self.B.shape[1]

    @property
    def noutputs(self):
        return self.C.shape[0]

    def __call__(self, s):
        return transfer_eval(self, s)


@dataclass(frozen=True)
class StructuredPerturbation:
    """Perturbation ``A -> A + delta*S`` and optionally ``C -> C + delta_c*S_c``."""

    S: np.ndarray
    delta: float = 0.0
    S_c: np.ndarray = None
    delta_c: float = None

    def __post_init__(self):
        S = _as_matrix(self.S, "S")
        if S.shape[0] != S.shape[1]:
            raise ValueError(f"S must be square, got shape {S.shape}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "delta", float(self.delta))
        if self.S_c is not None:
            S_c = _as_matrix(self.S_c, "S_c")
            if S_c.shape[1] != S.shape[0]:
                raise ValueError(f"S_c must have {S.shape[0]} columns, got {S_c.shape}")
            object.__setattr__(self, "S_c", S_c)
            object.__setattr__(self, "delta_c",
                               0.0 if self.delta_c is None else float(self.delta_c))
        elif self.delta_c not in (None, 0, 0.0):
            raise ValueError("delta_c given without S_c")

    def perturbed_A(self, A):
        return np.asarray(A, dtype=float) + self.delta * self.S

    def perturbed_C(self, C_u):
        C_u = np.asarray(C_u, dtype=float)
        if self.S_c is None:
            return C_u.copy()
        if self.S_c.shape != C_u.shape:
            raise ValueError(f"S_c shape {self.S_c.shape} does not match C {C_u.shape}")
        return C_u + self.delta_c * self.S_c


def _shifted(A, s):
    A = np.asarray(A)
    n = A.shape[0]
    return s * np.eye(n, dtype=complex) - A


def _checked_inverse(M, s):
    try:
        inv = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        raise SingularResolvent(s, 0.0) from None
    if not np.all(np.isfinite(inv)):
        raise SingularResolvent(s, 0.0)
    rcond = 1.0 / (np.linalg.norm(M, 1) * np.linalg.norm(inv, 1))
    if rcond < RCOND_MIN:
        raise SingularResolvent(s, rcond)
    return inv


def resolvent(A, s):
    """Return ``(sI - A)^{-1}``.

    Raises
    ------
    SingularResolvent
        If the reciprocal 1-norm condition number of ``sI - A`` is below
        :data:`RCOND_MIN`.
    """
    return _checked_inverse(_shifted(A, s), s)


def transfer_eval(ss, s):
    """Evaluate ``C (sI - A)^{-1} B + D`` at the complex point ``s``."""
    if ss.nstates == 0:
        return ss.D.astype(complex)
    return ss.C @ (resolvent(ss.A, s) @ ss.B) + ss.D


def freqresp(ss, omegas):
    """Stack of ``T(i*omega)`` for each omega; shape ``(len(omegas), p, m)``."""
    return np.array([transfer_eval(ss, 1j * w) for w in np.atleast_1d(omegas)])


def _error_inputs(A, pert, C_u, C_p):
    A = np.asarray(A, dtype=float)
    C_u = np.atleast_2d(np.asarray(C_u, dtype=float))
    if C_p is None:
        C_p = pert.perturbed_C(C_u)
    C_p = np.atleast_2d(np.asarray(C_p, dtype=float))
    n = A.shape[0]
    if pert.S.shape != (n, n):
        raise ValueError(f"S shape {pert.S.shape} does not match A {A.shape}")
    if C_u.shape != C_p.shape or C_u.shape[1] != n:
        raise ValueError(f"C_u {C_u.shape} and C_p {C_p.shape} must both be p x {n}")
    return A, C_u, C_p


def error_system_unperturbed(A, pert, C_u, C_p=None):
    """Error dynamics driven by the nominal state.

    Returns the realization ``(A + delta*S, delta*S, C_p, C_p - C_u)``. When
    ``C_p`` is omitted it is taken from ``pert`` (``C_u + delta_c*S_c``).
    """
    A, C_u, C_p = _error_inputs(A, pert, C_u, C_p)
    dS = pert.delta * pert.S
    return StateSpaceModel(A + dS, dS, C_p, C_p - C_u)


def error_system_perturbed(A, pert, C_u, C_p=None):
    """Error dynamics driven by the perturbed state: ``(A, delta*S, C_u, C_p - C_u)``."""
    A, C_u, C_p = _error_inputs(A, pert, C_u, C_p)
    return StateSpaceModel(A, pert.delta * pert.S, C_u, C_p - C_u)


def scaling_identity_residual(A, pert, C_u, C_p=None, omega=1.0):
    """Norm of ``T^p - T^u (iwI - A)^{-1} (iwI - A - delta*S)`` at ``s = i*omega``.

    Both error transfer matrices and the correction factor are evaluated
    independently, so a small residual certifies the two realizations agree.
    """
    s = 1j * float(omega)
    Tu = transfer_eval(error_system_unperturbed(A, pert, C_u, C_p), s)
    Tp = transfer_eval(error_system_perturbed(A, pert, C_u, C_p), s)
    Ap = pert.perturbed_A(A)
    resolvent(Ap, s)  # the identity needs both resolvents to exist
    factor = resolvent(A, s) @ _shifted(Ap, s)
    return float(np.linalg.norm(Tp - Tu @ factor, 2))


def eigenfrequencies(A, rtol=1e-9):
    """Distinct nonzero ``|Im(lambda)|`` over the spectrum of ``A``, ascending."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return []
    im = np.sort(np.abs(np.linalg.eigvals(A).imag))
    im = im[im > _axis_tol(A)]
    out = []
    for w in im:
        if not out or w - out[-1] > rtol * max(w, out[-1]):
            out.append(float(w))
    return out


@dataclass(frozen=True)
class FrequencyGrid:
    """Sorted frequency points in rad/s."""

    points: np.ndarray
    includes_eigenfrequencies: bool = False
    excludes_zero: bool = True

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("frequency grid is empty")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if self.excludes_zero and pts[0] <= 0:
            raise ValueError("grid flagged excludes_zero but contains omega <= 0")
        if pts[0] < 0:
            raise ValueError("frequencies must be nonnegative")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points.tolist())

    def contains(self, freqs, rtol=1e-12):
        """True when every frequency in ``freqs`` is a grid point."""
        for w in freqs:
            idx = np.searchsorted(self.points, w)
            near = [self.points[i] for i in (idx - 1, idx) if 0 <= i < len(self.points)]
            if not any(abs(p - w) <= rtol * max(1.0, abs(w)) for p in near):
                return False
        return True

    def excluding(self, centers, radius):
        """Copy of the grid with points within ``radius`` of any center removed."""
        pts = self.points
        keep = np.ones(pts.size, dtype=bool)
        for c in centers:
            keep &= np.abs(pts - c) > radius
        if not keep.any():
            raise ValueError("exclusion windows removed every grid point")
        return FrequencyGrid(pts[keep], includes_eigenfrequencies=False,
                             excludes_zero=self.excludes_zero)


def _merge(points, extra):
    pts = np.concatenate([np.asarray(points, dtype=float), np.asarray(extra, dtype=float)])
    pts = np.unique(pts)
    # unique() keeps near-duplicates; drop those closer than 1e-12 relative
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * np.maximum(1.0, pts[1:])])
    return pts[keep]


def frequency_grid(lo=1e-2, hi=1e2, n=400, log=True, A=None, S=None, deltas=(),
                   include_zero=False):
    """Build a sweep grid, merged with the eigenfrequencies of ``A``.

    Parameters
    ----------
    lo, hi, n, log
        Base grid: ``n`` points on ``[lo, hi]``, log-spaced by default.
    A : array_like, optional
        State matrix whose eigenfrequencies inside ``[lo, hi]`` are merged in.
    S, deltas : optional
        Also merge the eigenfrequencies of ``A + delta*S`` for each sampled delta.
    include_zero : bool
        Prepend ``omega = 0``. Refused when ``A`` is singular; damp it first
        with :func:`damp`.
    """
    if lo <= 0 and log:
        raise ValueError("log-spaced grids need lo > 0")
    if hi <= lo or n < 1:
        raise ValueError("need hi > lo and n >= 1")
    base = np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)
    extra = []
    if A is not None:
        A = np.asarray(A, dtype=float)
        mats = [A] + [A + d * np.asarray(S, dtype=float) for d in deltas if S is not None]
        for M in mats:
            extra.extend(w for w in eigenfrequencies(M) if lo <= w <= hi)
    pts = _merge(base, extra)
    excludes_zero = pts[0] > 0
    if include_zero:
        if A is not None and abs(np.linalg.det(A)) < 1e-12 * max(1.0, np.linalg.norm(A)) ** A.shape[0]:
            raise ValueError("A is singular at omega = 0; apply epsilon damping first")
        if pts[0] > 0:
            pts = np.concatenate([[0.0], pts])
        excludes_zero = False
    return FrequencyGrid(pts, includes_eigenfrequencies=A is not None,
                         excludes_zero=excludes_zero)


def damp(A, eps=1e-6):
    """Shift ``A`` to ``A - eps*I`` so that a pole at the origin moves off the axis."""
    A = np.asarray(A, dtype=float)
    return A - eps * np.eye(A.shape[0])
