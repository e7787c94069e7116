"""H-infinity norm of continuous-time state-space models.

Strictly stable models use the two-step Hamiltonian iteration: the lower
bound is raised by evaluating the frequency response between consecutive
imaginary-axis eigenvalues of the Hamiltonian until none remain. Modes on
or right of the imaginary axis are removed first when they do not reach the
output (all Markov parameters of that part vanish). Marginal modes that do
reach the output are handled on a frequency grid with small exclusion
windows around the axis poles.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur, solve_sylvester
from scipy.optimize import minimize_scalar

from .errors import SingularResolvent, UnstableSystem
from .lti import RCOND_MIN, Stability, StateSpaceModel, _axis_tol, frequency_grid, transfer_eval

__all__ = ["HinfResult", "hinf_norm", "hinf_norm_grid", "deflate_axis_modes", "EXCLUSION_RADIUS"]

EXCLUSION_RADIUS = 1e-4
_MARKOV_TOL = 1e-9


@dataclass(frozen=True)
class HinfResult:
    """Norm value and where it was attained.

    ``method`` is ``"bisection"`` or ``"grid"``. ``flags`` records policy
    events such as ``"deflated"`` or ``"marginal-grid"``.
    """

    norm: float
    peak_frequency: float
    method: str
    iterations: int
    flags: tuple = ()

    def __float__(self):
        return float(self.norm)


def _sigma_max(ss, w):
    return float(np.linalg.norm(transfer_eval(ss, 1j * w), 2))


def _split(A, tol):
    """Block-diagonalize ``A`` into (stable, other) parts: returns ``(V, W, k)``.

    ``W @ A @ V`` is block-diagonal with the stable block in the leading
    ``k x k`` corner and ``W = inv(V)``.
    """
    T, Z, k = schur(A, output="real", sort=lambda re, im: re < -tol)
    n = A.shape[0]
    if k in (0, n):
        return Z, Z.T, k
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    X = solve_sylvester(T11, -T22, -T12)
    V = np.eye(n)
    V[:k, k:] = X
    Vi = np.eye(n)
    Vi[:k, k:] = -X
    return Z @ V, Vi @ Z.T, k


def deflate_axis_modes(ss):
    """Split off modes with ``Re(lambda) >= -tol``.

    Returns ``(reduced, residual)`` where ``reduced`` keeps only the strictly
    stable modes and ``residual`` is the largest Markov-parameter norm of the
    removed part relative to ``||C|| ||B||``. The transfer function is
    unchanged when ``residual`` is below ``1e-9``.
    """
    A = ss.A
    if A.shape[0] == 0:
        return ss, 0.0
    tol = _axis_tol(A)
    V, W, k = _split(A, tol)
    At = W @ A @ V
    Bt, Ct = W @ ss.B, ss.C @ V
    A2, B2, C2 = At[k:, k:], Bt[k:], Ct[:, k:]
    scale = max(np.linalg.norm(ss.C, 2) * np.linalg.norm(ss.B, 2), np.finfo(float).tiny)
    nrm = max(1.0, np.linalg.norm(A2, 2))
    res, X = 0.0, B2
    for j in range(A2.shape[0]):
        res = max(res, np.linalg.norm(C2 @ X, 2) / (scale * nrm ** j))
        X = A2 @ X
    reduced = StateSpaceModel(At[:k, :k], Bt[:k], Ct[:, :k], ss.D)
    return reduced, float(res)


def _hamiltonian(ss, gamma):
    A, B, C, D = ss.A, ss.B, ss.C, ss.D
    m, p = D.shape[1], D.shape[0]
    R = gamma ** 2 * np.eye(m) - D.T @ D
    Ri = np.linalg.inv(R)
    Ah = A + B @ Ri @ D.T @ C
    H12 = B @ Ri @ B.T
    H21 = -C.T @ (np.eye(p) + D @ Ri @ D.T) @ C
    return np.block([[Ah, H12], [H21, -Ah.T]])


def _axis_frequencies(H):
    ev = np.linalg.eigvals(H)
    tol = 1e-8 * max(1.0, np.linalg.norm(H, 1))
    w = np.sort(np.abs(ev[np.abs(ev.real) < tol].imag))
    return w


def _bisection(ss, tol, max_iter=100):
    A = ss.A
    dnorm = np.linalg.norm(ss.D, 2) if ss.D.size else 0.0
    cands = [0.0]
    for lam in np.linalg.eigvals(A):
        cands += [abs(lam.imag), abs(lam)]
    best_w, best = np.inf, dnorm
    for w in sorted(set(cands)):
        g = _sigma_max(ss, w)
        if g > best:
            best, best_w = g, w
    if best == 0.0:
        return HinfResult(0.0, 0.0, "bisection", 0)
    it = 0
    while it < max_iter:
        it += 1
        gamma = (1 + 2 * tol) * best
        w = _axis_frequencies(_hamiltonian(ss, gamma))
        if w.size == 0:
            peak = 0.0 if not np.isfinite(best_w) else best_w
            return HinfResult(float(gamma), float(peak), "bisection", it)
        mids = (w[:-1] + w[1:]) / 2 if w.size > 1 else w
        improved = False
        for m in np.concatenate([mids, w]):
            g = _sigma_max(ss, m)
            if g > best:
                best, best_w, improved = g, m, True
        if not improved:
            # eigenvalues flagged on the axis by roundoff; the bound is tight
            return HinfResult(float(gamma), float(best_w), "bisection", it, ("stalled",))
    return HinfResult(float((1 + 2 * tol) * best), float(best_w), "bisection", it, ("max-iter",))


def _grid_sigma(ss, w):
    """``sigma_max(T(i*w))`` for an array of frequencies; ``nan`` where singular."""
    n = ss.nstates
    K = 1j * w[:, None, None] * np.eye(n) - ss.A
    try:
        Ki = np.linalg.inv(K)
    except np.linalg.LinAlgError:
        out = np.empty(w.size)
        for i, wi in enumerate(w):
            try:
                out[i] = _sigma_max(ss, wi)
            except SingularResolvent:
                out[i] = np.nan
        return out
    rcond = 1.0 / (np.linalg.norm(K, 1, axis=(1, 2)) * np.linalg.norm(Ki, 1, axis=(1, 2)))
    T = ss.C @ Ki @ ss.B + ss.D
    out = np.linalg.norm(T, 2, axis=(1, 2))
    out[~(rcond >= RCOND_MIN)] = np.nan
    return out


def hinf_norm_grid(ss, grid):
    """Largest ``sigma_max(T(i*omega))`` over ``grid``, skipping singular points."""
    w = np.asarray(list(grid), dtype=float)
    if ss.nstates == 0:
        d = float(np.linalg.norm(ss.D, 2)) if ss.D.size else 0.0
        return HinfResult(d, float(w[0]), "grid", w.size)
    g = _grid_sigma(ss, w)
    ok = np.isfinite(g)
    if not ok.any():
        raise SingularResolvent(1j * w[0], 0.0)
    k = int(np.flatnonzero(ok)[np.argmax(g[ok])])
    return HinfResult(float(g[k]), float(w[k]), "grid", int(ok.sum()))


def _refine(ss, grid, res, axis, radius):
    pts = grid.points
    k = int(np.searchsorted(pts, res.peak_frequency))
    lo = pts[max(k - 1, 0)]
    hi = pts[min(k + 1, len(pts) - 1)]
    w0 = res.peak_frequency
    for c in axis:  # keep the search outside the exclusion windows
        if lo < c < w0:
            lo = max(lo, c + radius)
        elif w0 < c < hi:
            hi = min(hi, c - radius)
    if hi <= lo:
        return res
    opt = minimize_scalar(lambda w: -_sigma_max(ss, w), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * max(1.0, hi)})
    if -opt.fun > res.norm:
        return HinfResult(float(-opt.fun), float(opt.x), "grid", res.iterations + opt.nfev,
                          res.flags)
    return res


def hinf_norm(ss, tol=1e-6, grid=None, unstable="raise"):
    """H-infinity norm of ``ss``.

    Parameters
    ----------
    ss : StateSpaceModel
    tol : float
        Relative tolerance of the bisection. The returned value is an upper
        estimate, so it is never below the response at any frequency.
    grid : FrequencyGrid, optional
        Grid for the marginal fallback; defaults to 400 log points on
        ``[1e-2, 1e2]`` merged with the eigenfrequencies of ``A``.
    unstable : {"raise", "inf"}
        What to do when unstable modes reach the output: raise
        :class:`UnstableSystem` or return an infinite norm.

    Returns
    -------
    HinfResult
    """
    if ss.nstates == 0 or not np.any(ss.B) or not np.any(ss.C):
        d = float(np.linalg.norm(ss.D, 2)) if ss.D.size else 0.0
        return HinfResult(d, 0.0, "bisection", 0)
    flags = ()
    if ss.stability is not Stability.HURWITZ:
        reduced, res = deflate_axis_modes(ss)
        if res <= _MARKOV_TOL:
            out = _bisection(reduced, tol) if reduced.nstates else HinfResult(
                float(np.linalg.norm(ss.D, 2)), 0.0, "bisection", 0)
            return HinfResult(out.norm, out.peak_frequency, out.method, out.iterations,
                              out.flags + ("deflated",))
        if ss.stability is Stability.UNSTABLE:
            if unstable == "inf":
                return HinfResult(np.inf, np.nan, "bisection", 0, ("unstable",))
            raise UnstableSystem("A has open right-half-plane eigenvalues reaching the output")
        flags = ("marginal-grid",)
        ev = np.linalg.eigvals(ss.A)
        axis = sorted({float(abs(l.imag)) for l in ev if abs(l.real) <= _axis_tol(ss.A)})
        if grid is None:
            grid = frequency_grid(A=ss.A)
        grid = grid.excluding(axis, EXCLUSION_RADIUS)
        res = hinf_norm_grid(ss, grid)
        res = HinfResult(res.norm, res.peak_frequency, "grid", res.iterations, flags)
        return _refine(ss, grid, res, axis, EXCLUSION_RADIUS)
    return _bisection(ss, tol)
