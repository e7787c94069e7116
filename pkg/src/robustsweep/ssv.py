"""Structured singular value bounds for mixed real/complex block structures.

Upper bound
    Scaled-matrix bound ``mu(M) <= beta`` whenever some structured ``D > 0``
    and Hermitian ``G`` (supported on the real blocks) satisfy::

        Mh^H Mh + j (G Mh - Mh^H G) <= beta^2 I,   Mh = L^H M L^{-H},  D = L L^H

    With ``G = 0`` this is the classical ``sigma_max(D^{1/2} M D^{-1/2})``
    bound that treats real blocks as complex. ``beta^2`` is the largest
    eigenvalue of the left-hand side and is minimized over ``(L, G)`` with
    L-BFGS using its analytic gradient, starting from an Osborne-balanced
    scaling. Before scaling, each repeated real block is compressed to the
    rank of its row or column block (an exact reduction) and full complex
    blocks are zero-padded to square.

Lower bound
    Every returned value comes with a structured ``Delta`` satisfying
    ``det(I - M Delta) = 0``, so ``lower = 1/||Delta||``. Real blocks are
    searched directly: for fixed real values the remaining complex problem is
    solved exactly (one full block, via the SVD) or by power iteration with
    random restarts (several complex blocks).
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag, solve_triangular
from scipy.optimize import minimize, minimize_scalar

from ._parallel import ordered_map
from .errors import SingularResolvent
from .uncert import RepeatedRealScalar

__all__ = [
    "UpperCertificate",
    "UpperBound",
    "LowerBound",
    "MuBounds",
    "MuSweep",
    "mu_upper",
    "mu_lower",
    "mu_bounds",
    "mu_sweep",
]

MODES = ("mixed", "complex")
_RANK_RTOL = 1e-10


# --------------------------------------------------------------------------
# reduction to a square problem


def _partition(M, structure):
    sl = structure.slices()
    return [[M[ri, cj] for (_, cj) in sl] for (ri, _) in sl]


def _compress(Mb, i, tol):
    """Replace real block ``i`` by its rank-``r`` equivalent; ``None`` when r = 0."""
    k = Mb[i][i].shape[0]
    row = np.hstack(Mb[i])
    col = np.vstack([Mb[j][i] for j in range(len(Mb))])
    sr = np.linalg.svd(row, compute_uv=False)
    sc = np.linalg.svd(col, compute_uv=False)
    rr = int(np.sum(sr > tol))
    rc = int(np.sum(sc > tol))
    if min(rr, rc) == k:
        return Mb
    if rr <= rc:
        U, _, _ = np.linalg.svd(row)
        P = U[:, :rr]
    else:
        _, _, Vh = np.linalg.svd(col)
        P = Vh[:rc].conj().T
    Q = P.conj().T
    out = []
    for j, brow in enumerate(Mb):
        new = []
        for l, blk in enumerate(brow):
            if j == i and l == i:
                blk = Q @ blk @ P
            elif j == i:
                blk = Q @ blk
            elif l == i:
                blk = blk @ P
            new.append(blk)
        out.append(new)
    if P.shape[1] == 0:
        return None
    return out


def _reduce(M, structure):
    """Square matrix and layout ``[(kind, size), ...]`` with the same mu."""
    Mb = _partition(np.asarray(M, dtype=complex), structure)
    kinds = [("real" if isinstance(b, RepeatedRealScalar) else "full") for b in structure.blocks]
    tol = _RANK_RTOL * max(np.linalg.norm(M, 2), np.finfo(float).tiny)
    i = 0
    while i < len(kinds):
        if kinds[i] == "real":
            new = _compress(Mb, i, tol)
            if new is None:
                Mb = [[b for l, b in enumerate(r) if l != i] for j, r in enumerate(Mb) if j != i]
                del kinds[i]
                continue
            Mb = new
        i += 1
    layout = []
    for i, kind in enumerate(kinds):
        rows = Mb[i][0].shape[0]  # dimension of v_i
        cols = Mb[0][i].shape[1]  # dimension of eta_i
        size = max(rows, cols)
        layout.append((kind, size))
        if kind == "full" and rows != cols:
            for l in range(len(Mb)):
                if rows < size:
                    pad = np.zeros((size - rows, Mb[i][l].shape[1]), dtype=complex)
                    Mb[i][l] = np.vstack([Mb[i][l], pad])
            for j in range(len(Mb)):
                if cols < size:
                    pad = np.zeros((Mb[j][i].shape[0], size - cols), dtype=complex)
                    Mb[j][i] = np.hstack([Mb[j][i], pad])
    if not layout:
        return np.zeros((0, 0), dtype=complex), []
    return np.block(Mb), layout


# --------------------------------------------------------------------------
# scalings


class _Scaling:
    """Packs ``(L, G)`` for a layout into a real parameter vector."""

    def __init__(self, layout, with_g):
        self.layout = layout
        self.with_g = with_g
        self.offsets = np.cumsum([0] + [s for _, s in layout])
        self.n = int(self.offsets[-1])
        specs = []  # (kind, block, i, j)
        for b, (kind, size) in enumerate(layout):
            if kind == "full":
                specs.append(("Ld", b, 0, 0))
                continue
            for i in range(size):
                specs.append(("Ld", b, i, i))
            for i in range(size):
                for j in range(i):
                    specs += [("Lr", b, i, j), ("Li", b, i, j)]
        if with_g:
            for b, (kind, size) in enumerate(layout):
                if kind != "real":
                    continue
                for i in range(size):
                    specs.append(("Gd", b, i, i))
                for i in range(size):
                    for j in range(i):
                        specs += [("Gr", b, i, j), ("Gi", b, i, j)]
        full = [b for b, (k, _) in enumerate(layout) if k == "full"]
        fixed = ("Ld", full[-1], 0, 0) if full else ("Ld", 0, 0, 0)
        self.specs = [s for s in specs if s != fixed]
        self.size = len(self.specs)

    def bounds(self):
        out = []
        for kind, *_ in self.specs:
            out.append((-25.0, 25.0) if kind == "Ld" else (-1e6, 1e6))
        return out

    def unpack(self, x):
        n = self.n
        L = np.zeros((n, n), dtype=complex)
        G = np.zeros((n, n), dtype=complex)
        logs = {}
        for v, (kind, b, i, j) in zip(x, self.specs):
            o = self.offsets[b]
            if kind == "Ld":
                logs[(b, i)] = v
            elif kind == "Lr":
                L[o + i, o + j] += v
            elif kind == "Li":
                L[o + i, o + j] += 1j * v
            elif kind == "Gd":
                G[o + i, o + i] = v
            elif kind == "Gr":
                G[o + i, o + j] += v
                G[o + j, o + i] += v
            elif kind == "Gi":
                G[o + i, o + j] += 1j * v
                G[o + j, o + i] -= 1j * v
        for b, (kind, size) in enumerate(self.layout):
            o = self.offsets[b]
            if kind == "full":
                L[o:o + size, o:o + size] += np.exp(logs.get((b, 0), 0.0)) * np.eye(size)
            else:
                for i in range(size):
                    L[o + i, o + i] = np.exp(logs.get((b, i), 0.0))
        return L, G

    def grad(self, L, K, Y):
        """Chain rule from ``dlam = 2 Re tr(dL^H K) + 2 Re tr(dG Y)``."""
        g = np.empty(self.size)
        for idx, (kind, b, i, j) in enumerate(self.specs):
            o = self.offsets[b]
            if kind == "Ld":
                if self.layout[b][0] == "full":
                    s = self.layout[b][1]
                    d = np.diag(K)[o:o + s].real.sum() * L[o, o].real
                else:
                    d = K[o + i, o + i].real * L[o + i, o + i].real
                g[idx] = 2 * d
            elif kind == "Lr":
                g[idx] = 2 * K[o + i, o + j].real
            elif kind == "Li":
                g[idx] = 2 * K[o + i, o + j].imag
            elif kind == "Gd":
                g[idx] = 2 * Y[o + i, o + i].real
            elif kind == "Gr":
                g[idx] = 2 * (Y[o + j, o + i] + Y[o + i, o + j]).real
            elif kind == "Gi":
                g[idx] = 2 * (Y[o + i, o + j] - Y[o + j, o + i]).imag
        return g


def _scaled(M, L):
    # L^H M L^{-H}
    return L.conj().T @ solve_triangular(L, M.conj().T, lower=True).conj().T


def _beta2(M, L, G):
    Mh = _scaled(M, L)
    N = Mh.conj().T @ Mh + 1j * (G @ Mh - Mh.conj().T @ G)
    return Mh, N


def _objective(x, M, sc):
    L, G = sc.unpack(x)
    Mh, N = _beta2(M, L, G)
    w, V = np.linalg.eigh((N + N.conj().T) / 2)
    lam, u = w[-1], V[:, -1]
    p = Mh @ u - 1j * (G @ u)
    W = np.outer(Mh @ u, p.conj()) - np.outer(u, p.conj() @ Mh)
    K = solve_triangular(L.conj().T, W, lower=False)
    Y = 1j * np.outer(Mh @ u, u.conj())
    return lam, sc.grad(L, K, Y)


def _osborne(M, layout, sweeps=30):
    absM = np.abs(M)
    offs = np.cumsum([0] + [s for _, s in layout])
    d = np.ones(len(layout))
    for _ in range(sweeps):
        change = 0.0
        for b in range(len(layout)):
            sb = slice(offs[b], offs[b + 1])
            scale = np.repeat(d, [s for _, s in layout])
            S = absM * scale[:, None] / scale[None, :]
            mask = np.ones(M.shape[0], dtype=bool)
            mask[sb] = False
            r = np.linalg.norm(S[sb][:, mask])
            c = np.linalg.norm(S[mask][:, sb])
            if r > 0 and c > 0:
                f = np.sqrt(c / r)
                d[b] *= f
                change = max(change, abs(np.log(f)))
        if change < 1e-8:
            break
    return np.log(d)


def _initial_x(sc, logd):
    x = np.zeros(sc.size)
    full = [b for b, (k, _) in enumerate(sc.layout) if k == "full"]
    ref = logd[full[-1]] if full else logd[0]
    for idx, (kind, b, i, j) in enumerate(sc.specs):
        if kind == "Ld":
            x[idx] = logd[b] - ref
    return x


@dataclass(frozen=True)
class UpperCertificate:
    """Scalings that reproduce an upper bound on the reduced square matrix."""

    matrix: np.ndarray
    layout: tuple
    L: np.ndarray
    G: np.ndarray
    mode: str

    @property
    def D(self):
        return self.L @ self.L.conj().T

    def scaled_matrix(self):
        """``L^H M L^{-H}``; its largest singular value is the G-free bound."""
        return _scaled(self.matrix, self.L)

    def bound(self):
        """Re-evaluate ``beta`` from the stored scalings."""
        if self.matrix.size == 0:
            return 0.0
        _, N = _beta2(self.matrix, self.L, self.G)
        lam = np.linalg.eigvalsh((N + N.conj().T) / 2)[-1]
        return float(np.sqrt(max(lam, 0.0)))


class UpperBound(NamedTuple):
    value: float
    certificate: UpperCertificate


class LowerBound(NamedTuple):
    value: float
    destabilizing: np.ndarray
    converged: bool


def _run(M, sc, x0, maxiter, tol):
    fun = lambda x: _objective(x, M, sc)  # noqa: E731
    best_x, best_f = x0, fun(x0)[0]
    x = x0
    for _ in range(3):
        res = minimize(fun, x, jac=True, method="L-BFGS-B", bounds=sc.bounds(),
                       options={"maxiter": maxiter, "ftol": tol * 1e-3, "gtol": 1e-12})
        if res.fun < best_f - tol * abs(best_f):
            best_x, best_f, x = res.x, res.fun, res.x
        else:
            if res.fun < best_f:
                best_x, best_f = res.x, res.fun
            break
    return best_x, best_f


def mu_upper(M, structure, mode="mixed", maxiter=200, tol=1e-6):
    """Upper bound on ``mu`` of ``M`` for ``structure``.

    Parameters
    ----------
    M : (out_dim, in_dim) array_like
    structure : BlockStructure
    mode : {"mixed", "complex"}
        ``"complex"`` relaxes real blocks to complex (``G = 0``). ``"mixed"``
        adds the ``G`` scaling and never returns more than the complex value.

    Returns
    -------
    UpperBound
        ``(value, certificate)``; ``certificate.bound()`` reproduces ``value``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    M = np.asarray(M, dtype=complex)
    structure.check(M)
    Ms, layout = _reduce(M, structure)
    layout = tuple(layout)
    if Ms.size == 0 or not np.any(Ms):
        n = Ms.shape[0]
        cert = UpperCertificate(Ms, layout, np.eye(n, dtype=complex),
                                np.zeros((n, n), dtype=complex), mode)
        return UpperBound(0.0, cert)

    sc = _Scaling(layout, with_g=False)
    x0 = _initial_x(sc, _osborne(Ms, layout))
    if sc.size:
        xc, fc = _run(Ms, sc, x0, maxiter, tol)
    else:
        xc, fc = x0, _objective(x0, Ms, sc)[0]
    L, G = sc.unpack(xc)
    best = (fc, L, G, "complex")

    if mode == "mixed" and any(k == "real" for k, _ in layout):
        sg = _Scaling(layout, with_g=True)
        xg0 = np.zeros(sg.size)
        xg0[: sc.size] = xc  # L parameters come first in both packings
        xg, fg = _run(Ms, sg, xg0, maxiter, tol)
        if fg < best[0]:
            L, G = sg.unpack(xg)
            best = (fg, L, G, "mixed")
    lam, L, G, used = best
    cert = UpperCertificate(Ms, layout, L, G, used)
    return UpperBound(float(np.sqrt(max(lam, 0.0))), cert)


# --------------------------------------------------------------------------
# lower bound


def _indices(structure):
    rows_r, cols_r, rows_c, cols_c = [], [], [], []
    real_sizes, cblocks = [], []
    for b, (rs, cs) in zip(structure.blocks, structure.slices()):
        r = list(range(rs.start, rs.stop))
        c = list(range(cs.start, cs.stop))
        if isinstance(b, RepeatedRealScalar):
            rows_r += r
            cols_r += c
            real_sizes.append(b.size)
        else:
            rows_c += r
            cols_c += c
            cblocks.append(b)
    return (np.array(rows_r, int), np.array(cols_r, int), np.array(rows_c, int),
            np.array(cols_c, int), real_sizes, cblocks)


def _complex_power(F, cblocks, rng, restarts, iters=200):
    """Power iteration for purely complex full-block structures.

    Returns ``(rho, Q, converged)`` with ``Q`` block-diagonal, unit-norm
    blocks, and ``rho`` the spectral radius of ``F @ Q``.
    """
    vr = np.cumsum([0] + [b.cols for b in cblocks])  # v-space (rows of F)
    er = np.cumsum([0] + [b.rows for b in cblocks])  # eta-space (cols of F)
    nb = len(cblocks)

    def q_from(a, w):
        parts = []
        for i in range(nb):
            ai = a[vr[i]:vr[i + 1]]
            wi = w[er[i]:er[i + 1]]
            na, nw = np.linalg.norm(ai), np.linalg.norm(wi)
            if na < 1e-300 or nw < 1e-300:
                parts.append(np.zeros((cblocks[i].rows, cblocks[i].cols), dtype=complex))
            else:
                parts.append(np.outer(wi / nw, ai.conj() / na))
        return block_diag(*parts)

    def rho_of(Q):
        ev = np.linalg.eigvals(F @ Q)
        k = int(np.argmax(np.abs(ev)))
        return float(np.abs(ev[k])), ev[k]

    U, s, Vh = np.linalg.svd(F)
    starts = [(Vh[0].conj(), U[:, 0])]
    for _ in range(restarts):
        b = rng.standard_normal(F.shape[1]) + 1j * rng.standard_normal(F.shape[1])
        w = rng.standard_normal(F.shape[1]) + 1j * rng.standard_normal(F.shape[1])
        starts.append((b, w))
    best = (0.0, np.zeros((F.shape[1], F.shape[0]), dtype=complex), 1.0)
    all_converged = True
    for b, w in starts:
        b = b / np.linalg.norm(b)
        w = w / np.linalg.norm(w)
        prev = -1.0
        converged = False
        for _ in range(iters):
            a = F @ b
            beta = np.linalg.norm(a)
            if beta < 1e-300:
                break
            a /= beta
            z = np.zeros_like(a)
            for i in range(nb):
                ai, wi = a[vr[i]:vr[i + 1]], w[er[i]:er[i + 1]]
                na = np.linalg.norm(ai)
                if na > 0:
                    z[vr[i]:vr[i + 1]] = np.linalg.norm(wi) / na * ai
            w = F.conj().T @ z
            nw = np.linalg.norm(w)
            if nw < 1e-300:
                break
            w /= nw
            bn = np.zeros_like(b)
            for i in range(nb):
                ai, wi = a[vr[i]:vr[i + 1]], w[er[i]:er[i + 1]]
                nwi = np.linalg.norm(wi)
                if nwi > 0:
                    bn[er[i]:er[i + 1]] = np.linalg.norm(ai) / nwi * wi
            nb_ = np.linalg.norm(bn)
            if nb_ < 1e-300:
                break
            b = bn / nb_
            if abs(beta - prev) <= 1e-10 * max(beta, 1e-300):
                converged = True
                break
            prev = beta
        all_converged &= converged
        Q = q_from(a, w) if np.linalg.norm(a) > 0 else None
        if Q is None:
            continue
        r, lam = rho_of(Q)
        if r > best[0]:
            best = (r, Q, lam)
    rho, Q, lam = best
    return rho, Q, lam, all_converged


class _LowerProblem:
    def __init__(self, M, structure, rng, restarts):
        self.M = M
        self.structure = structure
        (self.rr, self.cr, self.rc, self.cc, self.real_sizes,
         self.cblocks) = _indices(structure)
        self.rng = rng
        self.restarts = restarts
        self.active_restarts = min(restarts, 1)  # cheap while scanning
        self.Mrr = M[np.ix_(self.rr, self.cr)]
        self.Mrc = M[np.ix_(self.rr, self.cc)]
        self.Mcr = M[np.ix_(self.rc, self.cr)]
        self.Mcc = M[np.ix_(self.rc, self.cc)]
        self.converged = True
        self.best = (np.inf, None, None)  # value, delta vector, Delta_c

    def real_matrix(self, d):
        return np.diag(np.repeat(np.asarray(d, dtype=float), self.real_sizes))

    def complex_part(self, F):
        """``(mu_c, Delta_c)`` with ``det(I - F Delta_c) = 0`` and ``||Delta_c|| = 1/mu_c``."""
        if not self.cblocks or F.size == 0:
            return 0.0, None
        if len(self.cblocks) == 1:
            U, s, Vh = np.linalg.svd(F)
            if s[0] <= 0:
                return 0.0, None
            return float(s[0]), np.outer(Vh[0].conj(), U[:, 0].conj()) / s[0]
        rho, Q, lam, conv = _complex_power(F, self.cblocks, self.rng, self.active_restarts)
        self.converged &= conv
        if rho <= 0:
            return 0.0, None
        return rho, Q / lam

    def value(self, d):
        d = np.atleast_1d(np.asarray(d, dtype=float))
        dn = float(np.max(np.abs(d))) if d.size else 0.0
        if d.size:
            Dr = self.real_matrix(d)
            K = np.eye(len(self.rr)) - self.Mrr @ Dr
            try:
                X = np.linalg.solve(K, self.Mrc)
            except np.linalg.LinAlgError:
                return self._record(dn, d, None)
            if not np.all(np.isfinite(X)) or np.linalg.cond(K) > 1e14:
                return self._record(dn, d, None)
            F = self.Mcc + self.Mcr @ Dr @ X
        else:
            F = self.Mcc
        mu_c, Dc = self.complex_part(F)
        if mu_c <= 0:
            return np.inf
        return self._record(max(dn, 1.0 / mu_c), d, Dc)

    def _record(self, v, d, Dc):
        if v < self.best[0]:
            self.best = (v, np.array(d, dtype=float), Dc)
        return v

    def singular_candidates(self, r):
        R = self.real_matrix(r)
        ev = np.linalg.eigvals(self.Mrr @ R)
        for lam in ev:
            if abs(lam) > 1e-14 and abs(lam.imag) <= 1e-9 * abs(lam):
                t = 1.0 / lam.real
                self.value(t * np.asarray(r))

    def scan(self, r, V):
        r = np.asarray(r, dtype=float)
        g = np.unique(np.concatenate([np.geomspace(1e-4, 1.0, 30), np.linspace(0.0, 1.0, 41)]))
        ts = np.concatenate([-g[::-1], g[1:]]) * V
        vals = np.array([self.value(t * r) for t in ts])
        k = int(np.argmin(vals))
        if np.isfinite(vals[k]):
            lo = ts[max(k - 1, 0)]
            hi = ts[min(k + 1, len(ts) - 1)]
            if hi > lo:
                minimize_scalar(lambda t: self.value(t * r), bounds=(lo, hi),
                                method="bounded", options={"xatol": 1e-12 * max(1.0, V)})

    def directions(self):
        m = len(self.real_sizes)
        if m == 1:
            return [np.array([1.0])]
        if m == 2:
            u = np.linspace(-1.0, 1.0, 11)
            return [np.array([1.0, x]) for x in u] + [np.array([x, 1.0]) for x in u]
        dirs = [np.eye(m)[i] for i in range(m)] + [np.ones(m)]
        for _ in range(40):
            x = self.rng.uniform(-1.0, 1.0, m)
            dirs.append(x / np.max(np.abs(x)))
        return dirs


def _smin(M, Delta):
    return np.linalg.svd(np.eye(M.shape[0]) - M @ Delta, compute_uv=False)[-1]


def _prune(M, parts):
    """Zero out blocks the singularity does not depend on."""
    Delta = block_diag(*parts).astype(complex)
    tol = 1e-10 * max(1.0, _smin(M, Delta))
    base = _smin(M, Delta)
    for i in range(len(parts)):
        if not np.any(parts[i]):
            continue
        trial = list(parts)
        trial[i] = np.zeros_like(parts[i])
        D = block_diag(*trial).astype(complex)
        if np.any(D) and _smin(M, D) <= max(base, tol):
            parts, Delta = trial, D
    return Delta


def mu_lower(M, structure, restarts=8, seed=0):
    """Lower bound on ``mu`` with a destabilizing certificate.

    Returns
    -------
    LowerBound
        ``(value, destabilizing, converged)``. ``destabilizing`` is a
        block-diagonal ``Delta`` in ``structure`` with ``det(I - M Delta) = 0``
        and ``||Delta|| = 1/value``, or ``None`` when no destabilizing
        perturbation was found (``value = 0``). ``converged`` is False when a
        power iteration hit its cap; the best iterate is still used.
    """
    M = np.asarray(M, dtype=complex)
    structure.check(M)
    rng = np.random.default_rng(seed)
    prob = _LowerProblem(M, structure, rng, restarts)
    m = len(prob.real_sizes)
    smax = np.linalg.norm(M, 2)
    if smax == 0:
        return LowerBound(0.0, None, True)
    prob.value(np.zeros(m))
    if m:
        dirs = prob.directions()
        for r in dirs:
            prob.singular_candidates(r)
        for r in dirs:
            V = prob.best[0] if np.isfinite(prob.best[0]) else 1e4 / smax
            prob.scan(r, V)
        if m >= 2 and np.isfinite(prob.best[0]):
            minimize(lambda d: prob.value(d), prob.best[1], method="Nelder-Mead",
                     options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    if len(prob.cblocks) > 1:
        prob.active_restarts = restarts
        prob.value(prob.best[1] if prob.best[1] is not None else np.zeros(m))
    v, d, Dc = prob.best
    if not np.isfinite(v):
        return LowerBound(0.0, None, prob.converged)
    parts, ri = [], 0
    for b in structure.blocks:
        if isinstance(b, RepeatedRealScalar):
            parts.append(d[ri] * np.eye(b.size))
            ri += 1
        else:
            parts.append(None)
    # scatter Delta_c (block-diagonal over the complex blocks) back in order
    if Dc is None:
        Dc = np.zeros((sum(b.rows for b in prob.cblocks), sum(b.cols for b in prob.cblocks)),
                      dtype=complex)
    r0 = c0 = 0
    for i, b in enumerate(structure.blocks):
        if parts[i] is None:
            parts[i] = Dc[r0:r0 + b.rows, c0:c0 + b.cols]
            r0 += b.rows
            c0 += b.cols
    Delta = _prune(M, parts)
    return LowerBound(1.0 / float(np.linalg.norm(Delta, 2)), Delta, prob.converged)


# --------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class MuBounds:
    """Bounds on ``mu`` at one frequency with their certificates."""

    omega: float
    upper: float
    lower: float
    d_scaling: np.ndarray
    destabilizing: np.ndarray = None
    certificate: UpperCertificate = None
    converged: bool = True


@dataclass(frozen=True)
class MuSweep:
    bounds: list
    skipped: list = field(default_factory=list)
    peak: tuple = (np.nan, np.nan)

    def __iter__(self):
        return iter(self.bounds)

    def __len__(self):
        return len(self.bounds)

    @property
    def omega(self):
        return np.array([b.omega for b in self.bounds])

    @property
    def upper(self):
        return np.array([b.upper for b in self.bounds])

    @property
    def lower(self):
        return np.array([b.lower for b in self.bounds])


def mu_bounds(M, structure, omega=np.nan, mode="mixed", restarts=8, seed=0):
    """Upper and lower bounds at a single point, packaged as :class:`MuBounds`."""
    up = mu_upper(M, structure, mode)
    lo = mu_lower(M, structure, restarts=restarts, seed=seed)
    upper = max(up.value, lo.value)  # both are certified; guard against roundoff
    return MuBounds(float(omega), upper, lo.value, up.certificate.D, lo.destabilizing,
                    up.certificate, lo.converged)


def mu_sweep(G, grid, mode="mixed", restarts=8, seed=0):
    """Evaluate ``mu`` bounds of ``G(i*omega)`` over ``grid``.

    Points where the resolvent is singular are recorded in ``skipped``
    instead of aborting. Results are in grid order; the peak is the largest
    upper bound, ties going to the smallest frequency.
    """
    omegas = list(grid)

    def point(item):
        k, w = item
        try:
            M = G(1j * w)
        except SingularResolvent as exc:
            return exc
        return mu_bounds(M, G.structure, w, mode, restarts,
                         seed=np.random.SeedSequence([seed, k]))

    results = ordered_map(point, list(enumerate(omegas)))
    bounds, skipped = [], []
    for w, r in zip(omegas, results):
        if isinstance(r, Exception):
            skipped.append((w, str(r)))
        else:
            bounds.append(r)
    peak = (np.nan, np.nan)
    if bounds:
        ups = np.array([b.upper for b in bounds])
        k = int(np.flatnonzero(ups == ups.max())[0])
        peak = (bounds[k].omega, bounds[k].upper)
    return MuSweep(bounds, skipped, peak)
