"""Uncertainty margins from the fixed points of ``delta -> +-1/||T(delta)||``.

For a family of error systems ``T(delta)`` the margin on each side of zero
is the first root of ``f(delta) = |delta| * ||T(delta)|| - 1``. The recursion
``delta <- sign * 1/||T(delta)||`` is tried first; when it fails to contract
the root is located by bisection inside the bracket found by the scan.
"""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidDelta, MaxIterExceeded, NoIntersection
from .hinf import hinf_norm

__all__ = [
    "PerturbationFamily",
    "Bracket",
    "ScanResult",
    "FixedPoint",
    "FixedPointResult",
    "default_scan_grid",
    "delta_scan",
    "fixed_point_iterate",
    "delta_bounds",
]

BRANCHES = ("positive", "negative")


@dataclass(frozen=True)
class PerturbationFamily:
    """Error systems indexed by a scalar parameter shift.

    Parameters
    ----------
    model : callable
        ``delta -> StateSpaceModel``; may raise :class:`InvalidDelta`.
    admissible : (float, float)
        Open interval of valid ``delta``.
    label : str
    tol : float
        Relative tolerance passed to :func:`hinf_norm`.
    """

    model: Callable
    admissible: tuple = (-math.inf, math.inf)
    label: str = ""
    tol: float = 1e-6
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __call__(self, delta):
        return self.model(float(delta))

    def hinf(self, delta):
        """:class:`HinfResult` of ``T(delta)``; infinite when unstable modes reach the output."""
        key = float(delta)
        if key not in self._cache:
            lo, hi = self.admissible
            if not lo < key < hi:
                raise InvalidDelta(f"delta={key:g} outside admissible interval ({lo:g}, {hi:g})")
            self._cache[key] = hinf_norm(self.model(key), tol=self.tol, unstable="inf")
        return self._cache[key]

    def norm(self, delta):
        return self.hinf(delta).norm

    def excess(self, delta):
        """``f(delta) = |delta| * ||T(delta)|| - 1``."""
        n = self.norm(delta)
        return math.inf if math.isinf(n) else abs(delta) * n - 1.0


@dataclass(frozen=True)
class Bracket:
    branch: str
    inner: float  # f < 0
    outer: float  # f >= 0


@dataclass(frozen=True)
class ScanResult:
    grid: dict
    excess: dict
    brackets: dict

    def first(self, branch):
        b = self.brackets[branch]
        return b[0] if b else None


@dataclass(frozen=True)
class FixedPoint:
    """One endpoint: the root, how it was found and its residual."""

    delta: float
    residual: float
    method: str
    trace: tuple
    ratios: tuple
    converged: bool
    peak_frequency: float = math.nan
    flags: tuple = ()


@dataclass(frozen=True)
class FixedPointResult:
    delta_max: float
    delta_min: float
    residuals: tuple
    trace: dict
    converged: bool
    branch_info: dict
    mu_inf: float

    @property
    def endpoints(self):
        return self.delta_min, self.delta_max


def default_scan_grid(admissible=(-math.inf, math.inf), lo=1e-3, hi=10.0, n=200):
    """Log-spaced ``|delta|`` per branch, clipped to the open admissible interval."""
    mags = np.geomspace(lo, hi, n)
    a, b = admissible
    pos = mags[mags < b]
    neg = -mags[-mags > a]
    return {"positive": pos, "negative": neg}


def delta_scan(family, grid=None):
    """Sign changes of ``f`` walking outward from zero on each branch.

    Parameters
    ----------
    family : PerturbationFamily
    grid : dict or array_like, optional
        ``{"positive": ..., "negative": ...}`` magnitudes ordered away from
        zero, or one flat array of nonzero deltas that is split by sign.
        Defaults to :func:`default_scan_grid`.

    Returns
    -------
    ScanResult
        ``brackets[branch]`` lists every ``f < 0 -> f >= 0`` transition,
        nearest to zero first.
    """
    if grid is None:
        grid = default_scan_grid(family.admissible)
    elif not isinstance(grid, dict):
        g = np.asarray(grid, dtype=float)
        if np.any(g == 0):
            raise ValueError("scan grid must exclude delta = 0")
        grid = {"positive": np.sort(g[g > 0]), "negative": -np.sort(-g[g < 0])}
    pts = [(br, float(d)) for br in BRANCHES for d in grid.get(br, [])]
    vals = ordered_map(lambda item: family.excess(item[1]), pts)
    excess, brackets = {}, {}
    for br in BRANCHES:
        ds = np.array([d for (b, d) in pts if b == br])
        fs = np.array([v for (b, _), v in zip(pts, vals) if b == br])
        excess[br] = fs
        brackets[br] = [Bracket(br, float(ds[i]), float(ds[i + 1]))
                        for i in range(len(ds) - 1) if fs[i] < 0 <= fs[i + 1]]
        if len(ds) and fs[0] >= 0:
            brackets[br].insert(0, Bracket(br, 0.0, float(ds[0])))
    return ScanResult(grid, excess, brackets)


def _bisect(family, bracket, xtol=1e-12, max_iter=200):
    a, b = bracket.inner, bracket.outer
    it = 0
    while abs(b - a) > xtol * max(1.0, abs(b)) and it < max_iter:
        m = 0.5 * (a + b)
        if m == 0.0:
            break
        if family.excess(m) < 0:
            a = m
        else:
            b = m
        it += 1
    fa = family.excess(a) if a != 0 else -1.0
    fb = family.excess(b)
    return (a, fa, it) if abs(fa) <= abs(fb) else (b, fb, it)


def fixed_point_iterate(family, delta0, tol=1e-10, max_iter=100, bracket=None):
    """Run ``delta <- sign(delta0) / ||T(delta)||`` from ``delta0``.

    The empirical contraction ratio ``|d_{k+2} - d_{k+1}| / |d_{k+1} - d_k|``
    is recorded each step. If the recursion stalls, leaves the admissible
    interval or the bracket, or does not contract, the root is found by
    bisection inside ``bracket`` instead.

    Raises
    ------
    MaxIterExceeded
        When the recursion fails and no bracket is available.
    """
    sign = 1.0 if delta0 > 0 else -1.0
    trace, ratios = [float(delta0)], []
    converged, reason = False, "max-iter"
    d = float(delta0)
    for _ in range(max_iter):
        try:
            n = family.norm(d)
        except InvalidDelta:
            reason = "left admissible interval"
            break
        if not np.isfinite(n) or n == 0:
            reason = "norm not finite" if n else "zero norm"
            break
        nxt = sign / n
        trace.append(nxt)
        if len(trace) >= 3:
            prev = abs(trace[-2] - trace[-3])
            ratios.append(abs(trace[-1] - trace[-2]) / prev if prev > 0 else 0.0)
        if abs(nxt - d) <= tol * max(1.0, abs(nxt)):
            converged, d = True, nxt
            break
        if len(ratios) >= 5 and min(ratios[-5:]) >= 1.0:
            reason = "non-contractive"
            break
        d = nxt
    inside = bracket is None or (min(abs(bracket.inner), abs(bracket.outer)) <= abs(d)
                                 <= max(abs(bracket.inner), abs(bracket.outer)))
    if converged and inside:
        h = family.hinf(d)
        return FixedPoint(d, abs(family.excess(d)), "iteration", tuple(trace), tuple(ratios),
                          True, h.peak_frequency)
    if converged:
        reason = "converged outside the first bracket"
    if bracket is None:
        best = trace[-1]
        raise MaxIterExceeded(best, len(trace) - 1)
    root, fr, _ = _bisect(family, bracket)
    h = family.hinf(root)
    flags = (reason,)
    if abs(fr) > 1e-4:
        flags += ("stability-limited",)
    return FixedPoint(root, abs(fr), "bisection", tuple(trace), tuple(ratios), abs(fr) <= 1e-4,
                      h.peak_frequency, flags)


def delta_bounds(family, grid=None, tol=1e-10, max_iter=100, on_missing="raise"):
    """Margins ``delta_min < 0 < delta_max`` of ``family``.

    Each branch keeps the intersection closest to zero.

    Parameters
    ----------
    on_missing : {"raise", "flag"}
        When ``f < 0`` over the whole scanned branch, raise
        :class:`NoIntersection` or report the range endpoint as the margin
        with ``converged=False``.
    """
    scan = delta_scan(family, grid)
    ends, residuals, traces, info = {}, {}, {}, {}
    ok = True
    for br in BRANCHES:
        b = scan.first(br)
        g = scan.grid[br]
        if b is None:
            endpoint = float(g[-1]) if len(g) else 0.0
            if on_missing == "raise":
                raise NoIntersection(br, endpoint)
            ends[br] = endpoint
            residuals[br] = abs(family.excess(endpoint)) if endpoint else math.nan
            traces[br] = None
            info[br] = {"brackets": [], "endpoint": endpoint, "flags": ("no-intersection",)}
            ok = False
            continue
        start = b.inner if b.inner != 0 else 0.5 * b.outer
        fp = fixed_point_iterate(family, start, tol, max_iter, bracket=b)
        ends[br] = fp.delta
        residuals[br] = fp.residual
        traces[br] = fp
        info[br] = {"brackets": [(x.inner, x.outer) for x in scan.brackets[br]],
                    "endpoint": float(g[-1]), "flags": fp.flags,
                    "peak_frequency": fp.peak_frequency, "method": fp.method}
        ok &= fp.converged
    dmax, dmin = ends["positive"], ends["negative"]
    return FixedPointResult(dmax, dmin, (residuals["negative"], residuals["positive"]), traces,
                            ok, info, 1.0 / dmax if dmax else math.inf)
