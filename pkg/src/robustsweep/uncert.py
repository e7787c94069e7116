"""LFT interconnections for each uncertainty scenario.

Every builder returns an :class:`Interconnection` whose evaluator maps a
complex frequency ``s`` to a partitioned matrix ``G(s)``. Closing the upper
loop with the physical uncertainty (repeated real scalars ``delta``,
``delta_c``) reproduces the closed-form error transfer matrix; closing it
additionally with a fictitious full complex block on the performance channel
turns a norm bound into a structured singular value problem.

Block sizes: a block of ``Delta`` with shape ``rows x cols`` maps ``cols``
outputs of ``G`` to ``rows`` inputs of ``G``, so ``G`` has shape
``(sum cols) x (sum rows)``.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import block_diag

from .errors import SingularLftLoop, StructureMismatch
from .lti import RCOND_MIN, resolvent

__all__ = [
    "RepeatedRealScalar",
    "FullComplex",
    "BlockStructure",
    "Interconnection",
    "g_unperturbed_basic",
    "g_unperturbed_general",
    "g_perturbed_basic",
    "g_perturbed_z0",
    "direct_bound_perturbed",
    "lft_upper",
]


@dataclass(frozen=True)
class RepeatedRealScalar:
    """``delta * I_size`` with ``delta`` real."""

    size: int
    label: str = "delta"

    @property
    def rows(self):
        return self.size

    @property
    def cols(self):
        return self.size


@dataclass(frozen=True)
class FullComplex:
    """Unstructured complex ``rows x cols`` block."""

    rows: int
    cols: int
    label: str = "perf"


@dataclass(frozen=True)
class BlockStructure:
    """Ordered block-diagonal uncertainty structure."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("structure needs at least one block")
        for b in blocks:
            if not isinstance(b, (RepeatedRealScalar, FullComplex)):
                raise TypeError(f"unknown block type {b!r}")
            if b.rows < 1 or b.cols < 1:
                raise ValueError(f"block dimensions must be positive: {b!r}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, *blocks):
        return cls(tuple(blocks))

    @property
    def in_dim(self):
        """Columns of the matched ``M`` (rows of ``Delta``)."""
        return sum(b.rows for b in self.blocks)

    @property
    def out_dim(self):
        """Rows of the matched ``M`` (columns of ``Delta``)."""
        return sum(b.cols for b in self.blocks)

    @property
    def is_performance(self):
        """Exactly one full complex block, and it comes last."""
        full = [i for i, b in enumerate(self.blocks) if isinstance(b, FullComplex)]
        return full == [len(self.blocks) - 1]

    @property
    def real_blocks(self):
        return [b for b in self.blocks if isinstance(b, RepeatedRealScalar)]

    def check(self, M):
        M = np.asarray(M)
        if M.shape != (self.out_dim, self.in_dim):
            raise StructureMismatch(
                f"matrix shape {M.shape} does not match structure "
                f"({self.out_dim}, {self.in_dim})")

    def slices(self):
        """``(row_slice, col_slice)`` of ``M`` for each block."""
        out, r, c = [], 0, 0
        for b in self.blocks:
            out.append((slice(r, r + b.cols), slice(c, c + b.rows)))
            r += b.cols
            c += b.rows
        return out

    def assemble(self, parts):
        """Block-diagonal ``Delta`` from per-block values.

        Real blocks take a scalar; full blocks take a ``rows x cols`` matrix.
        """
        mats = []
        for b, p in zip(self.blocks, parts, strict=True):
            if isinstance(b, RepeatedRealScalar):
                if np.ndim(p) != 0 or np.iscomplexobj(p) and np.imag(p) != 0:
                    raise StructureMismatch(f"block {b.label} needs a real scalar")
                mats.append(float(np.real(p)) * np.eye(b.size))
            else:
                p = np.atleast_2d(np.asarray(p, dtype=complex))
                if p.shape != (b.rows, b.cols):
                    raise StructureMismatch(
                        f"block {b.label} needs shape {(b.rows, b.cols)}, got {p.shape}")
                mats.append(p)
        return block_diag(*mats).astype(complex)


@dataclass(frozen=True)
class Interconnection:
    """Frequency-dependent partitioned matrix ``G(s)`` plus its block structure.

    ``uncertainty`` lists the physical (real) channel sizes, ``disturbance``
    and ``error`` the performance input and output sizes.
    """

    evaluator: Callable
    uncertainty: tuple
    disturbance: int
    error: int
    structure: BlockStructure
    label: str = ""

    def __post_init__(self):
        s = self.structure
        if not s.is_performance:
            raise StructureMismatch("interconnection needs one trailing full complex block")
        perf = s.blocks[-1]
        if (perf.rows, perf.cols) != (self.disturbance, self.error):
            raise StructureMismatch("performance block does not match channel sizes")
        if sum(self.uncertainty) != sum(b.size for b in s.real_blocks):
            raise StructureMismatch("uncertainty channel sizes do not match the structure")

    @property
    def nu(self):
        return sum(self.uncertainty)

    def __call__(self, s):
        G = self.evaluator(s)
        shape = (self.nu + self.error, self.nu + self.disturbance)
        if G.shape != shape:
            raise StructureMismatch(f"evaluator returned {G.shape}, expected {shape}")
        return G

    def physical_delta(self, *values):
        """``blkdiag(delta_1 I, ...)`` for the real blocks, in structure order."""
        real = self.structure.real_blocks
        if len(values) != len(real):
            raise StructureMismatch(f"need {len(real)} real values, got {len(values)}")
        return block_diag(*[float(v) * np.eye(b.size) for v, b in zip(values, real)])

    def closed_loop(self, s, *values):
        """Upper LFT of ``G(s)`` with the physical uncertainty closed."""
        return lft_upper(self(s), self.physical_delta(*values))


def _check_dims(A, S, C_u, S_c=None):
    A = np.asarray(A, dtype=float)
    S = np.asarray(S, dtype=float)
    C_u = np.atleast_2d(np.asarray(C_u, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n) or S.shape != (n, n):
        raise ValueError(f"A {A.shape} and S {S.shape} must be square and equal")
    if C_u.shape[1] != n:
        raise ValueError(f"C_u must have {n} columns, got {C_u.shape}")
    if S_c is not None:
        S_c = np.atleast_2d(np.asarray(S_c, dtype=float))
        if S_c.shape != C_u.shape:
            raise ValueError(f"S_c {S_c.shape} must match C_u {C_u.shape}")
    return A, S, C_u, S_c


def g_unperturbed_basic(A, S, C_u, C_p=None):
    """``G = [[X, X], [C_p, C_p - C_u]]`` with ``X = (sI - A)^{-1} S``.

    Structure ``{delta I_n, Delta_f}`` with ``Delta_f`` of shape ``n x p``.
    """
    A, S, C_u, _ = _check_dims(A, S, C_u)
    C_p = C_u if C_p is None else np.atleast_2d(np.asarray(C_p, dtype=float))
    if C_p.shape != C_u.shape:
        raise ValueError("C_p and C_u shapes differ")
    n, p = A.shape[0], C_u.shape[0]

    def evaluate(s):
        X = resolvent(A, s) @ S
        return np.block([[X, X], [C_p, C_p - C_u]]).astype(complex)

    structure = BlockStructure.of(RepeatedRealScalar(n, "delta"), FullComplex(n, p))
    return Interconnection(evaluate, (n,), n, p, structure, "unperturbed")


def g_unperturbed_general(A, S, S_c, C_u, include_z0=True, include_Sc=True,
                          tie_delta_c=False):
    """Nominal-state-driven interconnection with initial-state error and uncertain C.

    The full matrix has five uncertainty channels, ordered as
    ``eta_1, eta_2`` (``delta``) and ``eta_3, eta_4, eta_5`` (``delta_c``),
    followed by the disturbances ``z(0)`` and ``w_u``::

        [ X  0  0   0   0  | 0       X ]
        [ 0  X  0   0   0  | P       0 ]
        [ I  0  0   0   0  | 0       0 ]
        [ 0  0  0   0   0  | 0       I ]
        [ 0  X  0   0   0  | P       0 ]
        [ Cu CuX Sc Sc  Sc | Cu P    0 ]

    with ``P = (sI - A)^{-1}`` and ``X = P S``. ``include_z0=False`` deletes
    channels 2 and 5 and the ``z(0)`` input; ``include_Sc=False`` deletes
    channels 3 to 5. ``tie_delta_c`` merges ``delta_c`` into ``delta`` for
    a parameter that enters both ``A`` and ``C``.
    """
    if include_Sc and S_c is None:
        raise ValueError("include_Sc requires S_c")
    A, S, C_u, S_c = _check_dims(A, S, C_u, S_c)
    n, p = A.shape[0], C_u.shape[0]
    channels = [1, 2, 3, 4, 5]
    if not include_z0:
        channels = [c for c in channels if c not in (2, 5)]
    if not include_Sc:
        channels = [c for c in channels if c not in (3, 4, 5)]
    dist = ["z0", "w"] if include_z0 else ["w"]

    def evaluate(s):
        P = resolvent(A, s)
        X = P @ S
        Z = np.zeros((n, n))
        I = np.eye(n)
        Zp = np.zeros((p, n))
        Sc = S_c if S_c is not None else Zp
        rows = {
            1: ([X, Z, Z, Z, Z], {"z0": Z, "w": X}),
            2: ([Z, X, Z, Z, Z], {"z0": P, "w": Z}),
            3: ([I, Z, Z, Z, Z], {"z0": Z, "w": Z}),
            4: ([Z, Z, Z, Z, Z], {"z0": Z, "w": I}),
            5: ([Z, X, Z, Z, Z], {"z0": P, "w": Z}),
        }
        blocks = []
        for c in channels:
            eta, d = rows[c]
            blocks.append([eta[k - 1] for k in channels] + [d[k] for k in dist])
        err_eta = {1: C_u, 2: C_u @ X, 3: Sc, 4: Sc, 5: Sc}
        err_d = {"z0": C_u @ P, "w": np.zeros((p, n))}
        blocks.append([err_eta[k] for k in channels] + [err_d[k] for k in dist])
        return np.block(blocks).astype(complex)

    n_delta = n * sum(c in (1, 2) for c in channels)
    n_delta_c = n * sum(c in (3, 4, 5) for c in channels)
    if tie_delta_c or n_delta_c == 0:
        real = [RepeatedRealScalar(n_delta + n_delta_c, "delta")]
        sizes = (n_delta + n_delta_c,)
    else:
        real = [RepeatedRealScalar(n_delta, "delta"), RepeatedRealScalar(n_delta_c, "delta_c")]
        sizes = (n_delta, n_delta_c)
    structure = BlockStructure.of(*real, FullComplex(n * len(dist), p))
    label = "unperturbed" + ("-z0" if include_z0 else "") + ("-Sc" if include_Sc else "")
    return Interconnection(evaluate, sizes, n * len(dist), p, structure, label)


def g_perturbed_basic(A, S, S_c, C_u):
    """``G = [[0, 0, I], [0, 0, I], [C_u X, S_c, 0]]``; without ``S_c`` the middle channel is dropped."""
    A, S, C_u, S_c = _check_dims(A, S, C_u, S_c)
    n, p = A.shape[0], C_u.shape[0]

    def evaluate(s):
        CX = C_u @ (resolvent(A, s) @ S)
        Z, I, Zp = np.zeros((n, n)), np.eye(n), np.zeros((p, n))
        if S_c is None:
            return np.block([[Z, I], [CX, Zp]]).astype(complex)
        return np.block([[Z, Z, I], [Z, Z, I], [CX, S_c, Zp]]).astype(complex)

    if S_c is None:
        real, sizes = [RepeatedRealScalar(n, "delta")], (n,)
    else:
        real = [RepeatedRealScalar(n, "delta"), RepeatedRealScalar(n, "delta_c")]
        sizes = (n, n)
    structure = BlockStructure.of(*real, FullComplex(n, p))
    return Interconnection(evaluate, sizes, n, p, structure,
                           "perturbed" + ("-Sc" if S_c is not None else ""))


def g_perturbed_z0(A, S, S_c, C_u):
    """``G = [[0, 0, 0, I], [0, 0, 0, I], [C_u X, S_c, C_u P, 0]]``.

    The disturbance is ``(z(0), w_p)``; the ``z(0)`` column does not pass
    through any uncertainty channel.
    """
    A, S, C_u, S_c = _check_dims(A, S, C_u, S_c)
    n, p = A.shape[0], C_u.shape[0]

    def evaluate(s):
        P = resolvent(A, s)
        CX = C_u @ (P @ S)
        Z, I, Zp = np.zeros((n, n)), np.eye(n), np.zeros((p, n))
        if S_c is None:
            return np.block([[Z, Z, I], [CX, C_u @ P, Zp]]).astype(complex)
        return np.block([[Z, Z, Z, I], [Z, Z, Z, I], [CX, S_c, C_u @ P, Zp]]).astype(complex)

    if S_c is None:
        real, sizes = [RepeatedRealScalar(n, "delta")], (n,)
    else:
        real = [RepeatedRealScalar(n, "delta"), RepeatedRealScalar(n, "delta_c")]
        sizes = (n, n)
    structure = BlockStructure.of(*real, FullComplex(2 * n, p))
    return Interconnection(evaluate, sizes, 2 * n, p, structure,
                           "perturbed-z0" + ("-Sc" if S_c is not None else ""))


def direct_bound_perturbed(A, S, S_c, C_u, omega, delta, delta_c=0.0, include_z0=False):
    """Closed-form bound on the perturbed-state error norm at ``s = i*omega``.

    ``||[C_u P S, S_c]|| * sqrt(delta^2 + delta_c^2)``, plus ``||C_u P||``
    when the initial-state error channel is included.
    """
    A, S, C_u, S_c = _check_dims(A, S, C_u, S_c)
    P = resolvent(A, 1j * float(omega))
    CX = C_u @ (P @ S)
    stacked = CX if S_c is None else np.hstack([CX, S_c])
    bound = np.linalg.norm(stacked, 2) * np.hypot(delta, delta_c)
    if include_z0:
        bound += np.linalg.norm(C_u @ P, 2)
    return float(bound)


def lft_upper(G, Delta, s=None):
    """Upper LFT ``G22 + G21 Delta (I - G11 Delta)^{-1} G12``.

    ``G`` is either a partitioned matrix or an :class:`Interconnection`
    (then ``s`` is required). ``Delta`` has shape ``nu_in x nu_out`` where
    ``G11`` is ``nu_out x nu_in``.
    """
    if isinstance(G, Interconnection):
        if s is None:
            raise ValueError("evaluating an Interconnection needs s")
        G = G(s)
    G = np.asarray(G, dtype=complex)
    Delta = np.atleast_2d(np.asarray(Delta, dtype=complex))
    k_in, k_out = Delta.shape
    if k_out > G.shape[0] or k_in > G.shape[1]:
        raise StructureMismatch(f"Delta {Delta.shape} too large for G {G.shape}")
    G11, G12 = G[:k_out, :k_in], G[:k_out, k_in:]
    G21, G22 = G[k_out:, :k_in], G[k_out:, k_in:]
    if k_in == 0 or k_out == 0:
        return G22
    loop = np.eye(k_out) - G11 @ Delta
    try:
        inv = np.linalg.inv(loop)
    except np.linalg.LinAlgError:
        raise SingularLftLoop("I - G11 Delta is singular") from None
    rcond = 1.0 / (np.linalg.norm(loop, 1) * np.linalg.norm(inv, 1))
    if not np.isfinite(rcond) or rcond < RCOND_MIN:
        raise SingularLftLoop(f"I - G11 Delta is singular (rcond={rcond:.2e})")
    return G22 + G21 @ Delta @ inv @ G12
