"""Shared oracles, written independently of the solvers they check."""
import numpy as np
import pytest

from robustsweep.lti import StateSpaceModel


def random_stable(rng, n, m, p, margin=0.05, with_d=True):
    A = rng.standard_normal((n, n))
    shift = np.linalg.eigvals(A).real.max() + rng.uniform(margin, 1.0)
    A -= shift * np.eye(n)
    D = rng.standard_normal((p, m)) if with_d else None
    return StateSpaceModel(A, rng.standard_normal((n, m)), rng.standard_normal((p, n)), D)


def dense_sigma(ss, omegas):
    """``sigma_max(C (iwI - A)^{-1} B + D)`` via the eigendecomposition of ``A``."""
    lam, V = np.linalg.eig(ss.A)
    CV = ss.C @ V
    WB = np.linalg.solve(V, ss.B)
    w = np.asarray(omegas, dtype=float)
    H = np.einsum("pk,fk,km->fpm", CV, 1.0 / (1j * w[:, None] - lam[None, :]), WB) + ss.D
    return np.linalg.norm(H, 2, axis=(1, 2))


def dense_sup(ss, n=100_000, lo=1e-4, hi=1e4):
    w = np.concatenate([[0.0], np.geomspace(lo, hi, n)])
    w = np.unique(np.concatenate([w, np.abs(np.linalg.eigvals(ss.A).imag)]))
    return float(dense_sigma(ss, w).max())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey()


@pytest.fixture(scope="session")
def acceptance(pytestconfig):
    """Records one verdict line per acceptance criterion."""
    lines = pytestconfig.stash.setdefault(_ACCEPTANCE, {})

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}" + (
            f" ({detail})" if detail else "")
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
