"""The eleven acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are repeated in a summary
section at the end of the pytest run.
"""
import numpy as np
import pytest

from conftest import dense_sup, random_stable
from mu_oracle import mu_oracle
from robustsweep.cli import execute, parse_args
from robustsweep.errors import SingularResolvent
from robustsweep.hinf import hinf_norm
from robustsweep.lti import (StructuredPerturbation, error_system_perturbed,
                             error_system_unperturbed, resolvent, scaling_identity_residual,
                             transfer_eval)
from robustsweep.models import (SMD_PARAMETERS, QubitParams, SmdParams, fidelity_analytic,
                                fidelity_simulate, gamma_structure, nonlinear_family,
                                peak_fidelity, smd_colocation_Sc, smd_matrices, smd_structure,
                                transfer_time, two_qubit_bloch)
from robustsweep.fixed_point import delta_bounds
from robustsweep.reproduce import SCALARS, TABLE2, scalars, table1, table2
from robustsweep.ssv import mu_bounds
from robustsweep.uncert import (BlockStructure, FullComplex, RepeatedRealScalar,
                                direct_bound_perturbed, g_perturbed_basic, g_perturbed_z0,
                                g_unperturbed_basic, g_unperturbed_general)


def _failures(report):
    return [r for r in report.rows if r.get("verdict") == "fail"]


def _random_problem(rng, n=None, p=None):
    n = n or int(rng.integers(1, 6))
    p = p or int(rng.integers(1, 4))
    A = rng.standard_normal((n, n))
    A -= (np.linalg.eigvals(A).real.max() + rng.uniform(0.1, 1.0)) * np.eye(n)
    return A, rng.standard_normal((n, n)), rng.standard_normal((p, n)), rng.standard_normal((p, n))


def test_criterion_01_table1(acceptance):
    rep = table1()
    bad = _failures(rep)
    identity = [r for r in rep.rows if r["cell"] == "delta_max*||T^p||"]
    worst = max(r["rel_err"] for r in rep.rows if r["verdict"] == "pass" and r["tol"] == 0.02)
    ok = not bad and len(identity) == 8 and all(r["rel_err"] <= 1e-4 for r in identity)
    acceptance(1, "table1 mu^p and ||T^p|| within 2%, mu*delta_max = 1 to 1e-4", ok,
               f"worst cell {worst:.2e}, {rep.summary['informational']} informational cell")
    assert ok, bad


def test_criterion_02_table2(acceptance):
    rep = table2()
    bad = _failures(rep)
    worst = max(r["rel_err"] / r["tol"] for r in rep.rows)
    ok = not bad and rep.summary["cells"] == 24
    acceptance(2, "table2 (delta_min, delta_max) pairs", ok,
               f"{rep.summary['passed']}/24 cells, worst err/tol {worst:.2f}")
    assert ok, bad


@pytest.fixture(scope="module")
def scalar_report():
    return scalars()


@pytest.mark.parametrize("name", list(SCALARS))
def test_criterion_03_quoted_scalars(name, scalar_report, acceptance, request):
    rows = {r["cell"]: r for r in scalar_report.rows}
    bad = [k for k, r in rows.items() if r["verdict"] == "fail"]
    acceptance(3, "reference scalars", not bad,
               f"failing: {', '.join(bad)}" if bad else f"{len(rows)} values")
    row = rows[name]
    assert row["verdict"] == "pass", (
        f"{name}: computed {row['computed']:.6g}, expected {row['expected']:.6g} "
        f"(rel err {row['rel_err']:.3f} > {row['tol']})")


def test_criterion_04_scaling_identity(acceptance):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        A, S, C, Sc = _random_problem(rng)
        pert = StructuredPerturbation(S, rng.uniform(-0.5, 0.5), Sc, rng.uniform(-0.5, 0.5))
        while True:
            w = float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2))))
            try:
                worst = max(worst, scaling_identity_residual(A, pert, C, omega=w))
                break
            except SingularResolvent:
                continue
    p = SmdParams()
    A, _, C = smd_matrices(p)
    q = QubitParams()
    m = two_qubit_bloch(q)
    benches = [(A, StructuredPerturbation(smd_structure(p, k), 0.3, smd_colocation_Sc(p), 0.1), C)
               for k in SMD_PARAMETERS]
    benches.append((m.A, StructuredPerturbation(gamma_structure(q), 1.0), m.C_u))
    for A, pert, C in benches:
        for w in np.geomspace(0.05, 20, 20):
            worst = max(worst, scaling_identity_residual(A, pert, C, omega=w))
    ok = worst < 1e-9
    acceptance(4, "scaling identity between the two error realizations", ok,
               f"max residual {worst:.1e}")
    assert ok


def test_criterion_05_lft_consistency(acceptance):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        A, S, C, Sc = _random_problem(rng)
        s = 1j * float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2))))
        d, dc = rng.uniform(-0.4, 0.4, 2)
        try:
            Pd = resolvent(A + d * S, s)
            P = resolvent(A, s)
        except SingularResolvent:
            continue
        Cp = C + dc * Sc
        Tu = transfer_eval(error_system_unperturbed(A, StructuredPerturbation(S, d, Sc, dc), C), s)
        Tp = transfer_eval(error_system_perturbed(A, StructuredPerturbation(S, d, Sc, dc), C), s)
        Tu0 = transfer_eval(error_system_unperturbed(A, StructuredPerturbation(S, d), C), s)
        Tp0 = transfer_eval(error_system_perturbed(A, StructuredPerturbation(S, d), C), s)
        checks = [
            (g_unperturbed_basic(A, S, C).closed_loop(s, d), Tu0),
            (g_unperturbed_basic(A, S, C, Cp).closed_loop(s, d), Tu),
            (g_unperturbed_general(A, S, Sc, C).closed_loop(s, d, dc), np.hstack([Cp @ Pd, Tu])),
            (g_unperturbed_general(A, S, Sc, C, include_z0=False).closed_loop(s, d, dc), Tu),
            (g_unperturbed_general(A, S, None, C, include_Sc=False).closed_loop(s, d),
             np.hstack([C @ Pd, Tu0])),
            (g_unperturbed_general(A, S, Sc, C, tie_delta_c=True).closed_loop(s, d),
             np.hstack([(C + d * Sc) @ Pd,
                        transfer_eval(error_system_unperturbed(
                            A, StructuredPerturbation(S, d, Sc, d), C), s)])),
            (g_perturbed_basic(A, S, None, C).closed_loop(s, d), Tp0),
            (g_perturbed_basic(A, S, Sc, C).closed_loop(s, d, dc), Tp),
            (g_perturbed_z0(A, S, None, C).closed_loop(s, d), np.hstack([C @ P, Tp0])),
            (g_perturbed_z0(A, S, Sc, C).closed_loop(s, d, dc), np.hstack([C @ P, Tp])),
        ]
        for got, want in checks:
            worst = max(worst, float(np.abs(got - want).max()))
    ok = worst < 1e-9
    acceptance(5, "upper LFT of every builder equals the closed-form error transfer", ok,
               f"max deviation {worst:.1e}")
    assert ok


SANDWICH = [
    (("real", 1), ("full", 1)),
    (("real", 1), ("full", 2)),
    (("real", 2), ("full", 1)),
    (("real", 1), ("real", 1), ("full", 1)),
    (("full", 1), ("full", 1)),
]


def test_criterion_06_mu_sandwich(acceptance):
    rng = np.random.default_rng(6)
    outside, gaps = [], []
    for k in range(200):
        kinds = SANDWICH[k % len(SANDWICH)]
        blocks = [RepeatedRealScalar(n, f"r{i}") if kind == "real" else FullComplex(n, n)
                  for i, (kind, n) in enumerate(kinds)]
        s = BlockStructure.of(*blocks)
        M = rng.standard_normal((s.out_dim, s.in_dim)) + 1j * rng.standard_normal((s.out_dim, s.in_dim))
        oracle = mu_oracle(M, kinds)
        b = mu_bounds(M, s, seed=k)
        if not (b.lower <= oracle * (1 + 1e-6) and oracle <= b.upper * (1 + 1e-9)):
            outside.append((k, b.lower, oracle, b.upper))
        if sum(kind == "real" for kind, _ in kinds) == 1 and len(kinds) == 2 and b.lower > 0:
            gaps.append(b.upper / b.lower - 1)
    median = float(np.median(gaps))
    ok = not outside and median <= 0.10
    acceptance(6, "dense-search mu inside [lower, upper]; median gap <= 10%", ok,
               f"{200 - len(outside)}/200 inside, median gap {median:.2%}")
    assert ok, outside[:5]


def test_criterion_07_direct_bound(acceptance):
    rng = np.random.default_rng(7)
    p = SmdParams()
    A0, _, C0 = smd_matrices(p)
    worst_gap, worst_eq = np.inf, 0.0
    for k in range(100):
        if k % 2:
            A, S, C, Sc = _random_problem(rng)
        else:
            A, C = A0, C0
            S, Sc = smd_structure(p, SMD_PARAMETERS[k // 2 % 4]), smd_colocation_Sc(p)
        w = float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2))))
        d, dc = rng.uniform(-2, 2, 2)
        z0 = bool(k % 3 == 0)
        G = (g_perturbed_z0 if z0 else g_perturbed_basic)(A, S, Sc, C)
        actual = np.linalg.norm(G.closed_loop(1j * w, d, dc), 2)
        bound = direct_bound_perturbed(A, S, Sc, C, w, d, dc, include_z0=z0)
        worst_gap = min(worst_gap, bound - actual)
        # equality without the output perturbation
        actual = np.linalg.norm(g_perturbed_basic(A, S, None, C).closed_loop(1j * w, d), 2)
        bound = direct_bound_perturbed(A, S, None, C, w, d)
        worst_eq = max(worst_eq, abs(bound - actual) / max(1.0, bound))
    ok = worst_gap >= -1e-8 and worst_eq <= 1e-8
    acceptance(7, "direct bound dominates ||T^p||, equal when S_c is absent", ok,
               f"min bound - norm {worst_gap:.1e}, equality dev {worst_eq:.1e}")
    assert ok


def test_criterion_08_hinf_vs_grid(acceptance):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        ss = random_stable(rng, int(rng.integers(1, 8)), int(rng.integers(1, 4)),
                           int(rng.integers(1, 4)))
        r = hinf_norm(ss).norm
        worst = max(worst, abs(r - dense_sup(ss)) / r)
    ok = worst <= 1e-4
    acceptance(8, "H-infinity bisection matches a 1e5-point grid", ok,
               f"max relative difference {worst:.1e}")
    assert ok


def test_criterion_09_fidelity(acceptance):
    rng = np.random.default_rng(9)
    t = np.linspace(0, 20, 401)
    worst = 0.0
    for _ in range(50):
        q = QubitParams(rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.1, 3),
                        rng.uniform(0, 1))
        worst = max(worst, float(np.abs(fidelity_analytic(t, q) - fidelity_simulate(t, q)).max()))
    q = QubitParams(0.0, 1.0, 0.01)
    peak_err = abs(fidelity_analytic(transfer_time(q), q) - 0.5 * (1 + np.exp(-0.005 * np.pi)))
    tf_err = abs(transfer_time(q) - np.pi / 2)
    ideal = QubitParams(0.0, 1.0, 0.0)
    exact = peak_fidelity(ideal) == 1.0 and float(fidelity_analytic(transfer_time(ideal), ideal)) == 1.0
    ok = worst < 1e-8 and peak_err <= 1e-10 and tf_err <= 1e-10 and exact
    acceptance(9, "analytic fidelity vs simulation; peak value and transfer time", ok,
               f"max diff {worst:.1e}, peak err {peak_err:.1e}, t_f err {tf_err:.1e}")
    assert ok


def test_criterion_10_defining_set(acceptance):
    bad = []
    for (which, form, g0) in TABLE2:
        fam = nonlinear_family(QubitParams(gamma=g0), which, form)
        dmax = delta_bounds(fam).delta_max
        inner = np.linspace(0, dmax * (1 - 1e-3), 21)[1:]
        if not all(d * fam.norm(d) < 1 for d in inner):
            bad.append((which, form, g0, "interior"))
        out = dmax * (1 + 1e-2)
        if not out * fam.norm(out) > 1:
            bad.append((which, form, g0, "exterior"))
    ok = not bad
    acceptance(10, "delta*||T(delta)|| < 1 inside every delta_max, violated just outside", ok,
               f"{len(TABLE2) - len(bad)}/{len(TABLE2)} families")
    assert ok, bad


def test_criterion_11_determinism(acceptance, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("ROBUSTSWEEP_THREADS", threads)
        text = ""
        for argv in (["reproduce", "all", "--seed", "3"],
                     ["reproduce", "fig7", "--seed", "3", "--format", "json"],
                     ["mu-sweep", "--scenario", "smd-k1-z0-sc", "--grid", "0.1:10:40",
                      "--seed", "3"]):
            out, _, _ = execute(parse_args(argv))
            text += out
        outs.append(text.encode())
    ok = outs[0] == outs[1]
    acceptance(11, "two seeded reproduction runs are byte-identical", ok,
               f"{len(outs[0])} bytes compared")
    assert ok
