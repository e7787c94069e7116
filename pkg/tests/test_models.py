import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from robustsweep.errors import InvalidDelta
from robustsweep.lti import eigenfrequencies
from robustsweep.models import (R_LEFT, R_RIGHT, SMD_PARAMETERS, QubitParams, SmdParams,
                                fidelity_analytic, fidelity_simulate, gamma_structure,
                                max_fidelity, nonlinear_family, peak_fidelity, smd_colocation_Sc,
                                smd_matrices, smd_model, smd_structure, transfer_time,
                                two_qubit_bloch)


def test_smd_shapes_and_eigenfrequencies():
    ss = smd_model()
    assert ss.A.shape == (4, 4)
    assert len(eigenfrequencies(ss.A)) == 2
    np.testing.assert_allclose(ss.C[:, 2:], np.diag([1 / 3, 1.0]))


def test_smd_damping_block_transcription():
    p = SmdParams(b1=0.2, b2=0.2)
    A = smd_matrices(p)[0]
    assert A[2, 2] == pytest.approx(-p.b1 / p.m1)
    assert A[3, 3] == pytest.approx(-(p.b1 + p.b2) / p.m2)


def test_smd_params_must_be_positive():
    with pytest.raises(ValueError):
        SmdParams(k1=0.0)
    with pytest.raises(ValueError):
        smd_structure(SmdParams(), "m1")


@pytest.mark.parametrize("which", SMD_PARAMETERS)
def test_smd_structure_finite_difference(which):
    p, h = SmdParams(), 1e-6
    A = smd_matrices(p)[0]
    Ah = smd_matrices(replace(p, **{which: getattr(p, which) * (1 + h)}))[0]
    assert np.linalg.norm((Ah - A) / h - smd_structure(p, which)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMD_PARAMETERS), st.floats(-0.9, 3.0))
def test_smd_structure_is_exact_for_any_shift(which, delta):
    p = SmdParams()
    Ad = smd_matrices(replace(p, **{which: getattr(p, which) * (1 + delta)}))[0]
    np.testing.assert_allclose(Ad, smd_matrices(p)[0] + delta * smd_structure(p, which), atol=1e-14)


def test_smd_damping_structure_lives_in_rate_block():
    S3 = smd_structure(SmdParams(), "b1")
    assert np.all(S3[:2] == 0) and np.all(S3[:, :2] == 0)
    assert np.any(S3[2:, 2:])


def test_smd_stiffness_structures_add():
    p = SmdParams()
    A2 = smd_matrices(replace(p, k1=p.k1 * 1.3, k2=p.k2 * 1.3))[0]
    S = smd_structure(p, "k1") + smd_structure(p, "k2")
    np.testing.assert_allclose(A2, smd_matrices(p)[0] + 0.3 * S, atol=1e-14)


def test_colocation_structure():
    Sc = smd_colocation_Sc(SmdParams())
    assert np.count_nonzero(Sc) == 2
    assert Sc[0, 3] == 1.0 and Sc[1, 2] == pytest.approx(1 / 3)
    C = smd_model().C
    np.testing.assert_array_equal(Sc, C[::-1])


def test_qubit_spectrum_and_blocks():
    q = QubitParams(0.0, 1.0, 0.01)
    m = two_qubit_bloch(q)
    ev = np.sort_complex(np.linalg.eigvals(m.A))
    np.testing.assert_allclose(ev, np.sort_complex([0.0, -0.01 - 2j, -0.01 + 2j]), atol=1e-12)
    np.testing.assert_allclose(m.A_L, -0.01 * np.diag([0.0, 1.0, 1.0]), atol=1e-15)
    assert np.linalg.matrix_rank(m.A) == 2


def test_qubit_without_dephasing():
    m = two_qubit_bloch(QubitParams(0.3, 0.7, 0.0))
    assert np.all(m.A_L == 0)
    np.testing.assert_array_equal(m.A, -m.A.T)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(0, 1))
def test_qubit_invariants(D, J, g):
    q = QubitParams(D, J, g)
    m = two_qubit_bloch(q)  # validates on construction
    assert q.J_eff >= 2 * abs(J) - 1e-15
    np.testing.assert_allclose(m.A_H, -m.A_H.T)
    assert np.linalg.eigvalsh(m.A_L).max() <= 1e-12


def test_qubit_rejects_degenerate_coupling():
    with pytest.raises(InvalidDelta):
        QubitParams(J=0.0)
    fam = nonlinear_family(QubitParams(), "J")
    with pytest.raises(InvalidDelta):
        fam(-1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(0.2, 2), st.floats(0.001, 0.5), st.floats(-0.99, 3))
def test_gamma_structure_is_linear(D, J, g, delta):
    q = QubitParams(D, J, g)
    S = gamma_structure(q)
    Ad = two_qubit_bloch(replace(q, gamma=g * (1 + delta))).A
    np.testing.assert_allclose(Ad, two_qubit_bloch(q).A + delta * S, atol=1e-12)


def test_gamma_structure_removes_dephasing_at_minus_one():
    q = QubitParams(0.4, 1.0, 0.05)
    m = two_qubit_bloch(q)
    np.testing.assert_allclose(m.A - gamma_structure(q), m.A_H, atol=1e-15)


@pytest.mark.parametrize("which", ["Delta", "J", "gamma"])
@pytest.mark.parametrize("formulation", ["unperturbed", "perturbed"])
def test_family_is_zero_at_origin(which, formulation):
    fam = nonlinear_family(QubitParams(), which, formulation)
    assert not np.any(fam(0.0)(1j))
    assert fam.norm(0.0) == 0.0


def test_detuning_family_is_symmetric():
    for form in ("unperturbed", "perturbed"):
        fam = nonlinear_family(QubitParams(), "Delta", form)
        for d in np.linspace(0.05, 1.0, 10):
            assert fam.norm(d) == pytest.approx(fam.norm(-d), rel=1e-6)


def test_fidelity_endpoints():
    q = QubitParams(0.0, 1.0, 0.0)
    assert fidelity_analytic(0.0, q) == 0.0
    assert fidelity_simulate(0.0, q) == 0.0
    assert fidelity_simulate(0.0, q, R_RIGHT) == 1.0
    assert fidelity_analytic(math.pi / 2, q) == 1.0
    assert peak_fidelity(q) == 1.0


def test_peak_fidelity_closed_form():
    q = QubitParams(0.0, 1.0, 0.01)
    assert transfer_time(q) == pytest.approx(math.pi / 2, abs=1e-15)
    expected = 0.5 * (1 + math.exp(-0.005 * math.pi))
    assert abs(peak_fidelity(q) - expected) < 1e-10
    assert abs(fidelity_analytic(transfer_time(q), q) - expected) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(0.2, 2), st.floats(0, 0.5))
def test_fidelity_analytic_matches_simulation(D, J, g):
    q = QubitParams(D, J, g)
    t = np.linspace(0, 20, 101)
    assert np.max(np.abs(fidelity_analytic(t, q) - fidelity_simulate(t, q))) < 1e-8


def test_transfer_time_and_fidelity_decrease_with_detuning():
    Ds = np.linspace(0, 3, 20)
    tf = [transfer_time(QubitParams(D, 1.0, 0.0)) for D in Ds]
    fm = [max_fidelity(QubitParams(D, 1.0, 0.0)) for D in Ds]
    assert np.all(np.diff(tf) < 0) and np.all(np.diff(fm) < 0)


def test_bloch_ball_contracts():
    A = two_qubit_bloch(QubitParams(0.5, 1.0, 0.1)).A
    rng = np.random.default_rng(3)
    for t in np.linspace(0, 30, 31):
        r = rng.standard_normal(3)
        r /= np.linalg.norm(r)
        assert np.linalg.norm(expm(t * A) @ r) <= 1 + 1e-12


def test_simulate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        fidelity_simulate(1.0, QubitParams(), 2 * R_LEFT)
    with pytest.raises(ValueError):
        fidelity_simulate(-1.0)
