import math

import numpy as np
import pytest

from robustsweep.errors import InvalidDelta, MaxIterExceeded, NoIntersection
from robustsweep.fixed_point import (PerturbationFamily, default_scan_grid, delta_bounds,
                                     delta_scan, fixed_point_iterate)
from robustsweep.lti import StateSpaceModel


def static(gain):
    return PerturbationFamily(lambda d: StateSpaceModel(np.zeros((0, 0)), None, None, [[gain(d)]]))


def lag(scale):
    # ||T(delta)|| = scale * |delta| at omega = 0
    return PerturbationFamily(lambda d: StateSpaceModel([[-1.0]], [[d]], [[scale]]))


def test_linear_family_brackets_one():
    scan = delta_scan(static(abs))
    b = scan.first("positive")
    assert b.inner < 1.0 <= b.outer
    b = scan.first("negative")
    assert b.outer <= -1.0 < b.inner


def test_oscillating_recursion_falls_back_to_bisection():
    fam = static(abs)
    b = delta_scan(fam).first("positive")
    fp = fixed_point_iterate(fam, 0.5, bracket=b)
    assert fp.method == "bisection"
    assert "non-contractive" in fp.flags
    assert fp.delta == pytest.approx(1.0, abs=1e-10)
    assert all(r >= 1.0 for r in fp.ratios[-5:])


def test_oscillation_without_bracket_raises():
    with pytest.raises(MaxIterExceeded) as exc:
        fixed_point_iterate(static(abs), 0.5)
    assert exc.value.best in (0.5, 2.0)


def test_contracting_recursion_converges():
    # ||T|| = 1 + |delta|/4: fixed point of d = 1/(1 + d/4)
    fam = static(lambda d: 1 + abs(d) / 4)
    res = delta_bounds(fam)
    exact = 2 * (math.sqrt(2) - 1)
    assert res.delta_max == pytest.approx(exact, abs=1e-9)
    assert res.delta_min == pytest.approx(-exact, abs=1e-9)
    assert res.trace["positive"].method == "iteration"
    assert res.converged
    assert res.mu_inf == pytest.approx(1 / exact)


def test_iteration_agrees_with_bisection():
    fam = static(lambda d: 1 + abs(d) / 4)
    b = delta_scan(fam).first("positive")
    it = fixed_point_iterate(fam, b.inner, bracket=b)
    from robustsweep.fixed_point import _bisect
    root, _, _ = _bisect(fam, b)
    assert it.method == "iteration"
    assert abs(it.delta - root) <= 1e-6


def test_symmetric_family():
    res = delta_bounds(lag(2.0))
    # the norm is an upper estimate at relative tolerance 1e-6
    assert res.delta_max == pytest.approx(1 / math.sqrt(2), rel=1e-5)
    assert res.delta_min == pytest.approx(-res.delta_max, abs=1e-6)


def test_defining_set_property():
    fam = static(lambda d: 0.5 + d * d)
    res = delta_bounds(fam)
    dmax = res.delta_max
    for d in np.linspace(1e-6, dmax * (1 - 1e-3), 20):
        assert d * fam.norm(d) < 1
    assert dmax * 1.01 * fam.norm(dmax * 1.01) > 1
    assert all(r < 1e-4 for r in res.residuals)


def test_smallest_fixed_point_selected():
    # f crosses zero at 1, recovers, crosses again further out
    fam = static(lambda d: abs(d) if abs(d) < 1.5 else 0.1)
    res = delta_bounds(fam)
    assert res.delta_max == pytest.approx(1.0, abs=1e-9)
    assert len(res.branch_info["positive"]["brackets"]) == 2


def test_no_intersection():
    fam = static(lambda d: 1e-3)
    with pytest.raises(NoIntersection) as exc:
        delta_bounds(fam)
    assert exc.value.endpoint == pytest.approx(10.0)
    res = delta_bounds(fam, on_missing="flag")
    assert not res.converged
    assert res.delta_max == pytest.approx(10.0)
    assert "no-intersection" in res.branch_info["positive"]["flags"]


def test_admissible_interval_is_respected():
    fam = PerturbationFamily(lambda d: StateSpaceModel([[-1.0]], [[d]], [[1.0]]), (-0.5, math.inf))
    grid = default_scan_grid(fam.admissible)
    assert grid["negative"].min() > -0.5
    with pytest.raises(InvalidDelta):
        fam.norm(-0.7)
    res = delta_bounds(fam, on_missing="flag")
    assert res.delta_max == pytest.approx(1.0, rel=1e-5)
    assert res.delta_min > -0.5


def test_zero_delta_gives_zero_norm():
    assert lag(3.0).norm(0.0) == 0.0


def test_flat_grid_is_split_by_sign():
    scan = delta_scan(static(abs), np.array([-2.0, -0.5, 0.5, 2.0]))
    assert scan.first("positive").outer == 2.0
    assert scan.first("negative").outer == -2.0
    with pytest.raises(ValueError):
        delta_scan(static(abs), np.array([0.0, 1.0]))


def test_stability_limited_endpoint_is_flagged():
    # ||T|| stays at 0.1 until a mode crosses into the right half plane at delta = 1
    def model(d):
        return StateSpaceModel(np.diag([-1.0, d - 1.0]), [[0.0], [1.0 - d]], [[0.0, 0.1]])

    res = delta_bounds(PerturbationFamily(model), on_missing="flag")
    info = res.branch_info["positive"]
    assert res.delta_max == pytest.approx(1.0, abs=1e-6)
    assert "stability-limited" in info["flags"]
