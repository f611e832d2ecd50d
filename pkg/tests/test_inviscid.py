import math

import numpy as np
import pytest

from critshock.errors import (
    BoundaryMinimumError, CuspRegionError, MultipleRootsError, NoSteepeningError, NonGenericError,
)
from critshock.inviscid import (
    composite_jet, find_catastrophe, in_cusp, local_coords, local_cubic, solve_characteristic,
)
from conftest import make_spec

SQ3 = math.sqrt(3.0)


@pytest.fixture(scope="module")
def cat(burgers):
    return find_catastrophe(burgers)


def test_initial_time(burgers):
    for x in (-3.0, 0.2, 4.0):
        assert solve_characteristic(burgers, x, 0.0) == float(burgers.init(x))


def test_forward_characteristic(burgers):
    assert solve_characteristic(burgers, 0.75 + 1 / SQ3, 1.0) == pytest.approx(0.75, abs=1e-12)


def test_at_catastrophe(burgers, cat):
    # cube-root conditioning: v - v0 ~ (x - x0)^(1/3)
    assert solve_characteristic(burgers, cat.x0, cat.t0) == pytest.approx(0.75, abs=1e-4)


def test_catastrophe_point(cat):
    assert cat.x0 == pytest.approx(SQ3, abs=1e-12)
    assert cat.t0 == pytest.approx(8 * SQ3 / 9, abs=1e-12)
    assert cat.v0 == pytest.approx(0.75, abs=1e-12)
    assert cat.kappa == pytest.approx(128 * SQ3 / 81, abs=1e-10)
    assert max(abs(r) for r in cat.residuals) <= 1e-8
    assert cat.a0p * cat.kappa > 0


def test_generalized_same_catastrophe(generalized, cat):
    g = find_catastrophe(generalized)
    assert (g.x0, g.t0, g.v0, g.kappa) == pytest.approx((cat.x0, cat.t0, cat.v0, cat.kappa), abs=1e-12)


def test_linear_data_non_generic():
    with pytest.raises(NonGenericError):
        find_catastrophe(make_spec(F="-x", branch_lo=-5, branch_hi=5))


def test_no_steepening():
    with pytest.raises(NoSteepeningError):
        find_catastrophe(make_spec(F="x", branch_lo=-5, branch_hi=5))


def test_boundary_minimum():
    with pytest.raises(BoundaryMinimumError):
        find_catastrophe(make_spec(F="1/(1+x^2)", branch_lo=1, branch_hi=5))


def test_nonlinear_flux_catastrophe():
    # a(u) = u^2 + u keeps a' > 0 on F's range; the fold equations must still close
    spec = make_spec(a="u^2+u")
    c = find_catastrophe(spec)
    assert max(abs(r) for r in c.residuals) <= 1e-8
    assert composite_jet(spec, c.x_foot, 2)[2] == pytest.approx(0.0, abs=1e-10)


def test_no_fold_before_t0(burgers, cat):
    xs = np.linspace(0.0, 20.0, 4001)
    slope = np.asarray(composite_jet(burgers, xs, 1)[1])
    for t in np.linspace(0.0, cat.t0 * (1 - 1e-6), 25):
        assert np.all(1.0 + slope * t > 0)


def test_multiple_roots_without_guard(burgers, cat):
    with pytest.raises(MultipleRootsError):
        solve_characteristic(burgers, cat.x0 + 0.75 * 0.2, cat.t0 + 0.2, cusp_guard=False)


def test_cusp_guard(burgers, cat):
    with pytest.raises(CuspRegionError):
        solve_characteristic(burgers, cat.x0 + 0.75 * 0.2, cat.t0 + 0.2)


def test_outside_cusp_picks_continuous_branch(burgers, cat):
    dt = 0.1
    centre = cat.x0 + cat.a0 * dt
    right = solve_characteristic(burgers, centre + 0.3, cat.t0 + dt)
    left = solve_characteristic(burgers, centre - 0.3, cat.t0 + dt)
    assert right < cat.v0 < left


def test_local_cubic_examples(cat):
    assert local_cubic(cat, 0.0, -1.0) == pytest.approx(0.0, abs=1e-15)
    unit = type(cat)(**{**cat.__dict__, "a0p": 1.0, "kappa": 1.0})
    assert local_cubic(unit, 2.0, -1.0) == pytest.approx(-1.0, abs=1e-12)


def test_local_cubic_refuses_cusp(cat):
    with pytest.raises(CuspRegionError):
        local_cubic(cat, 0.0, 1.0)


def _cubic_model_error(spec, cat, k):
    worst = 0.0
    for xbar in np.linspace(-1, 1, 9):
        x = cat.x0 + cat.a0 * (-(k ** (2 / 3))) + xbar * k
        t = cat.t0 - k ** (2 / 3)
        lc = local_coords(cat, x, t, k)
        vbar = local_cubic(cat, lc.xbar, lc.tbar)
        v = solve_characteristic(spec, x, t)
        worst = max(worst, abs((v - cat.v0) / k ** (1 / 3) - vbar))
    return worst


def test_local_cubic_consistency(burgers, cat):
    k = 1e-3
    x = cat.x0 + cat.a0 * (-0.5 * k ** (2 / 3)) + 0.1 * k
    t = cat.t0 - 0.5 * k ** (2 / 3)
    vbar = local_cubic(cat, 0.1, -0.5)
    v = solve_characteristic(burgers, x, t)
    assert abs((v - cat.v0) / k ** (1 / 3) - vbar) < 5 * k ** (1 / 3)


def test_cubic_model_convergence_rate(burgers, cat):
    errs = [_cubic_model_error(burgers, cat, k) for k in (1e-3, 5e-4, 2.5e-4)]
    for coarse, fine in zip(errs, errs[1:]):
        assert 2 ** (1 / 3) * 0.9 <= coarse / fine <= 2 ** (2 / 3) * 1.1


def test_in_cusp_examples(cat):
    dt = 0.05
    width = 2 / (3 * SQ3) * math.sqrt(cat.a0p ** 3 / cat.kappa) * dt ** 1.5
    centre = cat.x0 + cat.a0 * dt
    assert in_cusp(cat, centre, cat.t0 + dt)
    assert not in_cusp(cat, centre + 10 * width, cat.t0 + dt)
    assert in_cusp(cat, centre + 0.9 * width, cat.t0 + dt)
    assert not in_cusp(cat, centre + 1.1 * width, cat.t0 + dt)
    assert in_cusp(cat, centre + 1.1 * width, cat.t0 + dt, safety=2.0)
    with pytest.raises(ValueError):
        in_cusp(cat, centre, cat.t0)


def test_in_cusp_comparison_point(cat):
    # the far edge of the comparison window sits outside the bare cusp
    assert not in_cusp(cat, 1.78, 1.54)
    assert in_cusp(cat, cat.x0 + cat.a0 * (1.54 - cat.t0), 1.54)
