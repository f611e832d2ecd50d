import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critshock.errors import IntegrationError, QuadratureError, RootFindingError, ZeroPivotError
from critshock.numerics import (
    Bracket, TridiagonalSystem, adaptive_quad, find_root, fit_slope, ode_integrate,
    solve_cubic_real, thomas_solve,
)


@pytest.mark.parametrize("f, lo, hi, want", [
    (lambda x: x * x - 2, 1.0, 2.0, math.sqrt(2)),
    (lambda x: x, -1.0, 1.0, 0.0),
    (math.cos, 1.0, 2.0, math.pi / 2),
])
def test_find_root_examples(f, lo, hi, want):
    assert find_root(f, Bracket(lo, hi), tol=1e-12) == pytest.approx(want, abs=1e-11)


def test_find_root_no_sign_change():
    with pytest.raises(RootFindingError):
        find_root(lambda x: x * x + 1, (-1.0, 1.0))


def test_bracket_order():
    with pytest.raises(ValueError):
        Bracket(1.0, 0.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.integers(1, 4))
def test_find_root_stays_in_bracket(c, w, p):
    lo, hi = c - w, c + 1.3 * w
    r = find_root(lambda x: (x - c) ** (2 * p - 1), (lo, hi), tol=1e-12)
    assert lo <= r <= hi
    assert abs(r - c) < 1e-3


@pytest.mark.parametrize("coef, want", [
    ((1, 0, 1, 2), [-1.0]),
    ((1, 0, -3, 0), [-math.sqrt(3), 0.0, math.sqrt(3)]),
    ((1, 0, 4, 2), [-0.4734658077]),
    ((1, -3, 3, -1), [1.0, 1.0, 1.0]),
    ((2, -2, -2, 2), [-1.0, 1.0, 1.0]),
])
def test_cubic_examples(coef, want):
    got = solve_cubic_real(*coef)
    assert got == pytest.approx(want, abs=1e-9)


def test_cubic_matches_bisection_oracle():
    lo, hi = -1.0, 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if mid ** 3 + 4 * mid + 2 < 0 else (lo, mid)
    assert solve_cubic_real(1, 0, 4, 2)[0] == pytest.approx(lo, abs=1e-10)


@settings(max_examples=500, deadline=None)
@given(st.floats(0.1, 10), st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_cubic_roots_are_roots(c3, c2, c1, c0):
    roots = solve_cubic_real(c3, c2, c1, c0)
    assert roots == sorted(roots)
    assert len(roots) in (1, 2, 3)
    for r in roots:
        p = ((c3 * r + c2) * r + c1) * r + c0
        scale = max(1.0, abs(c0), abs(c3 * r ** 3), abs(c2 * r * r), abs(c1 * r))
        assert abs(p) <= 1e-9 * scale


def test_cubic_roots_from_factors():
    rng = np.random.default_rng(1)
    for _ in range(200):
        r = np.sort(rng.uniform(-5, 5, 3))
        c = np.poly(r)
        got = solve_cubic_real(*c)
        if len(got) == 3:
            np.testing.assert_allclose(got, r, atol=1e-6)


def test_quad_examples():
    assert adaptive_quad(lambda x: x * x, 0, 1, 1e-10) == pytest.approx(1 / 3, abs=1e-10)
    assert adaptive_quad(lambda x: math.exp(-x * x), -10, 10, 1e-10) == pytest.approx(math.sqrt(math.pi), abs=1e-9)
    quartic = adaptive_quad(lambda z: math.exp(-z ** 4 / 8), -7.0, 7.0, 1e-12)
    assert quartic == pytest.approx(2 ** 0.75 * math.gamma(0.25) / 2, rel=1e-10)


def test_quad_reversed_and_empty():
    assert adaptive_quad(lambda x: x, 1, 0) == pytest.approx(-0.5)
    assert adaptive_quad(lambda x: x, 1, 1) == 0.0


def test_quad_limit():
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: math.sin(1 / x) if x else 0.0, 0.0, 1.0, 1e-14, max_intervals=50)


def test_ode_constant():
    traj = ode_integrate(lambda t, y: np.zeros_like(y), [3.0], 0.0, 1.0, 0.1)
    assert all(y[0] == 3.0 for _, y in traj)
    assert traj[-1][0] == 1.0


def test_ode_exponential():
    traj = ode_integrate(lambda t, y: y, [1.0], 0.0, 1.0, 1e-3)
    assert traj[-1][1][0] == pytest.approx(math.e, abs=1e-10)


def test_ode_last_step_shortened():
    traj = ode_integrate(lambda t, y: y, [1.0], 0.0, 1.0, 0.3)
    assert [t for t, _ in traj] == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])


def test_ode_order_four():
    def max_err(dt):
        traj = ode_integrate(lambda t, y: y, [1.0], 0.0, 1.0, dt)
        return max(abs(y[0] - math.exp(t)) for t, y in traj)
    ratio = max_err(0.1) / max_err(0.05)
    assert 14 < ratio < 18


def test_ode_non_finite():
    with np.errstate(over="ignore"), pytest.raises(IntegrationError):
        ode_integrate(lambda t, y: y * y, [1.0], 0.0, 2.0, 0.01)


def test_thomas_identity():
    r = np.array([1.0, -2.0, 5.0])
    np.testing.assert_array_equal(thomas_solve(TridiagonalSystem(np.zeros(2), np.ones(3), np.zeros(2), r)), r)


def test_thomas_small_against_dense():
    sys = TridiagonalSystem(np.ones(2), 2 * np.ones(3), np.ones(2), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(thomas_solve(sys), np.linalg.solve(sys.dense(), sys.rhs), rtol=1e-14, atol=1e-15)


def test_thomas_large_residual():
    rng = np.random.default_rng(7)
    n = 1000
    sub, sup = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
    main = 2.5 + rng.uniform(0, 1, n)
    rhs = rng.uniform(-1, 1, n)
    sys = TridiagonalSystem(sub, main, sup, rhs)
    x = thomas_solve(sys)
    assert np.max(np.abs(sys.dense() @ x - rhs)) <= 1e-10


def test_thomas_random_small_suite():
    rng = np.random.default_rng(3)
    for _ in range(300):
        n = int(rng.integers(1, 9))
        sub, sup = rng.normal(size=n - 1), rng.normal(size=n - 1)
        main = rng.normal(size=n) + 3 * np.sign(rng.normal(size=n))
        sys = TridiagonalSystem(sub, main, sup, rng.normal(size=n))
        A = sys.dense()
        if np.linalg.cond(A) > 1e8:
            continue
        try:
            x = thomas_solve(sys)
        except ZeroPivotError:
            continue
        np.testing.assert_allclose(x, np.linalg.solve(A, sys.rhs), rtol=1e-8, atol=1e-10)


def test_thomas_zero_pivot():
    sys = TridiagonalSystem(np.ones(1), np.array([0.0, 1.0]), np.ones(1), np.ones(2))
    with pytest.raises(ZeroPivotError) as info:
        thomas_solve(sys)
    assert info.value.row == 0


def test_tridiagonal_shape_checks():
    with pytest.raises(ValueError):
        TridiagonalSystem(np.ones(2), np.ones(2), np.ones(1), np.ones(2))


def test_fit_slope_sqrt():
    pts = [(e, math.sqrt(e)) for e in (0.01, 0.02, 0.05, 0.1)]
    slope, _, res = fit_slope(pts)
    assert slope == pytest.approx(0.5, abs=1e-13)
    assert res == pytest.approx(0.0, abs=1e-13)


def test_fit_slope_linear():
    slope, intercept, _ = fit_slope([(1, 3), (2, 6), (5, 15)])
    assert slope == pytest.approx(1.0)
    assert intercept == pytest.approx(math.log(3))


@pytest.mark.parametrize("pts", [[(1, 1)], [(1, 1), (0, 2)], [(1, 1), (2, -1)]])
def test_fit_slope_rejects(pts):
    with pytest.raises(ValueError):
        fit_slope(pts)
