"""Numerical kernels: roots, cubics, quadrature, RK4, tridiagonal solves, slope fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from .errors import IntegrationError, QuadratureError, RootFindingError, ZeroPivotError

__all__ = [
    "Bracket", "TridiagonalSystem", "find_root", "solve_cubic_real",
    "adaptive_quad", "ode_integrate", "thomas_solve", "fit_slope",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")


def find_root(f: Callable[[float], float], b: Bracket | tuple[float, float],
              tol: float = 1e-12, maxiter: int = 200) -> float:
    """Brent's method: inverse quadratic / secant steps safeguarded by bisection.

    The returned root always lies inside the initial bracket.
    """
    if not isinstance(b, Bracket):
        b = Bracket(*b)
    a, c = float(b.lo), float(b.hi)
    fa, fc = f(a), f(c)
    if fa == 0.0:
        return a
    if fc == 0.0:
        return c
    if fa * fc > 0:
        raise RootFindingError(f"no sign change on [{a}, {c}]: f={fa:.3g}, {fc:.3g}")
    # b is the best iterate, a the previous one, c keeps the bracket [b, c]
    bb, fb = c, fc
    c, fc = a, fa
    d = e = bb - c
    for _ in range(maxiter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = bb - a
        if abs(fc) < abs(fb):
            a, fa = bb, fb
            bb, fb = c, fc
            c, fc = a, fa
        tol1 = 2.0 * _EPS * abs(bb) + 0.5 * tol
        m = 0.5 * (c - bb)
        if abs(m) <= tol1 or fb == 0.0:
            return bb
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (bb - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = bb, fb
        bb += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = f(bb)
    raise RootFindingError(f"no convergence after {maxiter} iterations on [{b.lo}, {b.hi}]")


def solve_cubic_real(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of ``c3 z^3 + c2 z^2 + c1 z + c0``, ascending, with multiplicity.

    Three-real-root case uses the trigonometric form; every root gets one
    Newton polish step.
    """
    if c3 == 0:
        raise ValueError("leading coefficient must be non-zero")
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    # rescale z = k y so the monic coefficients are O(1); avoids under/overflow
    k = max(abs(a), math.sqrt(abs(b)), abs(c) ** (1.0 / 3.0))
    if k == 0.0:
        return [0.0, 0.0, 0.0]
    a, b, c = a / k, b / k / k, c / k / k / k
    # depressed cubic t^3 + p t + q with z = t - a/3
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    half_q = q / 2.0
    third_p = p / 3.0
    disc = half_q * half_q + third_p ** 3
    scale = max(abs(half_q), abs(third_p) ** 1.5, 1e-300)
    if p == 0.0 and q == 0.0:
        roots = [0.0, 0.0, 0.0]
    elif third_p >= 0.0 or disc > 1e-14 * scale * scale:
        # p >= 0 makes the depressed cubic monotone: one real root
        sq = math.sqrt(disc)
        # avoid cancellation in -q/2 + sqrt(disc)
        w = -half_q - math.copysign(sq, half_q)
        u = math.copysign(abs(w) ** (1.0 / 3.0), w)
        roots = [u - third_p / u if u != 0.0 else 0.0]
    else:
        r = 2.0 * math.sqrt(-third_p)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    out = []
    for t in roots:
        z = t - shift
        f = ((z + a) * z + b) * z + c
        df = (3.0 * z + 2.0 * a) * z + b
        if df != 0.0 and abs(f) > 0.0:
            step = f / df
            if abs(step) <= 1e-3 * max(1.0, abs(z)):
                z -= step
        out.append(z * k)
    return sorted(out)


def adaptive_quad(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
                  max_intervals: int = 200_000, initial_panels: int = 16) -> float:
    """Adaptive Simpson quadrature.

    Stops when the summed error estimate is below ``tol * max(1, |I|)``,
    i.e. an absolute tolerance for small integrals and a relative one for
    large ones.  Each panel is refined until its halving estimate
    ``|S2 - S1| / 15`` fits its share of the budget (proportional to width).
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_quad(f, b, a, tol, max_intervals, initial_panels)
    xs = np.linspace(a, b, 2 * initial_panels + 1)
    fs = [f(float(x)) for x in xs]
    panels = []
    coarse = 0.0
    for k in range(initial_panels):
        x0, x2 = float(xs[2 * k]), float(xs[2 * k + 2])
        f0, f1, f2 = fs[2 * k], fs[2 * k + 1], fs[2 * k + 2]
        s = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)
        coarse += s
        panels.append((x0, x2, f0, f1, f2, s))
    budget = tol * max(1.0, abs(coarse))
    width = b - a
    total = 0.0
    n_eval = 0
    stack = panels[::-1]
    while stack:
        x0, x2, f0, f1, f2, whole = stack.pop()
        x1 = 0.5 * (x0 + x2)
        fl = f(0.5 * (x0 + x1))
        fr = f(0.5 * (x1 + x2))
        n_eval += 2
        h = (x2 - x0) / 12.0
        left = h * (f0 + 4.0 * fl + f1)
        right = h * (f1 + 4.0 * fr + f2)
        err = (left + right - whole) / 15.0
        local_tol = budget * (x2 - x0) / width
        if abs(err) <= local_tol or x2 - x0 <= 64 * _EPS * max(abs(x0), abs(x2), 1e-300):
            total += left + right + err
            continue
        if n_eval > 2 * max_intervals:
            raise QuadratureError(
                f"subdivision limit ({max_intervals}) reached on [{a}, {b}] without meeting tol={tol:g}")
        stack.append((x1, x2, f1, fr, f2, right))
        stack.append((x0, x1, f0, fl, f1, left))
    return total


def ode_integrate(rhs: Callable[[float, np.ndarray], np.ndarray], state0: Sequence[float],
                  t0: float, t1: float, dt: float) -> list[tuple[float, np.ndarray]]:
    """Classical RK4 with fixed step; the last step is shortened to land on ``t1``.

    Returns the trajectory ``[(t, state), ...]`` including the initial point.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    y = np.array(state0, dtype=float)
    t = float(t0)
    traj = [(t, y.copy())]
    n_steps = int(math.ceil((t1 - t0) / dt * (1 - 1e-12)))
    for k in range(n_steps):
        h = dt if k < n_steps - 1 else t1 - t
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + h / 2, y + h / 2 * k1))
        k3 = np.asarray(rhs(t + h / 2, y + h / 2 * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t1 if k == n_steps - 1 else t0 + (k + 1) * dt
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t={t:.17g}")
        traj.append((t, y.copy()))
    return traj


@dataclass(frozen=True)
class TridiagonalSystem:
    """``sub[i-1] x[i-1] + main[i] x[i] + sup[i] x[i+1] = rhs[i]``."""

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.main)
        if n < 1:
            raise ValueError("system must have at least one row")
        if len(self.sub) != n - 1 or len(self.sup) != n - 1 or len(self.rhs) != n:
            raise ValueError(
                f"inconsistent lengths: sub={len(self.sub)}, main={n}, sup={len(self.sup)}, rhs={len(self.rhs)}")

    def dense(self) -> np.ndarray:
        n = len(self.main)
        A = np.diag(np.asarray(self.main, dtype=float))
        if n > 1:
            A += np.diag(np.asarray(self.sub, dtype=float), -1) + np.diag(np.asarray(self.sup, dtype=float), 1)
        return A


@numba.njit(cache=True)
def _thomas(sub, main, sup, rhs, out):
    n = main.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    piv = main[0]
    if piv == 0.0:
        return 0
    cp[0] = sup[0] / piv if n > 1 else 0.0
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = main[i] - sub[i - 1] * cp[i - 1]
        if piv == 0.0:
            return i
        if i < n - 1:
            cp[i] = sup[i] / piv
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / piv
    out[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        out[i] = dp[i] - cp[i] * out[i + 1]
    return -1


def thomas_solve(sys: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution."""
    main = np.ascontiguousarray(sys.main, dtype=float)
    n = main.shape[0]
    sub = np.ascontiguousarray(sys.sub, dtype=float) if n > 1 else np.zeros(1)
    sup = np.ascontiguousarray(sys.sup, dtype=float) if n > 1 else np.zeros(1)
    out = np.empty(n)
    bad = _thomas(sub, main, sup, np.ascontiguousarray(sys.rhs, dtype=float), out)
    if bad >= 0:
        raise ZeroPivotError(f"zero pivot at row {bad}", bad)
    return out


def fit_slope(points: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares line through ``(log x, log y)``.

    Returns ``(slope, intercept, residual)`` where residual is the RMS of
    the log-space residuals.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least 2 points for a slope fit")
    if np.any(pts <= 0):
        raise ValueError("all coordinates must be strictly positive")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))
