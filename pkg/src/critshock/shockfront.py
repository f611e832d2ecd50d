"""Shock front of the zero-viscosity limit for ``u_t + u u_x = 0`` after the catastrophe.

The front ``x(t)`` and the feet ``a1 < a2`` of the two characteristics
meeting it satisfy::

    dx/dt  = (F(a1) + F(a2)) / 2
    da1/dt = (F(a2) - F(a1)) / (2 (1 + F'(a1) t))
    da2/dt = (F(a1) - F(a2)) / (2 (1 + F'(a2) t))

The system is 0/0 at ``t0``.  It is started from the square-root expansion
at ``t0 + dt``: the feet sit symmetrically about the inflection foot ``a0``
at distance ``sqrt(6 F'(a0)^2 dt / F'''(a0))``, the non-zero roots of the
local cubic ``F'(a0) dt eta + F'''(a0) t0 eta^3 / 6``.  (A factor 2 instead
of 6 gives the fold points, where ``1 + F'(a) t`` vanishes.)  The system is
integrated in ``s = sqrt(t - t0)``, in which the feet are
smooth, so fixed-step RK4 keeps its order right up to the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShockFrontError
from .expr import evaluate
from .inviscid import CatastrophePoint, find_catastrophe
from .model import ProblemSpec
from .numerics import adaptive_quad, ode_integrate
from .viscous import _BUMP_F

__all__ = ["ShockState", "seed", "trace", "equal_area_residual", "characteristic_residuals"]

DEFAULT_SEED_DT = 1e-6
DEFAULT_DS = 1e-3
SEED_FACTOR = 6.0


@dataclass(frozen=True)
class ShockState:
    t: float
    x: float
    a1: float
    a2: float
    residual: float = 0.0


def _require_burgers_flux(spec: ProblemSpec) -> None:
    us = np.linspace(-2.0, 2.0, 9)
    if not np.allclose(np.broadcast_to(evaluate(spec.flux.a, us), us.shape), us, atol=1e-14):
        raise ShockFrontError("shock-front tracing is implemented for a(u) = u only")


def seed(cat_foot: float, spec: ProblemSpec, dt: float = DEFAULT_SEED_DT,
         cat: CatastrophePoint | None = None) -> ShockState:
    """Shock state at ``t0 + dt`` from the leading-order expansion at the catastrophe."""
    if not dt > 0:
        raise ValueError("seed dt must be positive")
    cat = cat or find_catastrophe(spec)
    Fj = spec.init.jet(cat_foot, 3)
    F0, F1, F3 = float(Fj[0]), float(Fj[1]), float(Fj[3])
    if not F3 > 0:
        raise ShockFrontError(f"F'''(a0) = {F3:.6g} must be positive for the square-root expansion")
    delta = math.sqrt(SEED_FACTOR * F1 ** 2 / F3 * dt)
    return ShockState(cat.t0 + dt, cat.x0 + F0 * dt, cat_foot - delta, cat_foot + delta)


def _primitive(spec: ProblemSpec):
    if spec.init.F == _BUMP_F:
        return lambda lo, hi: math.atan(hi) - math.atan(lo)
    F = spec.init.F
    return lambda lo, hi: adaptive_quad(lambda a: float(evaluate(F, a)), lo, hi, 1e-14)


def equal_area_residual(spec: ProblemSpec, a1: float, a2: float, _area=None) -> float:
    """``|(F(a1)+F(a2))(a1-a2)/2 - int_{a2}^{a1} F|``; zero on the true front."""
    area = (_area or _primitive(spec))(a2, a1)
    F1, F2 = float(spec.init(a1)), float(spec.init(a2))
    return abs(0.5 * (F1 + F2) * (a1 - a2) - area)


def characteristic_residuals(spec: ProblemSpec, st: ShockState) -> tuple[float, float]:
    """``x - a_i - F(a_i) t`` for both feet."""
    return (st.x - st.a1 - float(spec.init(st.a1)) * st.t,
            st.x - st.a2 - float(spec.init(st.a2)) * st.t)


def trace(spec: ProblemSpec, t_end: float, dt: float = DEFAULT_SEED_DT, ds: float = DEFAULT_DS,
          cat: CatastrophePoint | None = None) -> list[ShockState]:
    """Integrate the shock-front system from the seed at ``t0 + dt`` to ``t_end``.

    Every returned state carries its equal-area residual.
    """
    _require_burgers_flux(spec)
    cat = cat or find_catastrophe(spec)
    if not t_end > cat.t0 + dt:
        raise ShockFrontError(f"t_end={t_end!r} must exceed the catastrophe time {cat.t0:.10g} + seed dt")
    start = seed(cat.x_foot, spec, dt, cat)
    t0 = cat.t0

    def F_and_slope(a):
        j = spec.init.jet(a, 1)
        return float(j[0]), float(j[1])

    def rhs(s, y):
        x, a1, a2 = y
        t = t0 + s * s
        F1, dF1 = F_and_slope(a1)
        F2, dF2 = F_and_slope(a2)
        d1 = 1.0 + dF1 * t
        d2 = 1.0 + dF2 * t
        if d1 <= 0.0 or d2 <= 0.0:
            raise ShockFrontError(
                f"characteristics refocus at t={t:.10g}: 1 + F'(a) t = {min(d1, d2):.3g}")
        # d/ds = 2 s d/dt
        return np.array([s * (F1 + F2), s * (F2 - F1) / d1, s * (F1 - F2) / d2])

    s0 = math.sqrt(dt)
    s1 = math.sqrt(t_end - t0)
    traj = ode_integrate(rhs, [start.x, start.a1, start.a2], s0, s1, ds)
    area = _primitive(spec)
    out = []
    for k, (s, (x, a1, a2)) in enumerate(traj):
        t = start.t if k == 0 else t_end if s == s1 else t0 + s * s
        out.append(ShockState(t, float(x), float(a1), float(a2), float(equal_area_residual(spec, a1, a2, area))))
    return out
