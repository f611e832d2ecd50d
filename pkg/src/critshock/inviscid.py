"""Inviscid transport equation: characteristics, gradient catastrophe, local cubic model.

Characteristics are parametrized by their foot ``xi`` on the initial line::

    x = xi + a(F(xi)) t,    v(x, t) = F(xi)

which is the same as ``x = a(v) t + f(v)`` on every monotone piece of F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryMinimumError, CuspRegionError, MultipleRootsError, NoSteepeningError,
    NonGenericError, RootFindingError,
)
from .expr import Jet, compose, evaluate
from .model import ProblemSpec, inverse_initial_jet
from .numerics import find_root, solve_cubic_real

__all__ = [
    "CatastrophePoint", "LocalCoords", "composite_jet", "characteristic_feet",
    "solve_characteristic", "find_catastrophe", "local_cubic", "local_coords", "in_cusp",
]

KAPPA_TOL = 1e-10
SCAN_POINTS = 2000


@dataclass(frozen=True)
class CatastrophePoint:
    x0: float
    t0: float
    v0: float
    a0: float
    a0p: float
    a0pp: float
    a0ppp: float
    f0p: float
    f0pp: float
    f0ppp: float
    kappa: float
    x_foot: float

    @property
    def residuals(self) -> tuple[float, float, float]:
        """Residuals of ``x0 = a0 t0 + f0``, ``a0' t0 + f0' = 0``, ``a0'' t0 + f0'' = 0``."""
        return (
            self.x0 - (self.a0 * self.t0 + self.x_foot),
            self.a0p * self.t0 + self.f0p,
            self.a0pp * self.t0 + self.f0pp,
        )


@dataclass(frozen=True)
class LocalCoords:
    xbar: float
    tbar: float
    vbar: float | None = None


def composite_jet(spec: ProblemSpec, x, order: int = 3) -> Jet:
    """Jet of ``a(F(x))`` in x."""
    F = spec.init.jet(x, order)
    return compose(spec.flux.a_jet(F.value, order), F)


def _foot_residual(spec: ProblemSpec, x: float, t: float):
    a, F = spec.flux.a, spec.init.F

    def g(xi):
        return xi + evaluate(a, evaluate(F, xi)) * t - x
    return g


def characteristic_feet(spec: ProblemSpec, x: float, t: float, n_scan: int = 4001) -> list[float]:
    """All feet ``xi`` in the model domain whose characteristic reaches ``(x, t)``."""
    lo, hi = spec.domain
    xs = np.linspace(lo, hi, n_scan)
    g = xs + np.broadcast_to(evaluate(spec.flux.a, evaluate(spec.init.F, xs)), xs.shape) * t - x
    resid = _foot_residual(spec, x, t)
    feet = []
    for i in np.nonzero(g == 0)[0]:
        feet.append(float(xs[i]))
    for i in np.nonzero(g[:-1] * g[1:] < 0)[0]:
        feet.append(find_root(resid, (float(xs[i]), float(xs[i + 1])), tol=1e-13))
    return sorted(feet)


def solve_characteristic(spec: ProblemSpec, x: float, t: float, *, cat: "CatastrophePoint | None" = None,
                         cusp_guard: bool = True, safety: float = 1.0) -> float:
    """Inviscid solution ``v(x, t)`` by the method of characteristics.

    For ``t > t0`` the guard refuses points inside the cusp and otherwise
    picks the root continuous with the pre-catastrophe branch (the
    outermost foot on the side of ``x`` relative to the centre line).
    With ``cusp_guard=False`` several roots raise :class:`MultipleRootsError`.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return float(spec.init(x))
    feet = characteristic_feet(spec, x, t)
    if not feet:
        raise RootFindingError(f"no characteristic reaches (x={x!r}, t={t!r}) from the model domain")
    if len(feet) == 1:
        return float(spec.init(feet[0]))
    if not cusp_guard:
        raise MultipleRootsError(f"{len(feet)} characteristics reach (x={x!r}, t={t!r}): feet {feet}")
    cat = cat or find_catastrophe(spec)
    if t <= cat.t0:
        # rounding-level duplicates of a single root
        if feet[-1] - feet[0] < 1e-9:
            return float(spec.init(feet[0]))
        raise MultipleRootsError(f"multiple feet {feet} before the catastrophe time")
    if in_cusp(cat, x, t, safety):
        raise CuspRegionError(f"(x={x!r}, t={t!r}) lies inside the cusp region")
    xbar = x - cat.x0 - cat.a0 * (t - cat.t0)
    return float(spec.init(feet[-1] if xbar > 0 else feet[0]))


def find_catastrophe(spec: ProblemSpec) -> CatastrophePoint:
    """Locate the gradient catastrophe on the declared monotone branch.

    The foot is the interior minimizer of ``(a o F)'`` (where the lifespan
    ``-1/(a o F)'`` is shortest), found by a grid scan and refined on
    ``(a o F)'' = 0``.
    """
    lo, hi = spec.init.branch
    xs = np.linspace(lo, hi, SCAN_POINTS + 1)
    g = np.broadcast_to(composite_jet(spec, xs, 1)[1], xs.shape)
    if not np.any(g < 0):
        raise NoSteepeningError("a(F(x)) is nowhere decreasing on the branch: no gradient catastrophe")
    i = int(np.argmin(g))
    flat = float(np.ptp(g)) <= 1e-12 * max(1.0, abs(float(g[i])))
    if flat:
        # constant slope: every point degenerates at once; kappa decides below
        x_foot = 0.5 * (lo + hi)
    elif i == 0 or i == len(xs) - 1:
        raise BoundaryMinimumError(
            f"steepest point lies on the branch boundary x={xs[i]:.6g}; extend the branch")
    else:
        def g2(x):
            return float(composite_jet(spec, x, 2)[2])
        left, right = float(xs[i - 1]), float(xs[i + 1])
        if g2(left) * g2(right) > 0:
            x_foot = float(xs[i])
        else:
            x_foot = find_root(g2, (left, right), tol=1e-14)
    slope = float(composite_jet(spec, x_foot, 1)[1])
    t0 = -1.0 / slope
    v0 = float(spec.init(x_foot))
    aj = spec.flux.a_jet(v0, 3)
    a0 = float(aj[0])
    x0 = x_foot + a0 * t0
    fj = inverse_initial_jet(spec.init, v0)
    a0p, a0pp, a0ppp = (float(aj[k]) for k in (1, 2, 3))
    f0p, f0pp, f0ppp = (float(fj[k]) for k in (1, 2, 3))
    kappa = -(a0ppp * t0 + f0ppp) / 6.0
    if abs(kappa) < KAPPA_TOL:
        raise NonGenericError(f"degenerate catastrophe: kappa={kappa:.3g} (|kappa| < {KAPPA_TOL:g})")
    return CatastrophePoint(
        x0=x0, t0=t0, v0=v0, a0=a0, a0p=a0p, a0pp=a0pp, a0ppp=a0ppp,
        f0p=f0p, f0pp=f0pp, f0ppp=f0ppp, kappa=kappa, x_foot=x_foot,
    )


def local_coords(cat: CatastrophePoint, x: float, t: float, k: float) -> LocalCoords:
    return LocalCoords((x - cat.x0 - cat.a0 * (t - cat.t0)) / k, (t - cat.t0) / k ** (2.0 / 3.0))


def local_cubic(cat: CatastrophePoint, xbar: float, tbar: float) -> float:
    """Unique real root ``vbar`` of ``xbar = a0' vbar tbar - kappa vbar^3``."""
    roots = solve_cubic_real(cat.kappa, 0.0, -cat.a0p * tbar, xbar)
    distinct = [r for i, r in enumerate(roots) if i == 0 or r - roots[i - 1] > 1e-12 * max(1.0, abs(r))]
    if len(distinct) > 1:
        raise CuspRegionError(f"cubic has {len(distinct)} real roots at xbar={xbar!r}, tbar={tbar!r}")
    return roots[0]


def in_cusp(cat: CatastrophePoint, x: float, t: float, safety: float = 1.0) -> bool:
    """Whether ``(x, t)``, ``t > t0``, lies in the (safety-scaled) cusp region."""
    if not t > cat.t0:
        raise ValueError("in_cusp requires t > t0")
    dt = t - cat.t0
    lhs = abs(x - cat.x0 - cat.a0 * dt) / dt ** 1.5
    return lhs < safety * 2.0 / (3.0 * math.sqrt(3.0)) * math.sqrt(cat.a0p ** 3 / cat.kappa)
