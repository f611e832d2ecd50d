r"""Pearcey integral and the universal shock profile.

.. math::

    W(X, T) = \int e^{-S(z)}\,dz, \qquad S(z) = (z^4 - 2 z^2 T + 4 z X)/8,

    U(X, T) = -2\,\partial_X \log W = \langle z \rangle_{e^{-S}}.

All integrals are evaluated with the weight ``exp(-(S - S*))`` where ``S*``
is the global minimum of S, over the window where ``S - S* < TRUNCATION``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import adaptive_quad, find_root, solve_cubic_real

__all__ = ["ProfileQuery", "phase", "critical_points", "log_pearcey_W", "profile_U", "saddle_U"]

# weight below exp(-40) ~ 4e-18 is dropped
TRUNCATION = 40.0
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class ProfileQuery:
    X: float
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.X) and math.isfinite(self.T)):
            raise ValueError(f"non-finite profile query ({self.X}, {self.T})")


def phase(z: float, X: float, T: float) -> float:
    z2 = z * z
    return (z2 * z2 - 2.0 * z2 * T + 4.0 * z * X) / 8.0


def critical_points(X: float, T: float) -> list[float]:
    """Real roots of ``S'(z) = (z^3 - T z + X)/2``."""
    return solve_cubic_real(1.0, 0.0, -T, X)


def _minimum(X: float, T: float) -> tuple[float, float]:
    crit = critical_points(X, T)
    vals = [phase(z, X, T) for z in crit]
    best = min(vals)
    winners = [z for z, s in zip(crit, vals) if s == best]
    if len(winners) > 1 and X == 0.0:
        # symmetric double well: report the symmetric mean
        return 0.0, best
    return winners[0], best


def _window(X: float, T: float) -> tuple[list[float], float]:
    """Breakpoints ``[zl, crit..., zr]`` and the phase minimum."""
    crit = critical_points(X, T)
    s_min = min(phase(z, X, T) for z in crit)

    def excess(z):
        return phase(z, X, T) - s_min - TRUNCATION

    lo_c, hi_c = crit[0], crit[-1]
    step = 1.0
    zl = lo_c - step
    while excess(zl) < 0:
        step *= 2.0
        zl = lo_c - step
    zr_step = 1.0
    zr = hi_c + zr_step
    while excess(zr) < 0:
        zr_step *= 2.0
        zr = hi_c + zr_step
    zl = find_root(excess, (zl, lo_c), tol=1e-12) if excess(lo_c) < 0 else lo_c
    zr = find_root(excess, (hi_c, zr), tol=1e-12) if excess(hi_c) < 0 else hi_c
    inner = [z for z in sorted(set(crit)) if zl < z < zr]
    return [zl] + inner + [zr], s_min


def _integrate(g, breaks, tol):
    return sum(adaptive_quad(g, a, b, tol) for a, b in zip(breaks[:-1], breaks[1:]))


def _moments(q: ProfileQuery, tol: float) -> tuple[float, float, float]:
    X, T = q.X, q.T
    breaks, s_min = _window(X, T)

    def w(z):
        return math.exp(-(phase(z, X, T) - s_min))

    m0 = _integrate(w, breaks, tol)
    m1 = _integrate(lambda z: z * w(z), breaks, tol)
    return m0, m1, s_min


def log_pearcey_W(q: ProfileQuery, tol: float = DEFAULT_TOL) -> float:
    """``log W(X, T)`` without overflow: ``log(int exp(-(S - S*))) - S*``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    X, T = q.X, q.T
    breaks, s_min = _window(X, T)
    m0 = _integrate(lambda z: math.exp(-(phase(z, X, T) - s_min)), breaks, tol)
    return math.log(m0) - s_min


def profile_U(q: ProfileQuery, tol: float = DEFAULT_TOL) -> float:
    """Universal profile ``U = -2 d/dX log W``, computed as the weighted mean of z."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if q.X == 0.0:
        # the weight is even in z, so the mean is exactly zero
        return 0.0
    m0, m1, _ = _moments(q, tol)
    return m1 / m0


def saddle_U(q: ProfileQuery) -> float:
    """Leading-order Laplace value of U: the global minimizer of the phase."""
    return _minimum(q.X, q.T)[0]
