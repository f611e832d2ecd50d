"""Semi-implicit 1D solver for ``u_t + a(u) u_x = eps [b(u) u_xx + c(u) u_x^2]``.

Each step freezes the coefficients at the old level and treats transport
and diffusion of the new level implicitly::

    (u' - u)/tau + a(u) D u' = eps D(b(u) D u') + eps (c - b')(u) (D u)(D u')

``D(b D .)`` is the conservative three-point stencil with face values
``(b_i + b_{i+1})/2``; since it already carries ``b' u_x^2``, only the
remainder ``(c - b') u_x^2`` is added explicitly-linearized.  End nodes are
frozen at their initial values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, ZeroPivotError
from .expr import eval_jet, evaluate, parse
from .model import ProblemSpec
from .numerics import TridiagonalSystem, adaptive_quad, find_root, thomas_solve

__all__ = [
    "Grid1D", "SolverState", "init_state", "step", "run_to", "mass_drift",
    "is_standard_burgers", "cole_hopf_reference", "interpolate",
]


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    nx: int

    def __post_init__(self):
        if self.nx < 16:
            raise ValueError(f"grid needs nx >= 16, got {self.nx}")
        if not self.x_min < self.x_max:
            raise ValueError("grid needs x_min < x_max")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx + 1)

    @classmethod
    def for_spec(cls, spec: ProblemSpec) -> "Grid1D":
        return cls(spec.x_min, spec.x_max, spec.nx)


@dataclass(frozen=True)
class SolverState:
    t: float
    u: np.ndarray
    eps: float
    grid: Grid1D
    mass_history: tuple[tuple[float, float], ...] = field(default=())

    @property
    def mass(self) -> float:
        return _mass(self.u, self.grid.h)


def _mass(u: np.ndarray, h: float) -> float:
    return float(h * (u.sum() - 0.5 * (u[0] + u[-1])))


def init_state(spec: ProblemSpec, eps: float) -> SolverState:
    grid = Grid1D.for_spec(spec)
    x = grid.nodes
    u = np.array(np.broadcast_to(evaluate(spec.init.F, x), x.shape), dtype=float)
    return SolverState(0.0, u, float(eps), grid, ((0.0, _mass(u, grid.h)),))


def mass_drift(state: SolverState) -> list[tuple[float, float, float]]:
    """``(t, mass, |mass - mass0| / |mass0|)`` for every recorded step."""
    m0 = state.mass_history[0][1]
    return [(t, m, abs(m - m0) / abs(m0)) for t, m in state.mass_history]


def _advance(spec: ProblemSpec, u: np.ndarray, eps: float, h: float, tau: float) -> np.ndarray:
    n = u.shape[0]
    flux = spec.flux
    A = np.broadcast_to(evaluate(flux.a, u), u.shape)
    bj = eval_jet(flux.b, u, 1)
    b = np.broadcast_to(bj[0], u.shape)
    db = np.broadcast_to(bj[1], u.shape)
    c = np.broadcast_to(evaluate(flux.c, u), u.shape)

    Du = (u[2:] - u[:-2]) / (2.0 * h)
    K = c[1:-1] - db[1:-1]
    adv = A[1:-1] - eps * K * Du
    b_face = 0.5 * (b[:-1] + b[1:])
    Bm, Bp = b_face[:-1], b_face[1:]
    r = tau * eps / (h * h)
    s = tau / (2.0 * h)

    main = np.ones(n)
    sub = np.zeros(n - 1)
    sup = np.zeros(n - 1)
    main[1:-1] = 1.0 + r * (Bm + Bp)
    sub[:-1] = -s * adv - r * Bm
    sup[1:] = s * adv - r * Bp
    try:
        return thomas_solve(TridiagonalSystem(sub, main, sup, u))
    except ZeroPivotError as exc:
        raise SolverError(f"zero pivot at row {exc.row}; try a smaller tau than {tau:g}") from exc


def step(spec: ProblemSpec, state: SolverState, tau: float) -> SolverState:
    """Advance ``state`` by one semi-implicit step of size ``tau``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    u = _advance(spec, state.u, state.eps, state.grid.h, tau)
    t = state.t + tau
    if not np.all(np.isfinite(u)):
        raise SolverError(f"non-finite solution at t={t:.17g}")
    return SolverState(t, u, state.eps, state.grid,
                       state.mass_history + ((t, _mass(u, state.grid.h)),))


def run_to(spec: ProblemSpec, state: SolverState, t_target: float,
           snapshot_times=(), tau: float | None = None
           ) -> tuple[SolverState, list[tuple[float, np.ndarray]]]:
    """Step to ``t_target`` (shortening the last step), collecting snapshots.

    Snapshot profiles are linear in time between the bracketing steps.
    """
    tau = spec.tau if tau is None else tau
    if t_target < state.t:
        raise ValueError(f"t_target={t_target} is before the current time {state.t}")
    pending = sorted(float(s) for s in snapshot_times if state.t <= s <= t_target)
    snaps: list[tuple[float, np.ndarray]] = []
    while pending and pending[0] == state.t:
        snaps.append((pending.pop(0), state.u.copy()))
    if t_target == state.t:
        return state, snaps
    h = state.grid.h
    t, u = state.t, state.u
    history = list(state.mass_history)
    n_steps = max(1, int(math.ceil((t_target - t) / tau * (1 - 1e-12))))
    t_start = t
    for k in range(n_steps):
        t_new = t_target if k == n_steps - 1 else t_start + (k + 1) * tau
        u_new = _advance(spec, u, state.eps, h, t_new - t)
        if not np.all(np.isfinite(u_new)):
            raise SolverError(f"non-finite solution at t={t_new:.17g}")
        while pending and pending[0] <= t_new:
            ts = pending.pop(0)
            w = (ts - t) / (t_new - t)
            snaps.append((ts, (1.0 - w) * u + w * u_new))
        t, u = t_new, u_new
        history.append((t, _mass(u, h)))
    return SolverState(t, u, state.eps, state.grid, tuple(history)), snaps


def interpolate(state_or_grid, u: np.ndarray, xs) -> np.ndarray:
    """Linear interpolation of nodal values at arbitrary points."""
    grid = state_or_grid.grid if isinstance(state_or_grid, SolverState) else state_or_grid
    return np.interp(np.asarray(xs, dtype=float), grid.nodes, u)


# -- Cole-Hopf oracle --------------------------------------------------------

_BUMP_F = parse("1/(1+x^2)", "x")


def is_standard_burgers(spec: ProblemSpec) -> bool:
    """a(u) = u, b = 1, c = 0, checked on sample points."""
    us = np.linspace(-3.0, 3.0, 13)
    aj = eval_jet(spec.flux.a, us, 2)
    a_ok = np.allclose(aj[0], us, atol=1e-14) and np.allclose(aj[1], 1.0) and np.allclose(aj[2], 0.0)
    b_ok = np.allclose(evaluate(spec.flux.b, us), 1.0, atol=1e-14)
    c_ok = np.allclose(evaluate(spec.flux.c, us), 0.0, atol=1e-14)
    return bool(a_ok and b_ok and c_ok)


def _antiderivative(spec: ProblemSpec):
    if spec.init.F == _BUMP_F:
        return math.atan
    F = spec.init.F

    def Phi(y):
        return adaptive_quad(lambda s: float(evaluate(F, s)), 0.0, y, 1e-13)
    return Phi


def cole_hopf_reference(spec: ProblemSpec, x: float, t: float, eps: float, tol: float = 1e-10) -> float:
    """Exact viscous Burgers solution via the Cole-Hopf heat-kernel integrals.

    ``u = <(x - y)/t>`` under the weight ``exp(-G(y)/(2 eps))`` with
    ``G(y) = int_0^y F + (x - y)^2/(2t)``, truncated where the weight drops
    below ``exp(-40)`` relative to its peak.
    """
    if not is_standard_burgers(spec):
        raise SolverError("Cole-Hopf reference needs a(u)=u, b=1, c=0")
    if not t > 0:
        raise ValueError("t must be positive")
    Phi = _antiderivative(spec)
    F = spec.init.F

    def G(y):
        return Phi(y) + (x - y) ** 2 / (2.0 * t)

    def dG(y):
        return float(evaluate(F, y)) - (x - y) / t

    # critical points of G are the characteristic feet y + F(y) t = x
    samples = np.linspace(spec.x_min, spec.x_max, 2001)
    M = float(np.max(np.abs(np.broadcast_to(evaluate(F, samples), samples.shape))))
    ys = np.linspace(x - t * M - 1.0, x + t * M + 1.0, 4001)
    g = np.broadcast_to(evaluate(F, ys), ys.shape) - (x - ys) / t
    crit = [float(ys[i]) for i in np.nonzero(g == 0)[0]]
    crit += [find_root(dG, (float(ys[i]), float(ys[i + 1])), tol=1e-14)
             for i in np.nonzero(g[:-1] * g[1:] < 0)[0]]
    crit.sort()
    g_min = min(G(y) for y in crit)
    cut = 80.0 * eps  # (G - G*)/(2 eps) = 40

    def excess(y):
        return G(y) - g_min - cut

    width = math.sqrt(2.0 * t * cut)
    breaks = []
    for anchor, sign in ((crit[0], -1.0), (crit[-1], 1.0)):
        d = width
        while excess(anchor + sign * d) < 0:
            d *= 2.0
        if excess(anchor) < 0:
            lo, hi = sorted((anchor, anchor + sign * d))
            breaks.append(find_root(excess, (lo, hi), tol=1e-13))
        else:
            breaks.append(anchor)
    zl, zr = breaks
    pts = [zl] + [y for y in crit if zl < y < zr] + [zr]

    def w(y):
        return math.exp(-(G(y) - g_min) / (2.0 * eps))

    num = den = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        den += adaptive_quad(w, a, b, tol)
        num += adaptive_quad(lambda y: (x - y) / t * w(y), a, b, tol)
    return num / den
