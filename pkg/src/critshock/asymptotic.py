"""Universal asymptotics near the catastrophe and the pre-shock viscous correction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AdmissibilityError, CuspRegionError
from .expr import evaluate
from .inviscid import CatastrophePoint, characteristic_feet, composite_jet, find_catastrophe
from .model import FluxModel, ProblemSpec
from .pearcey import DEFAULT_TOL, ProfileQuery, profile_U

__all__ = [
    "ScalingConstants", "scaling_constants", "profile_coords", "ilin_u",
    "characteristic_derivatives", "quasitriviality_correct",
]

IDENTITY_TOL = 1e-12
# |a'(v) t + f'(v)| below this is treated as the catastrophe itself
FOLD_TOL = 1e-8


@dataclass(frozen=True)
class ScalingConstants:
    alpha: float
    beta: float
    gamma: float
    b0: float

    def residuals(self, a0p: float, kappa: float) -> tuple[float, float, float]:
        """Relative residuals of the three scaling constraints."""
        return (
            a0p * self.beta * self.gamma / self.alpha - 1.0,
            self.b0 * self.beta / self.alpha ** 2 - 1.0,
            self.alpha / self.gamma ** 3 / kappa - 1.0,
        )


def _constants(a0p: float, b0: float, kappa: float) -> ScalingConstants:
    if not b0 > 0:
        raise AdmissibilityError(f"viscosity b(v0) must be positive, got {b0!r}")
    if not a0p * kappa > 0:
        raise AdmissibilityError(f"need a0'*kappa > 0, got a0'={a0p!r}, kappa={kappa!r}")
    alpha = (kappa * b0 ** 3 / a0p ** 3) ** 0.25
    beta = math.sqrt(kappa * b0 / a0p ** 3)
    # a0' beta gamma / alpha = 1 forces gamma to carry the sign of a0'
    gamma = math.copysign((b0 / (kappa * a0p)) ** 0.25, a0p)
    sc = ScalingConstants(alpha, beta, gamma, b0)
    worst = max(abs(r) for r in sc.residuals(a0p, kappa))
    if worst > IDENTITY_TOL:
        raise AdmissibilityError(f"scaling constraints violated (residual {worst:.3g})")
    return sc


def scaling_constants(cat: CatastrophePoint, flux: FluxModel) -> ScalingConstants:
    """alpha, beta, gamma mapping (x, t, u) near the catastrophe to (X, T, U)."""
    b0 = float(evaluate(flux.b, cat.v0))
    return _constants(cat.a0p, b0, cat.kappa)


def profile_coords(cat: CatastrophePoint, sc: ScalingConstants, x: float, t: float,
                   eps: float) -> ProfileQuery:
    X = (x - cat.x0 - cat.a0 * (t - cat.t0)) / (sc.alpha * eps ** 0.75)
    T = (t - cat.t0) / (sc.beta * math.sqrt(eps))
    return ProfileQuery(X, T)


def ilin_u(cat: CatastrophePoint, sc: ScalingConstants, x: float, t: float, eps: float,
           tol: float = DEFAULT_TOL) -> float:
    """Asymptotic solution ``v0 + gamma eps^(1/4) U(X, T)`` near the catastrophe."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    q = profile_coords(cat, sc, x, t, eps)
    return cat.v0 + sc.gamma * eps ** 0.25 * profile_U(q, tol)


def characteristic_derivatives(spec: ProblemSpec, x: float, t: float) -> tuple[float, float, float, float]:
    """``(v, v_x, v_xx, 1 + (a o F)'(xi) t)`` of the inviscid solution for ``t < t0``.

    Implicit differentiation of ``x = xi + a(F(xi)) t``: with
    ``xi_x = 1/(1 + A' t)`` and ``xi_xx = -A'' t xi_x^3`` (``A = a o F``),
    ``v_x = F' xi_x`` and ``v_xx = F'' xi_x^2 + F' xi_xx``.
    """
    feet = characteristic_feet(spec, x, t)
    if len(feet) != 1:
        raise CuspRegionError(f"expected one characteristic through (x={x!r}, t={t!r}), found {len(feet)}")
    xi = feet[0]
    Fj = spec.init.jet(xi, 2)
    A = composite_jet(spec, xi, 2)
    stretch = 1.0 + float(A[1]) * t
    xi_x = 1.0 / stretch
    xi_xx = -float(A[2]) * t * xi_x ** 3
    v = float(Fj[0])
    v_x = float(Fj[1]) * xi_x
    v_xx = float(Fj[2]) * xi_x ** 2 + float(Fj[1]) * xi_xx
    return v, v_x, v_xx, stretch


def _bracket(flux: FluxModel, v: float, v_x: float, v_xx: float) -> float:
    """``(b/a') v_xx/v_x + ((c a' - b a'')/a'^2) v_x log|v_x|`` at the state v."""
    aj = flux.a_jet(v, 2)
    a1, a2 = float(aj[1]), float(aj[2])
    b = float(evaluate(flux.b, v))
    c = float(evaluate(flux.c, v))
    return b / a1 * v_xx / v_x + (c * a1 - b * a2) / a1 ** 2 * v_x * math.log(abs(v_x))


def quasitriviality_correct(spec: ProblemSpec, x: float, t: float, eps: float,
                            cat: CatastrophePoint | None = None, *, match_data: bool = False) -> float:
    """First-order viscous correction of the inviscid solution before the catastrophe.

    ``u = v - eps [ (b/a') v_xx/v_x + ((c a' - b a'')/a'^2) v_x log|v_x| ]``

    The substitution maps the inviscid solution ``v`` to a viscous one whose
    initial data differ from those of ``v`` by ``O(eps)``.  With
    ``match_data=True`` the inviscid data are shifted first so that the
    viscous solution starts from F itself; to first order this adds
    ``eps * g(xi) / (1 + (a o F)'(xi) t)``, g being the bracket evaluated on
    F at the foot ``xi``.  This is the variant to compare with a solver run
    started from F.
    """
    cat = cat or find_catastrophe(spec)
    if not t < cat.t0:
        raise CuspRegionError(f"quasitriviality needs t < t0={cat.t0:.6g}; use ilin_u near the shock")
    v, v_x, v_xx, stretch = characteristic_derivatives(spec, x, t)
    if eps == 0:
        return v
    if abs(v_x) > 1.0 / FOLD_TOL or abs(stretch) < FOLD_TOL:
        raise CuspRegionError(f"(x={x!r}, t={t!r}) too close to the catastrophe: |v_x| ~ {abs(v_x):.3g}")
    if abs(v_x) < FOLD_TOL:
        raise CuspRegionError(f"v_x={v_x:.3g} vanishes at (x={x!r}, t={t!r}); correction undefined")
    u = v - eps * _bracket(spec.flux, v, v_x, v_xx)
    if match_data:
        xi = characteristic_feet(spec, x, t)[0]
        Fj = spec.init.jet(xi, 2)
        F1 = float(Fj[1])
        if abs(F1) < FOLD_TOL:
            raise CuspRegionError(f"F'({xi:.6g}) vanishes; initial-data matching undefined")
        u += eps * _bracket(spec.flux, float(Fj[0]), F1, float(Fj[2])) / stretch
    return u
