"""Problem description: flux/viscosity coefficients, initial data, discretization.

Model files are flat ``key = value`` text; ``#`` starts a comment::

    name = burgers
    a = u
    b = 1
    c = 0
    F = 1/(1+x^2)
    branch_lo = 0
    branch_hi = 20
    x_min = -20
    x_max = 20
    nx = 8000
    tau = 1e-4
    eps = 0.0025, 0.005, 0.01
    t_end = 1.8

``a``, ``F``, ``branch_lo`` and ``branch_hi`` are required; everything else
has the defaults in :data:`DEFAULTS`.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import expr
from .errors import ModelError
from .expr import Expression, Jet
from .numerics import find_root

__all__ = [
    "FluxModel", "InitialData", "ProblemSpec", "DEFAULTS", "REQUIRED_KEYS",
    "load_problem", "parse_problem", "build_problem", "inverse_initial_jet",
]

DEFAULTS = {
    "b": "1",
    "c": "0",
    "x_min": "-20",
    "x_max": "20",
    "nx": "8000",
    "tau": "1e-4",
    "eps": "0.01",
    "t_end": "1.8",
}
REQUIRED_KEYS = ("a", "F", "branch_lo", "branch_hi")
KNOWN_KEYS = ("name",) + REQUIRED_KEYS + tuple(DEFAULTS)

# monotonicity is checked on this many grid intervals
MONOTONE_SAMPLES = 2000


@dataclass(frozen=True)
class FluxModel:
    a: Expression
    b: Expression
    c: Expression

    def a_jet(self, v, order: int = 3) -> Jet:
        return expr.eval_jet(self.a, v, order)

    def b_jet(self, v, order: int = 1) -> Jet:
        return expr.eval_jet(self.b, v, order)

    def c_jet(self, v, order: int = 0) -> Jet:
        return expr.eval_jet(self.c, v, order)


@dataclass(frozen=True)
class InitialData:
    F: Expression
    branch_lo: float
    branch_hi: float

    def __call__(self, x):
        return expr.evaluate(self.F, x)

    def jet(self, x, order: int = 3) -> Jet:
        return expr.eval_jet(self.F, x, order)

    @property
    def branch(self) -> tuple[float, float]:
        return self.branch_lo, self.branch_hi

    def inverse(self, v: float) -> float:
        """Point ``x`` of the monotone branch with ``F(x) = v``."""
        lo, hi = self.branch
        flo, fhi = float(self(lo)), float(self(hi))
        if not min(flo, fhi) <= v <= max(flo, fhi):
            raise ModelError(
                f"value {v!r} outside the range [{min(flo, fhi)!r}, {max(flo, fhi)!r}] of F on the branch")
        return find_root(lambda x: float(self(x)) - v, (lo, hi), tol=1e-14)


@dataclass(frozen=True)
class ProblemSpec:
    flux: FluxModel
    init: InitialData
    x_min: float = -20.0
    x_max: float = 20.0
    nx: int = 8000
    tau: float = 1e-4
    eps_list: tuple[float, ...] = (0.01,)
    t_end: float = 1.8
    name: str = "model"
    sources: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def domain(self) -> tuple[float, float]:
        return self.x_min, self.x_max

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    def replace(self, **changes) -> "ProblemSpec":
        new = dataclasses.replace(self, **changes)
        _validate_numbers(new)
        return new


def inverse_initial_jet(init: InitialData, v: float) -> Jet:
    """Jet (order 3) of the inverse ``f = F^{-1}`` at ``v`` on the monotone branch."""
    x = init.inverse(v)
    return inverse_jet_at(init, x)


def inverse_jet_at(init: InitialData, x: float) -> Jet:
    """Jet of ``F^{-1}`` at ``v = F(x)``, expanded from the foot point ``x``."""
    F = init.jet(x, 3)
    F1, F2, F3 = F[1], F[2], F[3]
    if F1 == 0:
        raise ModelError(f"F'(x) vanishes at x={x!r}; inverse is not differentiable there")
    return Jet.from_derivatives((
        x,
        1.0 / F1,
        -F2 / F1 ** 3,
        (3.0 * F2 ** 2 - F1 * F3) / F1 ** 5,
    ))


def _parse_expr(key: str, text: str, variable: str) -> Expression:
    try:
        return expr.parse(text, variable)
    except expr.ParseError as exc:
        raise ModelError(f"{key}: {exc}") from exc


def _check_monotone(init: InitialData) -> None:
    lo, hi = init.branch
    xs = np.linspace(lo, hi, MONOTONE_SAMPLES + 1)
    try:
        dF = np.broadcast_to(init.jet(xs, 1)[1], xs.shape)
    except expr.DomainError as exc:
        raise ModelError(f"F: {exc}") from exc
    interior = xs[1:-1]
    d_int = dF[1:-1]
    sign = np.sign(float(init(hi)) - float(init(lo)))
    if sign == 0:
        nz = d_int[d_int != 0]
        sign = np.sign(nz[0]) if nz.size else 0.0
    bad = np.nonzero(d_int * sign <= 0)[0]
    if sign == 0 or bad.size:
        x_bad = interior[bad[0]] if bad.size else interior[0]
        raise ModelError(
            f"F is not strictly monotone on branch [{lo!r}, {hi!r}]: fails at x={x_bad:.6g}")


def _check_flux(flux: FluxModel, init: InitialData, x_min: float, x_max: float) -> None:
    xs = np.linspace(x_min, x_max, 1001)
    try:
        vs = np.asarray(init(xs), dtype=float) * np.ones_like(xs)
        da = np.broadcast_to(flux.a_jet(vs, 1)[1], vs.shape)
        expr.evaluate(flux.b, vs)
        expr.evaluate(flux.c, vs)
    except expr.DomainError as exc:
        raise ModelError(str(exc)) from exc
    bad = np.nonzero(da == 0)[0]
    if bad.size:
        raise ModelError(f"a'(u) vanishes at u={vs[bad[0]]:.6g} (sampled from F on the domain)")


def _validate_numbers(spec: ProblemSpec) -> None:
    if not spec.x_min < spec.x_max:
        raise ModelError(f"x_min/x_max: need x_min < x_max, got {spec.x_min!r}, {spec.x_max!r}")
    if spec.nx < 16:
        raise ModelError(f"nx: need nx >= 16, got {spec.nx}")
    if not spec.tau > 0:
        raise ModelError(f"tau: must be positive, got {spec.tau!r}")
    if any(not e > 0 for e in spec.eps_list):
        raise ModelError(f"eps: all values must be positive, got {list(spec.eps_list)}")
    if not spec.t_end > 0:
        raise ModelError(f"t_end: must be positive, got {spec.t_end!r}")


def _as_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ModelError(f"{key}: expected a number, got {text!r}") from None


def parse_eps_list(text: str) -> tuple[float, ...]:
    items = [s for s in text.replace(";", ",").replace(" ", ",").split(",") if s]
    if not items:
        raise ModelError("eps: empty list")
    return tuple(_as_float("eps", s) for s in items)


def build_problem(values: dict[str, str]) -> ProblemSpec:
    """Validate raw string ``values`` (model-file keys) into a ProblemSpec."""
    unknown = sorted(set(values) - set(KNOWN_KEYS))
    if unknown:
        raise ModelError(f"unknown keys: {', '.join(unknown)}")
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ModelError(f"missing required keys: {', '.join(missing)}")
    raw = {**DEFAULTS, **values}
    flux = FluxModel(
        a=_parse_expr("a", raw["a"], "u"),
        b=_parse_expr("b", raw["b"], "u"),
        c=_parse_expr("c", raw["c"], "u"),
    )
    lo, hi = _as_float("branch_lo", raw["branch_lo"]), _as_float("branch_hi", raw["branch_hi"])
    if not lo < hi:
        raise ModelError(f"branch_lo/branch_hi: need branch_lo < branch_hi, got {lo!r}, {hi!r}")
    init = InitialData(_parse_expr("F", raw["F"], "x"), lo, hi)
    nx_f = _as_float("nx", raw["nx"])
    if nx_f != int(nx_f):
        raise ModelError(f"nx: expected an integer, got {raw['nx']!r}")
    spec = ProblemSpec(
        flux=flux,
        init=init,
        x_min=_as_float("x_min", raw["x_min"]),
        x_max=_as_float("x_max", raw["x_max"]),
        nx=int(nx_f),
        tau=_as_float("tau", raw["tau"]),
        eps_list=parse_eps_list(raw["eps"]),
        t_end=_as_float("t_end", raw["t_end"]),
        name=raw.get("name", "model"),
        sources=dict(raw),
    )
    _validate_numbers(spec)
    _check_monotone(init)
    _check_flux(flux, init, spec.x_min, spec.x_max)
    return spec


def parse_problem(text: str, origin: str = "<string>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ModelError(f"{origin}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_problem(path: str | os.PathLike, overrides: dict[str, str] | None = None) -> ProblemSpec:
    """Read, parse and validate a model file; ``overrides`` replace file keys."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"cannot read model file {str(path)!r}: {exc.strerror}") from exc
    values = parse_problem(text, str(path))
    values.setdefault("name", path.stem)
    values.update(overrides or {})
    try:
        return build_problem(values)
    except ModelError as exc:
        raise ModelError(f"{path}: {exc}") from exc
