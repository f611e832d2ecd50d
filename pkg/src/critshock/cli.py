"""Command-line harness: catastrophe, compare, mass, profile, shockfront, solve.

Every subcommand writes CSV files into ``--out`` (default ``./out``), with
file names prefixed by the model name, and prints a short ``key = value``
summary on stdout.  Failures exit non-zero after a single JSON line on
stderr: ``{"error": <kind>, "message": <text>}``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotic import ilin_u, scaling_constants
from .errors import CritShockError, ModelError
from .inviscid import find_catastrophe
from .model import ProblemSpec, load_problem, parse_eps_list
from .numerics import fit_slope
from .pearcey import ProfileQuery, profile_U
from .shockfront import DEFAULT_DS, DEFAULT_SEED_DT, trace
from .viscous import init_state, interpolate, mass_drift, run_to

EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command-line input detected after argument parsing."""


@dataclass
class CompareReport:
    rows: list[tuple[float, float, float, float, float, float]] = field(default_factory=list)
    slope: float | None = None
    intercept: float | None = None
    rms: float | None = None
    mode: str = "mean"
    note: str = ""

    def mean_diffs(self) -> dict[float, float]:
        by_eps: dict[float, list[float]] = {}
        for _, _, eps, _, _, d in self.rows:
            by_eps.setdefault(eps, []).append(d)
        return {e: float(np.mean(v)) for e, v in by_eps.items()}


@dataclass
class MassReport:
    series: dict[float, list[tuple[float, float, float]]] = field(default_factory=dict)

    def max_drift(self, eps: float) -> float:
        return max(r for _, _, r in self.series[eps])


# -- formatting ---------------------------------------------------------------

def fmt(value) -> str:
    """Shortest round-trip representation, so CSVs are byte-stable."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, columns: list[str], rows, comments: list[str] = ()) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _float_list(text: str, what: str) -> list[float]:
    items = [s for s in text.replace(";", ",").replace(" ", ",").split(",") if s]
    if not items:
        raise UsageError(f"{what}: empty list")
    try:
        return [float(s) for s in items]
    except ValueError:
        raise UsageError(f"{what}: cannot parse {text!r} as a list of numbers") from None


def _range(text: str, what: str) -> tuple[float, float]:
    vals = _float_list(text, what)
    if len(vals) != 2 or not vals[0] <= vals[1]:
        raise UsageError(f"{what}: expected 'lo,hi' with lo <= hi, got {text!r}")
    return vals[0], vals[1]


def _tag(value: float) -> str:
    return fmt(value)


# -- shared plumbing ----------------------------------------------------------

def _load(args) -> ProblemSpec:
    overrides = {}
    if getattr(args, "nx", None) is not None:
        overrides["nx"] = str(args.nx)
    if getattr(args, "tau", None) is not None:
        overrides["tau"] = repr(args.tau)
    return load_problem(args.model, overrides)


def _eps_list(args, spec: ProblemSpec) -> list[float]:
    if args.eps is None:
        return list(spec.eps_list)
    try:
        eps = list(parse_eps_list(args.eps))
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    if any(not e > 0 for e in eps):
        raise UsageError(f"eps: all values must be positive, got {eps}")
    return eps


def _map(fn, jobs, *iterables):
    if jobs is None or jobs <= 1:
        return list(map(fn, *iterables))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *iterables))


def _sample_at(spec: ProblemSpec, eps: float, t: float, xs: list[float]) -> list[float]:
    final, _ = run_to(spec, init_state(spec, eps), t)
    return [float(v) for v in interpolate(final, final.u, xs)]


def _mass_series(spec: ProblemSpec, eps: float, t_end: float) -> list[tuple[float, float, float]]:
    final, _ = run_to(spec, init_state(spec, eps), t_end)
    return mass_drift(final)


# -- subcommands --------------------------------------------------------------

def cmd_catastrophe(spec: ProblemSpec) -> dict[str, float]:
    cat = find_catastrophe(spec)
    sc = scaling_constants(cat, spec.flux)
    r = cat.residuals
    out = {
        "x0": cat.x0, "t0": cat.t0, "v0": cat.v0, "a0": cat.a0,
        "a0p": cat.a0p, "a0pp": cat.a0pp, "a0ppp": cat.a0ppp,
        "f0p": cat.f0p, "f0pp": cat.f0pp, "f0ppp": cat.f0ppp,
        "kappa": cat.kappa, "x_foot": cat.x_foot,
        "alpha": sc.alpha, "beta": sc.beta, "gamma": sc.gamma, "b0": sc.b0,
        "residual_position": r[0], "residual_fold": r[1], "residual_inflection": r[2],
    }
    for name, res in zip(("ur1", "ur2", "kappa_relation"), sc.residuals(cat.a0p, cat.kappa)):
        out[f"scaling_residual_{name}"] = res
    return out


def cmd_compare(spec: ProblemSpec, t_star: float, xs: list[float], eps_list: list[float],
                tol: float = 1e-10, per_point: bool = False, jobs: int | None = None) -> CompareReport:
    """Viscous solver against the asymptotic formula, plus the log-log slope over eps."""
    cat = find_catastrophe(spec)
    sc = scaling_constants(cat, spec.flux)
    numeric = _map(_sample_at, jobs, [spec] * len(eps_list), eps_list,
                   [t_star] * len(eps_list), [xs] * len(eps_list))
    report = CompareReport(mode="per-point" if per_point else "mean")
    for eps, u_num in zip(eps_list, numeric):
        for x, un in zip(xs, u_num):
            ua = ilin_u(cat, sc, x, t_star, eps, tol)
            report.rows.append((x, t_star, eps, un, ua, abs(un - ua)))
    if len(set(eps_list)) < 2:
        report.note = "slope fit needs at least two distinct eps values"
        return report
    if per_point:
        pts = [(e, d) for _, _, e, _, _, d in report.rows]
    else:
        pts = sorted(report.mean_diffs().items())
    report.slope, report.intercept, report.rms = fit_slope(pts)
    return report


def cmd_mass(spec: ProblemSpec, eps_list: list[float], t_end: float, jobs: int | None = None) -> MassReport:
    if not eps_list:
        raise UsageError("eps: empty list")
    series = _map(_mass_series, jobs, [spec] * len(eps_list), eps_list, [t_end] * len(eps_list))
    return MassReport(dict(zip(eps_list, series)))


def cmd_profile(X_range: tuple[float, float], T_range: tuple[float, float], nX: int, nT: int,
                tol: float = 1e-12) -> list[tuple[float, float, float]]:
    if nX < 1 or nT < 1:
        raise UsageError("grid sizes must be at least 1")
    Xs = np.linspace(*X_range, nX) if nX > 1 else np.array([X_range[0]])
    Ts = np.linspace(*T_range, nT) if nT > 1 else np.array([T_range[0]])
    return [(float(X), float(T), profile_U(ProfileQuery(float(X), float(T)), tol)) for T in Ts for X in Xs]


def cmd_shockfront(spec: ProblemSpec, t_end: float, dt: float = DEFAULT_SEED_DT, ds: float = DEFAULT_DS):
    cat = find_catastrophe(spec)
    if not t_end > cat.t0 + dt:
        raise UsageError(f"t_end={t_end!r} must exceed the catastrophe time t0={cat.t0:.10g} (plus seed dt)")
    states = trace(spec, t_end, dt, ds, cat)
    return [(s.t, s.x, s.a1, s.a2, float(spec.init(s.a1)), float(spec.init(s.a2)), s.residual)
            for s in states]


def cmd_solve(spec: ProblemSpec, eps: float, times: list[float]) -> list[tuple[float, np.ndarray]]:
    if any(t < 0 for t in times):
        raise UsageError("snapshot times must be non-negative")
    state = init_state(spec, eps)
    _, snaps = run_to(spec, state, max(times), snapshot_times=times)
    return snaps


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("usage", message)
        raise SystemExit(EXIT_USAGE)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="critshock", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True, solver=False):
        if model:
            sp.add_argument("--model", required=True, help="model file")
        if solver:
            sp.add_argument("--nx", type=int, help="override the number of grid cells")
            sp.add_argument("--tau", type=float, help="override the time step")
        sp.add_argument("--out", default="out", help="output directory (default: ./out)")

    sp = sub.add_parser("catastrophe", help="locate the gradient catastrophe and scaling constants")
    common(sp)

    sp = sub.add_parser("compare", help="viscous solver against the asymptotic formula")
    common(sp, solver=True)
    sp.add_argument("--t", type=float, required=True, help="comparison time t*")
    sp.add_argument("--x", required=True, help="comma-separated sample points")
    sp.add_argument("--eps", help="comma-separated viscosities (default: model list)")
    sp.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance for the profile")
    sp.add_argument("--per-point", action="store_true", help="fit the slope on every point, not per-eps means")
    sp.add_argument("--jobs", type=int, default=1, help="parallel solver runs")

    sp = sub.add_parser("mass", help="total mass over time")
    common(sp, solver=True)
    sp.add_argument("--eps", help="comma-separated viscosities (default: model list)")
    sp.add_argument("--t-end", type=float, help="final time (default: model t_end)")
    sp.add_argument("--jobs", type=int, default=1, help="parallel solver runs")

    sp = sub.add_parser("profile", help="tabulate the universal profile U(X, T)")
    common(sp, model=False)
    sp.add_argument("--X-range", default="-5,5", help="lo,hi")
    sp.add_argument("--T-range", default="-5,5", help="lo,hi")
    sp.add_argument("--nX", type=int, default=21)
    sp.add_argument("--nT", type=int, default=21)
    sp.add_argument("--tol", type=float, default=1e-12)

    sp = sub.add_parser("shockfront", help="trace the inviscid shock front")
    common(sp)
    sp.add_argument("--t-end", type=float, help="final time (default: model t_end)")
    sp.add_argument("--dt", type=float, default=DEFAULT_SEED_DT, help="seed offset after t0")
    sp.add_argument("--ds", type=float, default=DEFAULT_DS, help="RK4 step in sqrt(t - t0)")

    sp = sub.add_parser("solve", help="viscous solver snapshots")
    common(sp, solver=True)
    sp.add_argument("--eps", required=True, type=float, help="viscosity")
    sp.add_argument("--t", required=True, help="comma-separated snapshot times")
    return p


def _run(args) -> None:
    out = Path(args.out)
    if args.command == "profile":
        rows = cmd_profile(_range(args.X_range, "--X-range"), _range(args.T_range, "--T-range"),
                           args.nX, args.nT, args.tol)
        path = write_csv(out / "profile.csv", ["X", "T", "U"], rows)
        print(f"rows = {len(rows)}\nfile = {path}")
        return

    spec = _load(args)
    name = spec.name

    if args.command == "catastrophe":
        start = time.perf_counter()
        values = cmd_catastrophe(spec)
        for k, v in values.items():
            print(f"{k} = {fmt(v)}")
        print(f"elapsed_s = {time.perf_counter() - start:.3f}")
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"{name}_catastrophe.csv", "w", newline="\n") as fh:
            fh.write("quantity,value\n")
            fh.writelines(f"{k},{fmt(v)}\n" for k, v in values.items())

    elif args.command == "compare":
        xs = _float_list(args.x, "--x")
        report = cmd_compare(spec, args.t, xs, _eps_list(args, spec), args.tol, args.per_point, args.jobs)
        path = write_csv(out / f"{name}_compare.csv",
                         ["x", "t", "eps", "u_numeric", "u_asymptotic", "abs_diff"], report.rows,
                         [f"model={name} t={fmt(args.t)} nx={spec.nx} tau={fmt(spec.tau)}"])
        print(f"rows = {len(report.rows)}\nfile = {path}\nmode = {report.mode}")
        for eps, d in sorted(report.mean_diffs().items()):
            print(f"mean_abs_diff[{fmt(eps)}] = {fmt(d)}")
        if report.slope is None:
            print(f"slope = none ({report.note})")
        else:
            print(f"slope = {fmt(report.slope)}\nintercept = {fmt(report.intercept)}\nrms = {fmt(report.rms)}")

    elif args.command == "mass":
        eps_list = _eps_list(args, spec)
        t_end = spec.t_end if args.t_end is None else args.t_end
        if not t_end > 0:
            raise UsageError("--t-end must be positive")
        report = cmd_mass(spec, eps_list, t_end, args.jobs)
        for eps, rows in report.series.items():
            path = write_csv(out / f"{name}_mass_eps{_tag(eps)}.csv", ["t", "mass", "relative_drift"], rows,
                             [f"model={name} eps={fmt(eps)} nx={spec.nx} tau={fmt(spec.tau)}"])
            print(f"max_relative_drift[{fmt(eps)}] = {fmt(report.max_drift(eps))}\nfile = {path}")

    elif args.command == "shockfront":
        t_end = spec.t_end if args.t_end is None else args.t_end
        rows = cmd_shockfront(spec, t_end, args.dt, args.ds)
        path = write_csv(out / f"{name}_shock.csv",
                         ["t", "x", "a1", "a2", "u_left", "u_right", "equal_area_residual"], rows,
                         [f"model={name} dt={fmt(args.dt)} ds={fmt(args.ds)}"])
        print(f"rows = {len(rows)}\nmax_equal_area_residual = {fmt(max(r[-1] for r in rows))}\nfile = {path}")

    elif args.command == "solve":
        if not args.eps > 0:
            raise UsageError("--eps must be positive")
        times = _float_list(args.t, "--t")
        x = np.linspace(spec.x_min, spec.x_max, spec.nx + 1)
        for t, u in cmd_solve(spec, args.eps, times):
            path = write_csv(out / f"{name}_eps{_tag(args.eps)}_t{_tag(t)}.csv", ["x", "u"], zip(x, u),
                             [f"model={name} eps={fmt(args.eps)} t={fmt(t)} nx={spec.nx} tau={fmt(spec.tau)}"])
            print(f"file = {path}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    except CritShockError as exc:
        _emit_error(exc.kind, str(exc))
        return EXIT_FAILURE
    except (OSError, ValueError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
