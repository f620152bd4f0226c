"""Command-line front end.

Subcommands: solve, detect, compare, invariants. See ``lieosc --help``.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import time

import numpy as np

from .closed_form import ck_solution, powerlaw2_solution, quartic_solution
from .config import ConfigError, RunConfig, load_config
from .integrability import detect_kcond, detect_quartic
from .invariants import (
    conservation_drift, kcond_first_integral, lewis_cointegrate, lewis_series,
    MilnePinneyState, powerlaw2_I1, powerlaw2_I2, powerlaw2_reduce, quartic_I1, quartic_phase,
)
from .ode import IntegrationError
from .sl2 import Traceless, exp_traceless
from .system import BlowUpError, PhaseState, flow_state, integrate_group, integrate_trajectory

log = logging.getLogger("lieosc")

EXIT_OK, EXIT_NEGATIVE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

EPILOG = """\
exit codes:
  0  success
  1  negative result (no integrable family detected, tolerance exceeded,
     invariant not conserved)
  2  configuration error
  3  numerical failure (integration failure, coefficient blow-up)

environment:
  LIEOSC_LOG  logging level (debug, info, warning, error); default warning
"""


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _xi0(cfg: RunConfig) -> PhaseState:
    return PhaseState(cfg.x0, cfg.p0)


def _ode_tols(cfg: RunConfig) -> dict:
    out = {}
    if "rel_tol" in cfg.tolerances:
        out["rel_tol"] = cfg.tolerances["rel_tol"]
    if "abs_tol" in cfg.tolerances:
        out["abs_tol"] = cfg.tolerances["abs_tol"]
    return out


# --- solve --------------------------------------------------------------------

SOLVE_COLUMNS = ("t", "x", "p", "a11", "a12", "a21", "a22", "det_err")


def run_solve(cfg: RunConfig) -> np.ndarray:
    """Rows of (t, x, p, a11, a12, a21, a22, det_err) for the group solution."""
    b = cfg.curve()
    path = integrate_group(b, cfg.grid, **_ode_tols(cfg))
    traj = flow_state(path, _xi0(cfg))
    m = path.matrices
    det_err = np.linalg.det(m) - 1.0
    return np.column_stack([path.grid, traj.x, traj.p,
                            m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1], det_err])


def render_solve(rows: np.ndarray, fmt: str) -> str:
    if fmt == "json":
        return _dump_json([dict(zip(SOLVE_COLUMNS, map(float, r))) for r in rows])
    buf = io.StringIO()
    buf.write(",".join(SOLVE_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


# --- detect -------------------------------------------------------------------

def run_detect(cfg: RunConfig, tol=None) -> dict:
    b = cfg.curve()
    grid = cfg.grid
    b.check_span(grid[0], grid[-1])
    if tol is None and "detect_tol" in cfg.tolerances:
        tol = cfg.tolerances["detect_tol"]
    attempts = {}
    try:
        report = detect_kcond(b, grid, tol)
        attempts["kcond"] = report.residual
        if report.integrable:
            return _with_attempts(report.to_dict(), attempts)
    except ValueError as exc:
        log.info("kcond detection not applicable: %s", exc)
        attempts["kcond"] = str(exc)

    vals = b(grid)
    if np.allclose(vals[:, 0], 1.0, rtol=0, atol=1e-12) and np.allclose(vals[:, 1], 0.0, rtol=0, atol=1e-12):
        w = cfg.omega
        qtol = tol if tol is not None else (1e-3 if b.name == "sampled" else 1e-6)
        try:
            report = detect_quartic(lambda t: b(t)[..., 2] / w ** 2, w, grid, qtol)
            attempts["quartic"] = report.residual
            if report.integrable:
                return _with_attempts(report.to_dict(), attempts)
        except ValueError as exc:
            log.info("quartic detection not applicable: %s", exc)
            attempts["quartic"] = str(exc)
    else:
        attempts["quartic"] = "needs b0 = 1 and b1 = 0"

    residuals = [v for v in attempts.values() if isinstance(v, float)]
    return _with_attempts({
        "family": "none", "constants": {}, "flags": [],
        "residual": min(residuals) if residuals else None,
        "span": [float(grid[0]), float(grid[-1])],
    }, attempts)


def _with_attempts(d: dict, attempts: dict) -> dict:
    d["attempts"] = attempts
    return d


# --- compare ------------------------------------------------------------------

def closed_form_positions(cfg: RunConfig) -> np.ndarray:
    p, xi0, grid = cfg.parameters, _xi0(cfg), cfg.grid
    if cfg.family == "caldirola-kanai":
        return ck_solution(p.get("m0", 1.0), p["mu"], p["omega"], xi0, grid)
    if cfg.family == "powerlaw2":
        return powerlaw2_solution(p["L"], p["c1"], p["omega"], xi0, grid)
    if cfg.family == "quartic":
        k = p.get("k", 1.0)
        if k != 1.0:
            # F = k/V^4 is the k = 1 member with V scaled by k^{-1/4}
            s = k ** -0.25
            return quartic_solution(p["u0"] * s, p["u1"] * s, p["omega"], xi0, grid)
        return quartic_solution(p["u0"], p["u1"], p["omega"], xi0, grid)
    if cfg.family == "constant":
        b = cfg.curve()
        b0, b1, b2 = (float(v) for v in b(0.0))
        M = Traceless(0.5 * b1, b0, -b2)
        out = []
        for t in grid:
            E = exp_traceless((t - grid[0]) * M)
            out.append(E.alpha * xi0.x + E.beta * xi0.p)
        return np.array(out)
    raise ConfigError(f"family {cfg.family!r} has no closed-form solution")


def run_compare(cfg: RunConfig, tol=None) -> dict:
    if cfg.family == "sampled":
        raise ConfigError("family 'sampled' has no closed-form solution")
    if cfg.family != "constant" and cfg.t0 != 0.0:
        raise ConfigError("closed-form comparison starts at t0 = 0")
    tol = tol if tol is not None else cfg.tol("compare_tol", 1e-6)
    start = time.perf_counter()
    x_closed = closed_form_positions(cfg)
    traj = flow_state(integrate_group(cfg.curve(), cfg.grid, **_ode_tols(cfg)), _xi0(cfg))
    runtime = time.perf_counter() - start
    scale = float(np.max(np.abs(traj.x)))
    err = float(np.max(np.abs(x_closed - traj.x)) / max(scale, 1e-300))
    return {"family": cfg.family, "max_rel_err": err, "tol": tol, "runtime": runtime,
            "span": [cfg.t0, cfg.t1], "n_points": cfg.n_points}


# --- invariants ---------------------------------------------------------------

def _default_invariants(cfg: RunConfig) -> tuple:
    if cfg.invariants:
        return cfg.invariants
    if cfg.family in ("quartic", "powerlaw2"):
        return ("I1", "I2")
    if cfg.family == "sampled":
        return ("lewis",)
    return ("I1",)


def run_invariants(cfg: RunConfig, tol=None) -> list:
    names = _default_invariants(cfg)
    unknown = set(names) - {"lewis", "I1", "I2"}
    if unknown:
        raise ConfigError(f"unknown invariants: {', '.join(sorted(unknown))}")
    if "lewis" in names and (cfg.rho0 is None or cfg.rhodot0 is None):
        raise ConfigError("the lewis invariant needs rho0 and rhodot0 in [initial]")
    tol = tol if tol is not None else cfg.tol("drift_tol", 1e-6)
    b = cfg.curve()
    grid = cfg.grid
    p = cfg.parameters
    span = [cfg.t0, cfg.t1]
    rows = []

    def row(name, drift, **extra):
        r = {"invariant": name, "family": cfg.family, "parameters": dict(p),
             "span": span, "drift": drift, "conserved": drift < tol}
        r.update(extra)
        rows.append(r)

    if "lewis" in names:
        vals = b(grid)
        if not (np.allclose(vals[:, 0], 1.0, atol=1e-12) and np.allclose(vals[:, 1], 0.0, atol=1e-12)):
            raise ConfigError("the lewis invariant needs a unit-mass oscillator (b0 = 1, b1 = 0)")
        F = lambda t: float(b(t)[2])
        mp, traj = lewis_cointegrate(F, MilnePinneyState(cfg.rho0, cfg.rhodot0), _xi0(cfg), grid)
        I = lewis_series(mp, traj)
        row("lewis", float(np.max(np.abs(I - I[0])) / max(abs(I[0]), 1e-30)))

    wanted = [n for n in names if n != "lewis"]
    if not wanted:
        return rows
    traj = integrate_trajectory(b, grid, _xi0(cfg), **_ode_tols(cfg))

    if cfg.family == "quartic":
        u0, u1, w = p["u0"], p["u1"], p["omega"]
        s = p.get("k", 1.0) ** -0.25
        u0, u1 = u0 * s, u1 * s
        if "I1" in wanted:
            row("I1", conservation_drift(lambda t, xi: quartic_I1(xi, t, u0, u1, w), traj))
        if "I2" in wanted:
            row("I2", conservation_drift(lambda t, xi: quartic_phase(xi, t, u0, u1, w), traj,
                                         unwrap=True, floor=1.0), angle=True)
    elif cfg.family == "powerlaw2":
        w = p["omega"]
        u0, u1 = p["L"], -p["c1"] * w
        reduce_ = lambda t, xi: powerlaw2_reduce(xi, t, u0, u1, w)
        if "I1" in wanted:
            row("I1", conservation_drift(lambda t, xi: powerlaw2_I1(reduce_(t, xi), u1, w), traj))
        if "I2" in wanted:
            angle = u1 * u1 < 4 * w * w
            row("I2", conservation_drift(lambda t, xi: powerlaw2_I2(reduce_(t, xi), t, u0, u1, w),
                                         traj, unwrap=angle, floor=1.0 if angle else 1e-30),
                angle=angle)
    else:
        if "I2" in wanted:
            raise ConfigError(f"no I2 available for family {cfg.family!r}")
        report = detect_kcond(b, grid, cfg.tolerances.get("detect_tol"))
        if not report.integrable:
            raise ConfigError("I1 needs a system passing the kcond detector")
        c0, c1, c2 = report.reduced_coefficients()
        A0 = report.reducing_transform

        def I1(t, xi):
            xp = A0(t) @ xi.to_array()
            return kcond_first_integral(c0, c1, c2, PhaseState(float(xp[0]), float(xp[1])))

        row("I1", conservation_drift(I1, traj))
    return rows


# --- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the INI run configuration")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol", type=float, help="acceptance tolerance override")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(
        prog="lieosc", description="Lie-system tools for time-dependent harmonic oscillators.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "integrate the group equation and write the trajectory"),
                       ("detect", "detect an integrable family and report it"),
                       ("compare", "compare the closed-form solution against integration"),
                       ("invariants", "measure the drift of conserved quantities")):
        sub.add_parser(name, parents=[common], help=text, description=text,
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def _write(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _configure_logging() -> None:
    level = os.environ.get("LIEOSC_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.format == "csv" and args.command != "solve":
            raise ConfigError(f"{args.command} writes JSON only")
        cfg = load_config(args.config)
        log.info("loaded %s: family=%s", args.config, cfg.family)
        if args.command == "solve":
            text = render_solve(run_solve(cfg), args.format or "csv")
            code = EXIT_OK
        elif args.command == "detect":
            report = run_detect(cfg, args.tol)
            text = _dump_json(report)
            code = EXIT_OK if report["family"] != "none" else EXIT_NEGATIVE
        elif args.command == "compare":
            result = run_compare(cfg, args.tol)
            text = _dump_json(result)
            code = EXIT_OK if result["max_rel_err"] < result["tol"] else EXIT_NEGATIVE
        else:
            rows = run_invariants(cfg, args.tol)
            text = _dump_json(rows)
            code = EXIT_OK if all(r["conserved"] for r in rows) else EXIT_NEGATIVE
    except ConfigError as exc:
        print(f"lieosc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, IntegrationError) as exc:
        print(f"lieosc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ArithmeticError) as exc:
        print(f"lieosc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _write(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
