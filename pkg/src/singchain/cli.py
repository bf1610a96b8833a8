"""``singchain`` command line.

Exit codes: 0 success, 1 acceptance criteria failed (``verify``), 2 bad
input or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from collections.abc import Sequence

import numpy as np

from . import acceptance, hill, hopf, io, trajectory as tr, vortex
from .errors import NumericalError, ParameterError, SingChainError
from .fitting import FitResult, ObservedTrack, fit_track, predict

log = logging.getLogger("singchain")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _emit_csv(path, header, columns) -> None:
    if path in (None, "-"):
        cols = [np.asarray(c, float) for c in columns]
        sys.stdout.write(",".join(header) + "\n")
        for row in zip(*cols):
            sys.stdout.write(",".join(io.fmt(v) for v in row) + "\n")
    else:
        io.write_csv(path, header, columns)


def _emit_json(path, data) -> None:
    if path in (None, "-"):
        sys.stdout.write(io.dumps(data))
    else:
        io.write_json(path, data)


# --------------------------------------------------------------------------
# subcommands


def cmd_hopf(a) -> int:
    if a.init:
        d = io.read_json(a.init)
        try:
            st = hopf.HopfChainState(d.get("phi", 0.0), tuple(d["H"]), tuple(d["A"]))
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"{a.init}: needs H and A lists ({exc})") from None
    else:
        st = hopf.HopfChainState(a.phi0, tuple(a.H), tuple(a.A))
    if a.order is not None:
        st = st.padded(a.order)
    times = np.linspace(0.0, a.t_end, a.n_samples)
    s = hopf.integrate_hopf_chain(st, (0.0, a.t_end), a.tol, t_eval=times)
    header = ["t", "phi"] + [f"{k}{i}" for i in range(s.n + 1) for k in ("H", "A")]
    cols = [s.t, s.phi] + [arr[:, i] for i in range(s.n + 1) for arr in (s.H, s.A)]
    _emit_csv(a.out, header, cols)
    if s.stop_reason != "completed":
        log.warning("chain stopped early: %s at t=%g", s.stop_reason, s.t[-1])
    if a.oracle:
        ref = hopf.godunov_reference(hopf.initial_profile(st), a.t_end, a.cells,
                                     domain=tuple(a.domain), sample_times=times)
        io.write_csv(a.oracle, ["t", "shock_pos"], [ref.t, ref.position])
    return EXIT_OK


def cmd_chain(a) -> int:
    d = io.read_json(a.init)
    unknown = set(d) - set(vortex.FIELDS) - {"omega", "b1", "b2", "Theta0"}
    if unknown:
        raise ParameterError(f"{a.init}: unknown fields {sorted(unknown)}")
    st = vortex.VortexChainState.from_mapping(d)
    params = vortex.PhysicalParams(float(d.get("omega", 0.0)))
    if "b1" in d or "b2" in d:
        vortex.VortexShape(float(d.get("b1", 0)), float(d.get("b2", 0)), float(d.get("Theta0", 0.0)))
    Theta0 = float(d.get("Theta0", 0.0))
    s = vortex.integrate_vortex_chain(st, params, (0.0, a.t_end), a.tol, n_samples=a.n_samples,
                                      r_coupling=a.r_coupling)
    cols = [s.t] + [s[k] for k in vortex.FIELDS]
    cols += [vortex.rotation_angle(s, Theta0), vortex.amplitude_factor(s)]
    _emit_csv(a.out, ["t", *vortex.FIELDS, "Theta", "A"], cols)
    return EXIT_OK


def cmd_hill(a) -> int:
    pot = hill.HillPotential.from_reals(a.omega0, a.beta)
    M = hill.monodromy(pot, a.tol)
    stab, _ = hill.classify_stability(M)
    summary = {"trace": float(np.trace(M)), "det": float(np.linalg.det(M)), "stability": stab.value,
               "quasi_momentum": None}
    fl = None
    if stab is not hill.Stability.UNSTABLE:
        try:
            fl = hill.floquet_solution(pot, a.tol, n_grid=a.n_grid)
            summary["quasi_momentum"] = fl.quasi_momentum
        except SingChainError as exc:
            log.warning("no normalized Floquet solution: %s", exc)
    if a.summary:
        io.write_json(a.summary, summary)
    elif a.out in (None, "-"):
        sys.stderr.write(io.dumps(summary))  # stdout carries the table
    else:
        sys.stdout.write(io.dumps(summary))
    if a.out:
        if fl is None:
            raise NumericalError("Floquet solution unavailable; no Phi,q,g,theta table")
        _emit_csv(a.out, ["Phi", "q", "g", "theta"], [fl.Phi, hill.potential_value(pot, fl.Phi), fl.g, fl.theta])
    return EXIT_OK


def _times(a) -> np.ndarray:
    if a.n_samples < 1 or a.t_end < a.t_start:
        raise ParameterError("need t_end >= t_start and n_samples >= 1")
    return np.linspace(a.t_start, a.t_end, a.n_samples)


def trajectory_params_from_json(d: dict):
    """Either exact-family or approx-family parameters, chosen by ``family``."""
    family = d.get("family", "exact")
    try:
        omega = float(d["omega"])
        mu, t0 = float(d["mu"]), float(d.get("t0", 0.0))
        if family == "approx":
            A = [io.to_complex(d.get(f"A{i}", 0.0), f"A{i}") for i in range(5)]
            return tr.ApproxTrajectoryParams(*A, float(d["omega0"]), mu, t0, omega)
        if family != "exact":
            raise ParameterError(f"unknown family {family!r}")
        pot = hill.HillPotential.from_reals(float(d["omega0"]), d.get("beta", [0.0] * 6))
        return tr.TrajectoryParams(pot, float(d["c"]), mu, t0, io.to_complex(d.get("V0", 0.0), "V0"),
                                   io.to_complex(d.get("X0", 0.0), "X0"), omega)
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParameterError(str(exc)) from None


def cmd_trajectory(a) -> int:
    par = trajectory_params_from_json(io.read_json(a.params))
    t = _times(a)
    if isinstance(par, tr.ApproxTrajectoryParams):
        x1, x2 = tr.position_first_approx(t, par)
        _emit_csv(a.out, ["t", "X1", "X2"], [t, x1, x2])
        return EXIT_OK
    fl = hill.floquet_solution(par.pot, a.tol)
    s = tr.evaluate_trajectory(t, par, fl)
    _emit_csv(a.out, ["t", "X1", "X2", "V1", "V2", "rho0"], [t, s.X.real, s.X.imag, s.V.real, s.V.imag, s.rho0])
    return EXIT_OK


def cmd_fit(a) -> int:
    cols = io.read_csv(a.track, ["t", "x1"])
    track = ObservedTrack(cols["t"], cols["x1"], cols.get("x2"))
    bounds = None
    if a.bounds:
        bounds = {k: [tuple(iv) for iv in (v if isinstance(v[0], list) else [v])]
                  for k, v in io.read_json(a.bounds).items()}
    res = fit_track(track, a.family, bounds, a.budget, a.seed, omega=a.omega, n_restarts=a.restarts)
    log.info("fit %s: mse=%.6g converged=%s", res.family, res.mse, res.converged)
    _emit_json(a.out, res.to_json())
    return EXIT_OK


def cmd_predict(a) -> int:
    res = FitResult.from_json(io.read_json(a.fit))
    if not res.converged:
        log.warning("fit did not report convergence")
    t_start = res.t_end if a.t_start is None else a.t_start
    if a.t_end is None:
        raise ParameterError("--t-end is required")
    t = np.linspace(t_start, a.t_end, a.n_samples)
    pred = predict(res, t, in_sample=a.in_sample)
    _emit_csv(a.out, ["t", "x1", "x2"], [pred.t, pred.x1, pred.x2])
    return EXIT_OK


def cmd_verify(a) -> int:
    if a.suite not in acceptance.SUITES:
        raise ParameterError(f"unknown suite {a.suite!r}; choose from {sorted(acceptance.SUITES)}")
    results = acceptance.run_suite(a.suite)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    report = {"suite": a.suite, "passed": all(r.passed for r in results), "criteria": [r.to_json() for r in results]}
    if a.out:
        io.write_json(a.out, report)
    else:
        sys.stdout.write(io.dumps(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--tol", type=float, default=None, help="integrator relative tolerance")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="singchain", description="Singularity chains, Hill analysis and track fitting.")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hopf", parents=[common], help="cut shock-front chain for the Hopf equation")
    h.add_argument("--init", help="JSON with phi, H, A")
    h.add_argument("--H", type=_floats, default=[0.0, 0.5])
    h.add_argument("--A", type=_floats, default=[1.0, 0.0])
    h.add_argument("--phi0", type=float, default=0.0)
    h.add_argument("--order", type=int, default=None, help="closure order n (pads with zeros)")
    h.add_argument("--t-end", type=float, default=1.0)
    h.add_argument("--n-samples", type=int, default=101)
    h.add_argument("--oracle", help="also write the Godunov front (t,shock_pos) here")
    h.add_argument("--cells", type=int, default=4000)
    h.add_argument("--domain", type=_floats, default=[-3.0, 3.0])
    h.set_defaults(func=cmd_hopf, tol_default=1e-9)

    c = sub.add_parser("chain", parents=[common], help="vortex chain integration")
    c.add_argument("--init", required=True, help="JSON initial state")
    c.add_argument("--t-end", type=float, default=10.0)
    c.add_argument("--n-samples", type=int, default=201)
    c.add_argument("--r-coupling", choices=["pr", "qr"], default="pr")
    c.set_defaults(func=cmd_chain, tol_default=1e-9)

    q = sub.add_parser("hill", parents=[common], help="Hill equation monodromy and Floquet solution")
    q.add_argument("--omega0", type=float, required=True)
    q.add_argument("--beta", type=lambda s: _floats(s, 6), default=[0.0] * 6,
                   help="re b0, im b0, re b1, im b1, re b2, im b2")
    q.add_argument("--n-grid", type=int, default=4096)
    q.add_argument("--summary", help="write the JSON summary here (default: stdout)")
    q.set_defaults(func=cmd_hill, tol_default=1e-12)

    t = sub.add_parser("trajectory", parents=[common], help="closed-form vortex-center trajectory")
    t.add_argument("--params", required=True, help="JSON parameters")
    t.add_argument("--t-start", type=float, default=0.0)
    t.add_argument("--t-end", type=float, default=20.0)
    t.add_argument("--n-samples", type=int, default=201)
    t.set_defaults(func=cmd_trajectory, tol_default=1e-12)

    f = sub.add_parser("fit", parents=[common], help="fit a trajectory family to a t,x1,x2 track")
    f.add_argument("--track", required=True)
    f.add_argument("--family", default="approx")
    f.add_argument("--omega", type=float, default=None, help="Coriolis parameter (not fitted)")
    f.add_argument("--budget", type=int, default=600, help="evaluations per simplex run")
    f.add_argument("--restarts", type=int, default=32)
    f.add_argument("--bounds", help="JSON {name: [lo, hi] | [[lo, hi], ...]}")
    f.set_defaults(func=cmd_fit, tol_default=None)

    r = sub.add_parser("predict", parents=[common], help="extrapolate a fitted track")
    r.add_argument("--fit", required=True, help="FitResult JSON")
    r.add_argument("--t-start", type=float, default=None, help="default: end of the fit window")
    r.add_argument("--t-end", type=float, default=None)
    r.add_argument("--n-samples", type=int, default=101)
    r.add_argument("--in-sample", action="store_true", help="allow times inside the fit window")
    r.set_defaults(func=cmd_predict, tol_default=None)

    v = sub.add_parser("verify", parents=[common], help="run acceptance checks")
    v.add_argument("suite", help=f"one of {sorted(acceptance.SUITES)}")
    v.set_defaults(func=cmd_verify, tol_default=None)
    return p


def _configure_logging() -> None:
    level = os.environ.get("SINGCHAIN_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def run(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    if a.tol is None:
        a.tol = a.tol_default
    elif not (math.isfinite(a.tol) and a.tol > 0):
        sys.stderr.write("error: --tol must be positive\n")
        return EXIT_CONFIG
    try:
        return a.func(a)
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (ParameterError, OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())
