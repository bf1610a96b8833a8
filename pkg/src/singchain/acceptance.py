"""Acceptance suite: ten property checks with fixed tolerances and runtime budgets.

Each check returns a :class:`CriterionResult`; ``passed`` requires both the
measured value within tolerance and the runtime within budget.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass

import numpy as np

from . import hill, hopf, trajectory as tr, vortex
from .errors import PhysicalityError, SingChainError, StiffnessError
from .fitting import ObservedTrack, fit_track, predict


@dataclass
class CriterionResult:
    key: int
    name: str
    passed: bool
    value: float
    tol: float
    runtime: float
    budget: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.key:2d} {self.name}: value={self.value:.3e} tol={self.tol:.1e} "
                f"runtime={self.runtime:.2f}s/{self.budget:g}s {self.detail}").rstrip()

    def to_json(self) -> dict:
        return asdict(self)


def _finish(key, name, value, tol, t_start, budget, ok=None, detail="") -> CriterionResult:
    runtime = time.perf_counter() - t_start
    within = bool(value <= tol) if ok is None else bool(ok)
    return CriterionResult(key, name, within and runtime <= budget, float(value), tol, runtime, budget, detail)


# --------------------------------------------------------------------------
# Hill


def hill_constant_potential() -> CriterionResult:
    t_start = time.perf_counter()
    worst = 0.0
    for om in (0.25, 0.7, 1.3):
        pot = hill.HillPotential(om)
        fl = hill.floquet_solution(pot)
        worst = max(
            worst,
            abs(fl.quasi_momentum - om),
            float(np.max(np.abs(fl.g - 1.0 / math.sqrt(om)))),
            abs(np.trace(fl.monodromy) - 2 * math.cos(2 * math.pi * om)) / 100.0,  # trace tol is 1e-8
        )
    return _finish(1, "hill constant-potential exactness", worst, 1e-10, t_start, 1.0)


def random_stable_potentials(n: int, seed: int, beta_max: float = 0.3) -> list[hill.HillPotential]:
    """``n`` random potentials with ``|beta| <= beta_max`` whose monodromy is strongly stable."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        om = rng.uniform(0.1, 1.4)
        b = rng.normal(size=6)
        b *= rng.uniform(0.0, beta_max) / np.linalg.norm(b)
        pot = hill.HillPotential.from_reals(om, b)
        st, _ = hill.classify_stability(hill.monodromy(pot, 1e-10), 1e-3)
        if st is hill.Stability.STRONGLY_STABLE:
            out.append(pot)
    return out


def hill_wronskian() -> CriterionResult:
    t_start = time.perf_counter()
    worst = 0.0
    for pot in random_stable_potentials(20, seed=20):
        fl = hill.floquet_solution(pot, n_grid=4096)
        worst = max(worst, float(np.max(np.abs(fl.wronskian() - 2j))))
    return _finish(2, "floquet wronskian normalization", worst, 1e-8, t_start, 10.0)


def hill_boundary() -> CriterionResult:
    t_start = time.perf_counter()
    M = hill.monodromy(hill.HillPotential(0.5))
    st, _ = hill.classify_stability(M)
    dev = abs(abs(np.trace(M)) - 2.0)
    return _finish(10, "stability boundary detection", dev, 1e-8, t_start, 1.0,
                   ok=st is hill.Stability.BOUNDARY and dev <= 1e-8, detail=f"class={st.value}")


# --------------------------------------------------------------------------
# vortex chain


def random_chain_runs(n: int = 10, seed: int = 3, t_end: float = 2.0, tol: float = 1e-11):
    """``n`` chain integrations with random moderate data, cycling omega over {0, 0.5, 2}."""
    rng = np.random.default_rng(seed)
    runs = []
    k = 0
    while len(runs) < n:
        omega = (0.0, 0.5, 2.0)[k % 3]
        k += 1
        y = rng.uniform(-0.3, 0.3, size=len(vortex.FIELDS))
        y[vortex.FIELDS.index("rho0")] = rng.uniform(0.5, 2.0)
        y[vortex.FIELDS.index("q")] = rng.uniform(0.0, 0.6)
        init = vortex.VortexChainState.from_array(y)
        try:
            runs.append(vortex.integrate_vortex_chain(init, vortex.PhysicalParams(omega), (0.0, t_end), tol,
                                                      atol=1e-13, n_samples=101))
        except (PhysicalityError, StiffnessError):  # finite-time blow-up: draw again
            continue
    return runs


def _dense_derivative(series: vortex.VortexSeries, t: np.ndarray, h: float) -> np.ndarray:
    # fourth-order central difference of the continuous extension, one-sided near the ends
    t = np.clip(t, series.t[0] + 2 * h, series.t[-1] - 2 * h)
    f = series.dense
    return ((f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)).T, t


def chain_riccati(runs=None) -> CriterionResult:
    t_start = time.perf_counter()
    runs = random_chain_runs() if runs is None else runs
    iq, ip, ir = (vortex.FIELDS.index(k) for k in ("q", "p", "r"))
    worst = 0.0
    for s in runs:
        dY, tt = _dense_derivative(s, s.t, 1e-3)
        Y = s.at(tt)
        z = Y[:, iq] + 1j * Y[:, ip]
        dz = dY[:, iq] + 1j * dY[:, ip]
        res = dz + z * z - 1j * s.omega * z + 2 * Y[:, ir]
        worst = max(worst, float(np.max(np.abs(res) / (1.0 + np.abs(z) ** 2))))
    return _finish(3, "chain riccati identity", worst, 1e-7, t_start, 5.0)


def chain_amplitude(runs=None) -> CriterionResult:
    t_start = time.perf_counter()
    runs = random_chain_runs() if runs is None else runs
    worst = 0.0
    for s in runs:
        A = vortex.amplitude_factor(s)
        ref = (s["rho0"] / s["rho0"][0]) ** 1.5
        worst = max(worst, float(np.max(np.abs(A - ref))))
    return _finish(4, "amplitude identity", worst, 1e-8, t_start, 1.0)


def chain_decay() -> CriterionResult:
    t_start = time.perf_counter()
    init = vortex.VortexChainState(q=1.0, rho0=1.0)
    t = np.geomspace(50.0, 500.0, 64)
    s = vortex.integrate_vortex_chain(init, vortex.PhysicalParams(0.0), (0.0, 500.0),
                                      t_eval=np.concatenate(([0.0], t)))
    slope = np.polyfit(np.log(s.t[1:]), np.log(s["rho0"][1:]), 1)[0]
    return _finish(5, "omega=0 decay law", abs(slope + 2.0), 0.05, t_start, 5.0, detail=f"slope={slope:.4f}")


# --------------------------------------------------------------------------
# trajectories


def random_trajectory_params(n: int, seed: int) -> list[tuple[tr.TrajectoryParams, hill.FloquetSolution]]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        om0 = rng.uniform(0.3, 0.7)
        if abs(om0 - 0.5) < 0.05:
            continue
        b = rng.normal(size=6)
        b *= rng.uniform(0.01, 0.1) / np.linalg.norm(b)
        pot = hill.HillPotential.from_reals(om0, b)
        try:
            fl = hill.floquet_solution(pot)
        except SingChainError:
            continue
        omega = rng.uniform(0.5, 2.0)
        par = tr.TrajectoryParams(
            pot,
            c=float(rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)),
            mu=rng.uniform(0.3, 1.0),
            t0=rng.uniform(0, 2 * math.pi / omega),
            V0=complex(*rng.normal(size=2) * 0.3),
            X0=complex(*rng.normal(size=2)),
            omega=omega,
        )
        out.append((par, fl))
    return out


def trajectory_kinematics() -> CriterionResult:
    t_start = time.perf_counter()
    worst, worst_rate, worst_chain = 0.0, math.inf, 0.0
    for par, fl in random_trajectory_params(5, seed=6):
        w = par.omega
        t = np.linspace(0.3, 3.0, 6) * (2 * math.pi / w)
        V = tr.evaluate_trajectory(t, par, fl).V
        scale = float(np.max(np.abs(V)))
        errs = []
        for h in (1e-4 / w, 2e-4 / w):
            Xp = tr.evaluate_trajectory(t + h, par, fl).X
            Xm = tr.evaluate_trajectory(t - h, par, fl).X
            errs.append(float(np.max(np.abs((Xp - Xm) / (2 * h) - V))) / scale)
        worst = max(worst, errs[0])
        worst_rate = min(worst_rate, errs[1] / max(errs[0], 1e-300))
        # chain-consistency residual of the p equation with q, p rebuilt from rho0
        h = 1e-4 / w
        rp = tr.rho0_of_time(t + h, par, fl)
        rm = tr.rho0_of_time(t - h, par, fl)
        r0 = tr.rho0_of_time(t, par, fl)
        drho = (rp - rm) / (2 * h)
        q_hat = -drho / (2 * r0)
        p_hat = lambda r: (par.c * r + w) / 2  # noqa: E731
        dp = (p_hat(rp) - p_hat(rm)) / (2 * h)
        res = dp + 2 * p_hat(r0) * q_hat - w * q_hat
        worst_chain = max(worst_chain, float(np.max(np.abs(res))) / max(float(np.max(np.abs(dp))), 1e-300))
    ok = worst < 1e-5 and worst_rate >= 3.0 and worst_chain < 1e-4
    return _finish(6, "closed-form kinematics", worst, 1e-5, t_start, 30.0, ok=ok,
                   detail=f"h2_ratio_min={worst_rate:.2f} chain_residual={worst_chain:.1e}")


def _mean_angular_velocity(apar: tr.ApproxTrajectoryParams, periods: int = 40) -> float:
    T = periods * 2 * math.pi / apar.omega
    t = np.linspace(0.0, T, 200 * periods + 1)
    x1, x2 = tr.position_first_approx(t, apar)
    ang = np.unwrap(np.angle((x1 - apar.A1.real) + 1j * (x2 - apar.A1.imag)))
    return float((ang[-1] - ang[0]) / T)


def rotation_sense() -> CriterionResult:
    t_start = time.perf_counter()
    rates = []
    for mu, om0 in ((0.9, 0.4), (0.6, 0.45)):
        apar = tr.ApproxTrajectoryParams(1.0 + 0.5j, 0.2 - 0.1j, 0, 0, 0, om0, mu, 0.7, 1.0)
        rates.append(_mean_angular_velocity(apar))
    ok = rates[0] > 0 and rates[1] < 0
    bad = sum((rates[0] <= 0, rates[1] >= 0))
    return _finish(9, "rotation-sense rule", bad, 0, t_start, 1.0, ok=ok,
                   detail=f"rates=({rates[0]:+.4f}, {rates[1]:+.4f})")


# --------------------------------------------------------------------------
# Hopf shocks

HOPF_CASES = (
    (0.0, 0.5, 1.0, 0.0),
    (0.2, -0.5, 1.0, 0.3),
    (-0.3, 0.3, 0.8, -0.2),
    (0.5, -0.25, 0.6, 0.1),
)


def front_relative_error(phi_model: np.ndarray, phi_ref: np.ndarray) -> float:
    """``max |model - ref| / max |ref - ref[0]|``: error relative to the front displacement."""
    return float(np.max(np.abs(phi_model - phi_ref)) / np.max(np.abs(phi_ref - phi_ref[0])))


def hopf_oracle(cells: int = 4000) -> CriterionResult:
    t_start = time.perf_counter()
    times = np.linspace(0.0, 1.0, 21)
    worst = 0.0
    for H0, H1, A0, A1 in HOPF_CASES:
        st = hopf.HopfChainState(0.0, (H0, H1), (A0, A1))
        chain = hopf.integrate_hopf_chain(st, (0.0, 1.0), t_eval=times)
        ref = hopf.godunov_reference(hopf.initial_profile(st), 1.0, cells, domain=(-3.0, 3.0), sample_times=times)
        worst = max(worst, front_relative_error(chain.phi, ref.position))
    return _finish(7, "hopf chain vs godunov oracle", worst, 0.05, t_start, 30.0)


# --------------------------------------------------------------------------
# fitting

FIT_TRUTH = dict(A0=1.0 + 0.5j, A1=0.3 - 0.2j, omega0=0.48, mu=0.9, t0=1.3, omega=1.0)


def synthetic_tracks(noise: float, seed: int = 8):
    """Fit window (200 samples, three Coriolis periods) and the following period as hold-out."""
    p = FIT_TRUTH
    apar = tr.ApproxTrajectoryParams(p["A0"], p["A1"], 0, 0, 0, p["omega0"], p["mu"], p["t0"], p["omega"])
    P = 2 * math.pi / p["omega"]
    t_fit = np.linspace(0.0, 3 * P, 200)
    t_hold = np.linspace(3 * P, 4 * P, 67)[1:]
    rng = np.random.default_rng(seed)
    sigma = noise * abs(p["A0"])

    def make(t):
        x1, x2 = tr.position_first_approx(t, apar)
        return ObservedTrack(t, x1 + sigma * rng.standard_normal(len(t)), x2 + sigma * rng.standard_normal(len(t)))

    return make(t_fit), make(t_hold), sigma


def fit_recovery(n_restarts: int = 32, seed: int = 0) -> CriterionResult:
    t_start = time.perf_counter()
    omega, A0 = FIT_TRUTH["omega"], abs(FIT_TRUTH["A0"])
    fit_tr, hold, _ = synthetic_tracks(0.0)
    res = fit_track(fit_tr, "approx", seed=seed, omega=omega, n_restarts=n_restarts)
    pred = predict(res, hold.t)
    clean = float(np.mean((pred.x1 - hold.x1) ** 2 + (pred.x2 - hold.x2) ** 2)) / A0**2

    fit_tr, hold, sigma = synthetic_tracks(0.01)
    res = fit_track(fit_tr, "approx", seed=seed, omega=omega, n_restarts=n_restarts)
    pred = predict(res, hold.t)
    floor = 2 * sigma**2
    noisy = float(np.mean((pred.x1 - hold.x1) ** 2 + (pred.x2 - hold.x2) ** 2)) / floor
    ok = clean < 1e-6 and noisy <= 4.0
    return _finish(8, "fit self-recovery", clean, 1e-6, t_start, 120.0, ok=ok,
                   detail=f"noisy_holdout/floor={noisy:.2f}")


# --------------------------------------------------------------------------

CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: hill_constant_potential,
    2: hill_wronskian,
    3: chain_riccati,
    4: chain_amplitude,
    5: chain_decay,
    6: trajectory_kinematics,
    7: hopf_oracle,
    8: fit_recovery,
    9: rotation_sense,
    10: hill_boundary,
}

SUITES: dict[str, tuple[int, ...]] = {
    "hill": (1, 2, 10),
    "chain": (3, 4, 5),
    "trajectory": (6, 9),
    "hopf": (7,),
    "fitting": (8,),
    "all": tuple(range(1, 11)),
}


def run_suite(name: str) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for k in SUITES[name]:
        try:
            out.append(CRITERIA[k]())
        except SingChainError as exc:
            out.append(CriterionResult(k, CRITERIA[k].__name__, False, math.nan, math.nan, 0.0, 0.0, f"error: {exc}"))
    return out
