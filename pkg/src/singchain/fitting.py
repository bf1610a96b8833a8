"""Least-squares fitting of trajectory families to observed tracks, and extrapolation.

Every family is written as ``X(t) = offset(theta, t) + D(theta, t) @ coef``
where ``theta`` are nonlinear parameters and ``coef`` enter linearly. For a
given ``theta`` the optimal ``coef`` is a linear least-squares solve, so the
multi-start Nelder-Mead search only runs over ``theta`` (variable
projection). The objective is the mean squared planar distance.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import trajectory as tr
from .errors import FitFailureError, ParameterError, SingChainError
from .hill import HillPotential, Stability, floquet_solution

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObservedTrack:
    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, float)
        x1 = np.asarray(self.x1, float)
        x2 = np.zeros_like(t) if self.x2 is None else np.asarray(self.x2, float)
        if not (t.ndim == 1 and t.shape == x1.shape == x2.shape):
            raise ParameterError("t, x1, x2 must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ParameterError("track contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("track times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def z(self) -> np.ndarray:
        return self.x1 + 1j * self.x2

    def __len__(self) -> int:
        return len(self.t)

    def window(self, t_lo: float, t_hi: float) -> ObservedTrack:
        keep = (self.t >= t_lo) & (self.t <= t_hi)
        return ObservedTrack(self.t[keep], self.x1[keep], self.x2[keep])


def _as_complex(values) -> np.ndarray:
    if isinstance(values, tuple) and len(values) == 2:
        return np.asarray(values[0], float) + 1j * np.asarray(values[1], float)
    return np.asarray(values, complex)


def track_mse(track: ObservedTrack, model: Callable) -> float:
    """Mean over samples of the squared distance between track and ``model(t)``.

    ``model`` maps a time array to ``(X1, X2)`` arrays or to complex positions.
    """
    if len(track) < 2:
        raise ParameterError("need at least two samples")
    Z = _as_complex(model(track.t))
    return float(np.mean(np.abs(track.z - Z) ** 2))


# --------------------------------------------------------------------------
# families


class _Family:
    name: str
    nonlinear: tuple[str, ...]
    linear: tuple[str, ...]
    real_coefficients = False

    def default_bounds(self, track: ObservedTrack, omega: float | None) -> dict[str, list[tuple[float, float]]]:
        raise NotImplementedError

    def design(self, theta: dict, t: np.ndarray, omega: float | None):
        """Return ``(offset, D)`` with complex entries; may raise SingChainError."""
        raise NotImplementedError

    def solve(self, theta: dict, t: np.ndarray, z: np.ndarray, omega):
        off, D = self.design(theta, t, omega)
        if self.real_coefficients:
            coef, *_ = np.linalg.lstsq(D.real, (z - off).real, rcond=None)
        else:
            coef, *_ = np.linalg.lstsq(D, z - off, rcond=None)
        return coef, off + D @ coef

    def evaluate(self, params: dict, t: np.ndarray, omega) -> np.ndarray:
        theta = {k: params[k] for k in self.nonlinear}
        off, D = self.design(theta, t, omega)
        coef = np.array([params[k] for k in self.linear])
        return off + D @ coef

    def pack(self, theta: dict, coef: np.ndarray) -> dict:
        out = dict(theta)
        for k, c in zip(self.linear, coef):
            out[k] = float(c.real) if self.real_coefficients else complex(c)
        return out

    def check(self, params: dict) -> None:
        pass


class ApproxFamily(_Family):
    name = "approx"
    nonlinear = ("omega0", "mu", "t0")
    linear = ("A0", "A1", "A2", "A3", "A4")

    def default_bounds(self, track, omega):
        return {
            "omega0": [(0.3, 0.49), (0.51, 0.7)],
            "mu": [(1e-3, 1.0)],
            "t0": [(0.0, 2 * math.pi / omega)],
        }

    def design(self, theta, t, omega):
        D = tr.approx_basis(t, theta["omega0"], theta["mu"], theta["t0"], omega)
        return np.zeros(len(t), complex), D

    def check(self, params):
        tr.check_resonance(params["omega0"])


class ExactFamily(_Family):
    """Closed-form family; ``c > 0`` is fitted (only ``|c|`` affects positions)."""

    name = "exact"
    nonlinear = ("omega0", "b0_re", "b0_im", "b1_re", "b1_im", "b2_re", "b2_im", "mu", "t0", "c")
    linear = ("X0", "V0")
    n_grid = 512
    hill_tol = 1e-10

    def default_bounds(self, track, omega):
        b = [(-0.1, 0.1)]
        return {
            "omega0": [(0.3, 0.49), (0.51, 0.7)],
            "b0_re": b, "b0_im": b, "b1_re": b, "b1_im": b, "b2_re": b, "b2_im": b,
            "mu": [(1e-3, 1.0)],
            "t0": [(0.0, 2 * math.pi / omega)],
            "c": [(0.05, 20.0)],
        }

    @staticmethod
    def potential(theta) -> HillPotential:
        return HillPotential(
            theta["omega0"],
            complex(theta["b0_re"], theta["b0_im"]),
            complex(theta["b1_re"], theta["b1_im"]),
            complex(theta["b2_re"], theta["b2_im"]),
        )

    def design(self, theta, t, omega):
        pot = self.potential(theta)
        fl = floquet_solution(pot, self.hill_tol, n_grid=self.n_grid)
        par = tr.TrajectoryParams(pot, theta["c"], theta["mu"], theta["t0"], 0j, 0j, omega)
        base = tr.evaluate_trajectory(t, par, fl).X
        D = np.column_stack([np.ones(len(t), complex), (1j / omega) * (np.exp(-1j * omega * t) - 1.0)])
        return base, D

    def check(self, params):
        fl = floquet_solution(self.potential(params), self.hill_tol, n_grid=self.n_grid)
        if fl.stability is Stability.UNSTABLE:
            raise ParameterError("fitted potential is unstable")


class HopfPhiFamily(_Family):
    """Closed-form shock-front law; the track's ``x2`` is modeled as zero."""

    name = "hopf-phi"
    nonlinear = ("c1", "c2")
    linear = ("c3", "c4", "c5")
    real_coefficients = True

    def default_bounds(self, track, omega):
        lo = -float(track.t[0])
        span = float(track.t[-1] - track.t[0])
        return {"c1": [(lo, lo + 100 * span + 100)], "c2": [(lo + 1e-9, lo + 100 * span + 100)]}

    def design(self, theta, t, omega):
        c1, c2 = theta["c1"], theta["c2"]
        if c1 == c2:
            raise ParameterError("c1 == c2")
        if np.any(t + c1 < 0) or np.any(t + c2 <= 0):
            raise ParameterError("closed form outside its domain")
        root = np.sqrt((t + c1) / (t + c2))
        D = np.column_stack([root / (c2 - c1), t, np.ones_like(t)]).astype(complex)
        return np.zeros(len(t), complex), D


FAMILIES: dict[str, _Family] = {f.name: f for f in (ApproxFamily(), ExactFamily(), HopfPhiFamily())}


def get_family(name: str) -> _Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ParameterError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


# --------------------------------------------------------------------------
# results


@dataclass
class RestartRecord:
    index: int
    mse: float
    converged: bool
    nfev: int


@dataclass
class FitResult:
    family: str
    params: dict
    mse: float
    n_restarts_used: int
    converged: bool
    seed: int
    omega: float | None
    t_start: float
    t_end: float
    restarts: list[RestartRecord] = field(default_factory=list)

    def model(self) -> Callable[[np.ndarray], np.ndarray]:
        fam = get_family(self.family)
        return lambda t: fam.evaluate(self.params, np.atleast_1d(np.asarray(t, float)), self.omega)

    def to_json(self) -> dict:
        def enc(v):
            return [v.real, v.imag] if isinstance(v, complex) else v

        d = asdict(self)
        d["params"] = {k: enc(v) for k, v in self.params.items()}
        return d

    @classmethod
    def from_json(cls, data: dict) -> FitResult:
        fam = get_family(data["family"])
        params = {}
        for k, v in data["params"].items():
            params[k] = complex(*v) if (k in fam.linear and not fam.real_coefficients) else float(v)
        restarts = [RestartRecord(**r) for r in data.get("restarts", [])]
        return cls(
            family=fam.name,
            params=params,
            mse=float(data["mse"]),
            n_restarts_used=int(data["n_restarts_used"]),
            converged=bool(data["converged"]),
            seed=int(data["seed"]),
            omega=None if data.get("omega") is None else float(data["omega"]),
            t_start=float(data["t_start"]),
            t_end=float(data["t_end"]),
            restarts=restarts,
        )


def _normalize_bounds(fam: _Family, bounds, track, omega) -> dict[str, list[tuple[float, float]]]:
    merged = fam.default_bounds(track, omega)
    for k, v in (bounds or {}).items():
        if k not in merged:
            raise ParameterError(f"unknown parameter {k!r} for family {fam.name}")
        if isinstance(v, tuple) and len(v) == 2 and np.isscalar(v[0]):
            v = [v]
        merged[k] = [(float(a), float(b)) for a, b in v]
    for k, ivs in merged.items():
        if not ivs:
            raise ParameterError(f"empty bounds for {k}")
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)) or a > b:
                raise ParameterError(f"inconsistent bounds for {k}: ({a}, {b})")
    return merged


def fit_track(
    track: ObservedTrack,
    family: str = "approx",
    bounds: dict | None = None,
    budget: int = 600,
    seed: int = 0,
    *,
    omega: float | None = None,
    n_restarts: int = 32,
) -> FitResult:
    """Multi-start Nelder-Mead fit of a trajectory family to ``track``.

    ``budget`` caps objective evaluations per simplex run; every restart runs
    the simplex twice (the second from the first's optimum). Restart ``i``
    draws its start point from ``default_rng([seed, i])``, so results are
    deterministic and the best MSE is non-increasing in ``n_restarts``.
    Bounds map a parameter name to an interval or a list of intervals; each
    restart picks one interval per parameter.
    """
    if len(track) < 2:
        raise ParameterError("need at least two samples to fit")
    if budget <= 0 or n_restarts <= 0:
        raise ParameterError("budget and n_restarts must be positive")
    fam = get_family(family)
    if fam.name != "hopf-phi" and not (omega is not None and omega > 0):
        raise ParameterError("omega (Coriolis parameter) must be given and positive")
    box = _normalize_bounds(fam, bounds, track, omega)
    t, z = track.t, track.z

    def unpack(x):
        return dict(zip(fam.nonlinear, map(float, x)))

    def objective(x):
        try:
            _, model = fam.solve(unpack(x), t, z, omega)
        except (SingChainError, np.linalg.LinAlgError, FloatingPointError):
            return math.inf
        val = float(np.mean(np.abs(z - model) ** 2))
        return val if math.isfinite(val) else math.inf

    records: list[RestartRecord] = []
    best = None
    for i in range(n_restarts):
        rng = np.random.default_rng([seed, i])
        sub = []
        for name in fam.nonlinear:
            ivs = box[name]
            w = np.array([b - a for a, b in ivs]) + 1e-300
            sub.append(ivs[rng.choice(len(ivs), p=w / w.sum())])
        x0 = np.array([rng.uniform(a, b) for a, b in sub])
        nfev, ok, x, fx = 0, False, x0, objective(x0)
        for _ in range(2):
            res = minimize(objective, x, method="Nelder-Mead", bounds=sub,
                           options={"maxfev": budget, "xatol": 1e-11, "fatol": 1e-18, "adaptive": True})
            nfev += res.nfev
            if res.fun <= fx:
                x, fx, ok = res.x, float(res.fun), bool(res.success)
        records.append(RestartRecord(i, fx, ok and math.isfinite(fx), nfev))
        log.debug("restart %d: mse=%.6g nfev=%d", i, fx, nfev)
        if math.isfinite(fx) and (best is None or fx < best[0]):
            best = (fx, x, ok)
    if best is None:
        raise FitFailureError("objective failed to evaluate in every restart")
    fx, x, ok = best
    theta = unpack(x)
    coef, _ = fam.solve(theta, t, z, omega)
    params = fam.pack(theta, coef)
    return FitResult(
        family=fam.name,
        params=params,
        mse=fx,
        n_restarts_used=n_restarts,
        converged=ok,
        seed=seed,
        omega=omega,
        t_start=float(t[0]),
        t_end=float(t[-1]),
        restarts=records,
    )


def predict(result: FitResult, times: Sequence[float], *, in_sample: bool = False) -> ObservedTrack:
    """Evaluate the fitted family at ``times``.

    Extrapolation must start at or after the fit-window end unless
    ``in_sample`` is set.
    """
    times = np.atleast_1d(np.asarray(times, float))
    if len(times) == 0:
        raise ParameterError("no prediction times")
    if not in_sample and times[0] < result.t_end:
        raise ParameterError("prediction range starts before the end of the fit window")
    fam = get_family(result.family)
    fam.check(result.params)
    Z = fam.evaluate(result.params, times, result.omega)
    return ObservedTrack(times, Z.real, Z.imag)
