"""Closed-form vortex-center trajectories built on the Hill-equation solution.

Two families:

* exact: geopotential, velocity and position at the vortex center expressed
  through the normalized Floquet solution ``(g, theta)`` of the Hill equation,
  with constants ``c, mu, t0, V0, X0``;
* first approximation (small potential perturbation): an elementary formula
  linear in five complex constants ``A0..A4``.

Complex positions use ``X1 = Re X``, ``X2 = Im X``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import NumericalError, ParameterError, ResonanceError
from .hill import FloquetSolution, HillPotential, floquet_solution

QUAD_EPSABS = 1e-10


def branch_arctan(a, mu: float):
    """Branch-continuous ``arctan(mu tan a)``.

    The branch is chosen so the result lies in the same interval
    ``[pi n, pi (n + 1)]`` as ``a``; the result is smooth and increasing in
    ``a`` with derivative ``mu / (cos^2 a + mu^2 sin^2 a)``.
    """
    a = np.asarray(a, dtype=float)
    s, c = np.sin(a), np.cos(a)
    out = a + np.arctan((mu - 1.0) * s * c / (c * c + mu * s * s))
    return float(out) if out.ndim == 0 else out


def target_phase(t, mu: float, t0: float, omega: float):
    """``Arctg(mu tg(omega (t - t0)/2)) + Arctg(mu tg(omega t0/2))``."""
    t = np.asarray(t, dtype=float)
    return branch_arctan(0.5 * omega * (t - t0), mu) + branch_arctan(0.5 * omega * t0, mu)


def _envelope(t, mu: float, t0: float, omega: float):
    # 1 - (1 - mu^2) sin^2(omega (t - t0) / 2); bounded below by mu^2
    return 1.0 - (1.0 - mu * mu) * np.sin(0.5 * omega * (np.asarray(t, float) - t0)) ** 2


def _check_common(mu: float, omega: float) -> None:
    if not 0.0 < mu <= 1.0:
        raise ParameterError("mu must lie in (0, 1]")
    if not (math.isfinite(omega) and omega > 0):
        raise ParameterError("omega must be positive (the omega = 0 regime has no closed form)")


@dataclass(frozen=True)
class TrajectoryParams:
    pot: HillPotential
    c: float
    mu: float
    t0: float
    V0: complex
    X0: complex
    omega: float

    def __post_init__(self) -> None:
        if self.c == 0 or not math.isfinite(self.c):
            raise ParameterError("c must be finite and nonzero")
        _check_common(self.mu, self.omega)
        object.__setattr__(self, "V0", complex(self.V0))
        object.__setattr__(self, "X0", complex(self.X0))


def _floquet_for(par: TrajectoryParams, fl: FloquetSolution | None) -> FloquetSolution:
    if fl is None:
        return floquet_solution(par.pot)
    if fl.pot != par.pot:
        raise ParameterError("Floquet solution was built for a different potential")
    return fl


def phase_of_time(t, par: TrajectoryParams, fl: FloquetSolution | None = None):
    """Hill phase ``Phi(t)`` obtained by inverting ``theta(Phi) = target_phase(t)``."""
    fl = _floquet_for(par, fl)
    return fl.invert_theta(target_phase(t, par.mu, par.t0, par.omega))


def rho0_of_time(t, par: TrajectoryParams, fl: FloquetSolution | None = None):
    """Geopotential at the vortex center."""
    fl = _floquet_for(par, fl)
    Phi = phase_of_time(t, par, fl)
    g2 = fl.g_at(Phi) ** 2
    out = par.omega * par.mu * g2 / (2.0 * abs(par.c) * _envelope(t, par.mu, par.t0, par.omega))
    return float(out) if np.ndim(out) == 0 else out


def _forcing(pot: HillPotential, Phi):
    e = np.exp(1j * Phi)
    return pot.beta0 * e - 2.0 * np.conj(pot.beta1) / e + 2.0 * pot.beta2


def phase_integrals(Phi, par: TrajectoryParams, fl: FloquetSolution):
    """``(I+, I-)`` at each upper limit in ``Phi`` (lower limit 0).

    ``I+- = exp(+-i omega t0/2) int_0^Phi g (mu cos(theta - Theta0)
    +- i sin(theta - Theta0)) exp(-i Phi/2) B(Phi) dPhi`` with
    ``B = beta0 e^{i Phi} - 2 conj(beta1) e^{-i Phi} + 2 beta2`` and
    ``Theta0 = Arctg(mu tg(omega t0 / 2))``. Integrals are accumulated
    piecewise between sorted limits, so nearby limits share their prefix.
    """
    Phi = np.atleast_1d(np.asarray(Phi, float))
    pot, mu = par.pot, par.mu
    if pot.beta_norm == 0.0:
        zero = np.zeros(Phi.shape, complex)
        return zero, zero.copy()
    Theta0 = branch_arctan(0.5 * par.omega * par.t0, mu)

    def f(x):
        u = fl.theta_at(x) - Theta0
        common = fl.g_at(x) * np.exp(-0.5j * x) * _forcing(pot, x)
        return np.array([common * (mu * np.cos(u) + 1j * np.sin(u)),
                         common * (mu * np.cos(u) - 1j * np.sin(u))])

    order = np.argsort(Phi)
    knots = np.concatenate(([0.0], Phi[order]))
    acc = np.zeros(2, complex)
    cum = np.empty((len(Phi), 2), complex)
    for k in range(len(Phi)):
        a, b = knots[k], knots[k + 1]
        if b != a:
            val, err = quad_vec(f, a, b, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=500)
            if not np.all(np.isfinite(val)):
                raise NumericalError("phase integral did not converge")
            acc = acc + val
        cum[k] = acc
    out = np.empty_like(cum)
    out[order] = cum
    rot = cmath.exp(0.5j * par.omega * par.t0)
    return rot * out[:, 0], out[:, 1] / rot


@dataclass(frozen=True)
class TrajectorySample:
    t: np.ndarray
    X: np.ndarray  # complex
    V: np.ndarray  # complex
    rho0: np.ndarray
    Phi: np.ndarray


def evaluate_trajectory(t, par: TrajectoryParams, fl: FloquetSolution | None = None) -> TrajectorySample:
    """Position, velocity, geopotential and Hill phase at the given times."""
    fl = _floquet_for(par, fl)
    t = np.atleast_1d(np.asarray(t, float))
    Phi = np.atleast_1d(phase_of_time(t, par, fl))
    Ip, Im = phase_integrals(Phi, par, fl)
    w, ac = par.omega, abs(par.c)
    rot = np.exp(-1j * w * t)
    V = rot * (0.25j * math.sqrt(w / (par.mu * ac)) * Ip + par.V0)
    X = par.X0 - 0.25 * math.sqrt(1.0 / (par.mu * ac * w)) * (rot * Ip - Im) + (1j / w) * (rot - 1.0) * par.V0
    g2 = fl.g_at(Phi) ** 2
    rho0 = w * par.mu * g2 / (2.0 * ac * _envelope(t, par.mu, par.t0, w))
    return TrajectorySample(t, X, V, rho0, Phi)


def velocity_of_time(t, par: TrajectoryParams, fl: FloquetSolution | None = None):
    """``(V1, V2)`` at the vortex center."""
    V = evaluate_trajectory(t, par, fl).V
    if np.ndim(t) == 0:
        return float(V[0].real), float(V[0].imag)
    return V.real, V.imag


def position_of_time(t, par: TrajectoryParams, fl: FloquetSolution | None = None):
    """``(X1, X2)`` of the vortex center."""
    X = evaluate_trajectory(t, par, fl).X
    if np.ndim(t) == 0:
        return float(X[0].real), float(X[0].imag)
    return X.real, X.imag


def rot_u_on_trajectory(rho0_value, c: float, omega: float):
    """Background vorticity at the center, ``-c rho0 - omega``."""
    if c == 0:
        raise ParameterError("c must be nonzero")
    return -c * rho0_value - omega


# --------------------------------------------------------------------------
# first approximation

RESONANCES = (0.5, 1.5)


@dataclass(frozen=True)
class ApproxTrajectoryParams:
    A0: complex
    A1: complex
    A2: complex
    A3: complex
    A4: complex
    omega0: float
    mu: float
    t0: float
    omega: float

    def __post_init__(self) -> None:
        _check_common(self.mu, self.omega)
        if not self.omega0 > 0:
            raise ParameterError("omega0 must be positive")
        for name in ("A0", "A1", "A2", "A3", "A4"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.A0, self.A1, self.A2, self.A3, self.A4])


def check_resonance(omega0: float, tol: float = 1e-12) -> None:
    for res in RESONANCES:
        if abs(omega0 - res) <= tol:
            raise ResonanceError(f"omega0 = {omega0} sits on a resonance of the first approximation")


def approx_phase(t, omega0: float, mu: float, t0: float, omega: float):
    """Elementary Hill phase ``target_phase / omega0``."""
    return target_phase(t, mu, t0, omega) / omega0


def approx_basis(t, omega0: float, mu: float, t0: float, omega: float) -> np.ndarray:
    """Complex design matrix whose columns multiply ``A0..A4``."""
    check_resonance(omega0)
    t = np.atleast_1d(np.asarray(t, float))
    Phi = approx_phase(t, omega0, mu, t0, omega)
    carrier = np.exp(0.5j * (Phi - omega * t)) * np.sqrt(_envelope(t, mu, t0, omega))
    return np.column_stack([
        carrier,
        np.ones_like(carrier),
        np.exp(-1j * omega * t),
        carrier * np.exp(-2j * Phi),
        carrier * np.exp(-1j * Phi),
    ])


def position_first_approx(t, apar: ApproxTrajectoryParams):
    """``(X1, X2)`` from the first-approximation formula."""
    X = approx_basis(t, apar.omega0, apar.mu, apar.t0, apar.omega) @ apar.coefficients
    if np.ndim(t) == 0:
        return float(X[0].real), float(X[0].imag)
    return X.real, X.imag


@dataclass(frozen=True)
class CircleApprox:
    center: tuple[float, float]
    radius: float
    sense: str  # "counterclockwise", "clockwise" or "indeterminate"
    mean_angular_velocity: float


def circle_approx(apar: ApproxTrajectoryParams) -> CircleApprox:
    """Circle ``A1 + A0 exp(i (Phi - omega t)/2)`` and its rotation sense.

    ``sense`` follows the rule counterclockwise if ``mu > 2 omega0``,
    clockwise if ``mu < 2 omega0``. ``mean_angular_velocity`` is the exact
    period average ``omega (1/(2 omega0) - 1) / 2`` of the angle rate of
    ``X - A1``; its sign can disagree with the rule when ``mu < 2 omega0``.
    """
    if apar.mu > 2 * apar.omega0:
        sense = "counterclockwise"
    elif apar.mu < 2 * apar.omega0:
        sense = "clockwise"
    else:
        sense = "indeterminate"
    mean_rate = 0.5 * apar.omega * (1.0 / (2.0 * apar.omega0) - 1.0)
    return CircleApprox((apar.A1.real, apar.A1.imag), abs(apar.A0), sense, mean_rate)
