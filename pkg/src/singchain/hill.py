"""Hill equation ``y'' + q(Phi) y = 0`` with a 2*pi-periodic trigonometric potential.

Provides the monodromy matrix, stability classification and the normalized
Floquet solution ``y = g exp(i theta)`` with Wronskian
``conj(y) y' - y conj(y)' = 2i``, so that ``dtheta/dPhi = 1/g**2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

from . import _ode
from .errors import DegeneracyError, InvalidMonodromyError, ParameterError, StabilityError

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-12
DEFAULT_GRID = 4096


class Stability(str, Enum):
    STRONGLY_STABLE = "strongly-stable"
    BOUNDARY = "boundary"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class HillPotential:
    omega0: float
    beta0: complex = 0j
    beta1: complex = 0j
    beta2: complex = 0j

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega0) and self.omega0 >= 0):
            raise ParameterError("omega0 must be finite and >= 0")
        for name in ("beta0", "beta1", "beta2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def beta_norm(self) -> float:
        return math.sqrt(abs(self.beta0) ** 2 + abs(self.beta1) ** 2 + abs(self.beta2) ** 2)

    @classmethod
    def from_reals(cls, omega0: float, betas) -> HillPotential:
        """Build from six reals ``(re b0, im b0, re b1, im b1, re b2, im b2)``."""
        b = [float(v) for v in betas]
        if len(b) != 6:
            raise ParameterError("need six real numbers for the three complex betas")
        return cls(omega0, complex(b[0], b[1]), complex(b[2], b[3]), complex(b[4], b[5]))


def potential_value(pot: HillPotential, Phi):
    """Potential ``q(Phi)``, taking the real part of the trigonometric sum."""
    Phi = np.asarray(Phi, dtype=float)
    b0b1 = pot.beta0 * pot.beta1
    e1 = np.exp(1j * Phi)
    z = (
        0.5 * b0b1 * e1**2
        + np.conj(b0b1) * np.conj(e1) ** 2
        + pot.beta1 * pot.beta2 * e1
        - np.conj(pot.beta0 * pot.beta2) * np.conj(e1)
    )
    out = pot.omega0**2 + z.real
    return float(out) if out.ndim == 0 else out


def _basis_solutions(pot: HillPotential, tol: float, Phi_eval=None):
    # columns: y1, y1', y2, y2' with (y1, y1') = (1, 0), (y2, y2') = (0, 1) at Phi = 0
    def fun(Phi, u):
        qv = potential_value(pot, Phi)
        return np.array([u[1], -qv * u[0], u[3], -qv * u[2]])

    return _ode.integrate(fun, (0.0, TWO_PI), np.array([1.0, 0.0, 0.0, 1.0]),
                          t_eval=Phi_eval, rtol=tol, atol=tol)


def monodromy(pot: HillPotential, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Period map over ``[0, 2 pi]`` acting on ``(y, y')``."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    sol = _basis_solutions(pot, tol)
    end = sol.y[:, -1]
    return np.array([[end[0], end[2]], [end[1], end[3]]])


def classify_stability(M: np.ndarray, boundary_tol: float = 1e-9, *, det_tol: float = 1e-6):
    """Return ``(Stability, index)``; ``index = arccos(tr/2)/(2 pi)`` when stable, else nan."""
    M = np.asarray(M, float)
    det = float(np.linalg.det(M))
    if abs(det - 1.0) > det_tol:
        raise InvalidMonodromyError(f"monodromy determinant {det} is not 1")
    tr = float(np.trace(M))
    if abs(tr) < 2.0 - boundary_tol:
        return Stability.STRONGLY_STABLE, math.acos(tr / 2.0) / TWO_PI
    if abs(tr) > 2.0 + boundary_tol:
        return Stability.UNSTABLE, math.nan
    return Stability.BOUNDARY, math.nan


@dataclass(frozen=True)
class FloquetSolution:
    """Normalized Floquet solution tabulated on ``Phi`` in ``[0, 2 pi]``.

    ``theta`` is ``arg y`` unwrapped from ``theta(0) = 0``; outside one period
    it is continued as ``theta(Phi + 2 pi) = theta(Phi) + 2 pi Omega``.
    """

    pot: HillPotential
    stability: Stability
    quasi_momentum: float
    Phi: np.ndarray
    g: np.ndarray
    theta: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    monodromy: np.ndarray
    _g_spline: CubicSpline = field(repr=False, compare=False)
    _theta0_spline: CubicSpline = field(repr=False, compare=False)

    def wronskian(self) -> np.ndarray:
        return np.conj(self.y) * self.dy - self.y * np.conj(self.dy)

    def g_at(self, Phi):
        return self._g_spline(np.mod(Phi, TWO_PI))

    def theta_at(self, Phi):
        Phi = np.asarray(Phi, float)
        return self.quasi_momentum * Phi + self._theta0_spline(np.mod(Phi, TWO_PI))

    def dtheta_at(self, Phi):
        return 1.0 / self.g_at(Phi) ** 2

    def invert_theta(self, target, tol: float = 1e-12):
        """Solve ``theta(Phi) = target`` (vectorized bisection + Newton polish)."""
        tau = np.asarray(target, float)
        Om = self.quasi_momentum
        spread = float(np.max(np.abs(self._theta0_spline(self.Phi)))) + 1e-9
        lo = (tau - spread) / Om
        hi = (tau + spread) / Om
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self.theta_at(mid) > tau
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if np.max(hi - lo) < 1e-6:
                break
        x = 0.5 * (lo + hi)
        for _ in range(20):
            step = (self.theta_at(x) - tau) / self.dtheta_at(x)
            x = np.clip(x - step, lo, hi)
            if np.max(np.abs(step)) < tol:
                break
        return float(x) if x.ndim == 0 else x


def _eigen_data(M: np.ndarray, pot: HillPotential, coexist_tol: float):
    """Complex initial data ``(y(0), y'(0))`` of a Floquet solution with Im W > 0."""
    tr = np.trace(M)
    s = 1.0 if tr > 0 else -1.0
    if np.max(np.abs(M - s * np.eye(2))) < coexist_tol:
        # every solution is (anti)periodic; take the one exact for constant q
        qbar = math.sqrt(max(pot.omega0**2, 1e-300))
        return np.array([1.0, 1j * qbar])
    lam, vecs = np.linalg.eig(M.astype(complex))
    if np.max(np.abs(lam.imag)) <= 1e-14 * max(1.0, np.max(np.abs(lam))):
        raise DegeneracyError("real Floquet multipliers at the stability boundary")
    best = None
    for k in range(2):
        v = vecs[:, k]
        w = (np.conj(v[0]) * v[1]).imag
        if w > 0:
            best = v
    if best is None:
        raise DegeneracyError("no eigen-branch with positive Wronskian")
    return best


def floquet_solution(
    pot: HillPotential,
    tol: float = DEFAULT_TOL,
    *,
    n_grid: int = DEFAULT_GRID,
    boundary_tol: float = 1e-9,
    coexist_tol: float = 1e-8,
) -> FloquetSolution:
    """Normalized Floquet solution of the Hill equation for a stable potential."""
    if n_grid < 16:
        raise ParameterError("n_grid too small")
    Phi = np.linspace(0.0, TWO_PI, n_grid)
    sol = _basis_solutions(pot, tol, Phi)
    end = sol.y[:, -1]
    M = np.array([[end[0], end[2]], [end[1], end[3]]])
    stability, _ = classify_stability(M, boundary_tol)
    if stability is Stability.UNSTABLE:
        raise StabilityError(f"Hill equation unstable (trace {np.trace(M):.12g})")
    v = _eigen_data(M, pot, coexist_tol)
    v = v / math.sqrt((np.conj(v[0]) * v[1]).imag)
    v = v * cmath.exp(-1j * cmath.phase(v[0]))  # theta(0) = 0
    y = v[0] * sol.y[0] + v[1] * sol.y[2]
    dy = v[0] * sol.y[1] + v[1] * sol.y[3]
    g = np.abs(y)
    theta = np.unwrap(np.angle(y))
    theta -= theta[0]
    inv_g2 = 1.0 / g**2
    # periodic integrand: the trapezoid rule is spectrally accurate
    Om = float(np.sum(inv_g2[:-1]) * (Phi[1] - Phi[0]) / TWO_PI)
    g_per = g.copy()
    g_per[-1] = g_per[0]
    th0 = theta - Om * Phi
    th0[-1] = th0[0]
    return FloquetSolution(
        pot=pot,
        stability=stability,
        quasi_momentum=Om,
        Phi=Phi,
        g=g,
        theta=theta,
        y=y,
        dy=dy,
        monodromy=M,
        _g_spline=CubicSpline(Phi, g_per, bc_type="periodic"),
        _theta0_spline=CubicSpline(Phi, th0, bc_type="periodic"),
    )
