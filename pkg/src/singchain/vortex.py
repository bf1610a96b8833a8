"""Cut Hugoniot chain for a point-vortex singularity of rotating shallow water.

The smooth background near the vortex center ``X(t)`` is carried by its
Taylor coefficients: velocity ``V`` at the center, geopotential ``rho0`` and
its gradient ``(rho10, rho01)``, the Cauchy-Riemann velocity gradient
``[[q, p], [-p, q]]``, the isotropic geopotential curvature ``r`` and six
second-order velocity coefficients. Third-order geopotential coefficients are
zero and the third-order velocity combination entering the ``r`` equation is
zero (the chain closure).

Coriolis convention: ``du1/dt - omega u2 = ...``, ``du2/dt + omega u1 = ...``,
the one under which the q/p equations and the inertial oscillation
``V ~ exp(-i omega t)`` hold.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from typing import Literal

import numpy as np

from . import _ode
from .errors import DegeneracyError, ParameterError, PhysicalityError

log = logging.getLogger(__name__)

FIELDS = (
    "X1", "X2", "V1", "V2", "rho0", "rho10", "rho01", "q", "p", "r",
    "v20", "v11", "v02", "w20", "w11", "w02",
)
_IX = {name: i for i, name in enumerate(FIELDS)}

RCoupling = Literal["pr", "qr"]


@dataclass(frozen=True)
class VortexChainState:
    X1: float = 0.0
    X2: float = 0.0
    V1: float = 0.0
    V2: float = 0.0
    rho0: float = 1.0
    rho10: float = 0.0
    rho01: float = 0.0
    q: float = 0.0
    p: float = 0.0
    r: float = 0.0
    v20: float = 0.0
    v11: float = 0.0
    v02: float = 0.0
    w20: float = 0.0
    w11: float = 0.0
    w02: float = 0.0

    def validate(self) -> VortexChainState:
        values = self.to_array()
        if not np.all(np.isfinite(values)):
            raise ParameterError("state contains non-finite values")
        if self.rho0 <= 0:
            raise PhysicalityError(f"rho0 must be positive, got {self.rho0}")
        return self

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in FIELDS], dtype=float)

    @classmethod
    def from_array(cls, y) -> VortexChainState:
        return cls(*map(float, y))

    @classmethod
    def from_mapping(cls, data: dict) -> VortexChainState:
        known = {f.name for f in fields(cls)}
        return cls(**{k: float(v) for k, v in data.items() if k in known})


@dataclass(frozen=True)
class PhysicalParams:
    omega: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ParameterError("Coriolis parameter omega must be finite and >= 0")


@dataclass(frozen=True)
class VortexShape:
    b1: float
    b2: float
    Theta0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.b1 > 0 and self.b2 > 0):
            raise ParameterError("ellipse parameters b1, b2 must be positive")
        if self.b1 == self.b2:
            raise DegeneracyError("b1 == b2: vortex section must not be circular")


def _rhs(y: np.ndarray, omega: float, r_coupling: RCoupling = "pr") -> np.ndarray:
    (X1, X2, V1, V2, rho0, rho10, rho01, q, p, r,
     v20, v11, v02, w20, w11, w02) = y
    damp = p if r_coupling == "pr" else q
    return np.array([
        V1,
        V2,
        omega * V2 - rho10,
        -omega * V1 - rho01,
        -2 * q * rho0,
        -3 * q * rho10 + p * rho01 - rho0 * (w11 + 2 * v20),
        -3 * q * rho01 - p * rho10 - rho0 * (v11 + 2 * w02),
        p * p - q * q - omega * p - 2 * r,
        -2 * p * q + omega * q,
        -4 * damp * r
        - 0.5 * rho10 * (3 * v20 + w11 + v02)
        - 0.5 * rho01 * (v11 + 3 * w02 + w20),
        -3 * q * v20 + omega * w20 + p * (v11 - w20),
        -3 * q * v11 + omega * w11 + p * (2 * v02 - 2 * v20 - w11),
        -3 * q * v02 + omega * w02 - p * (v11 + w02),
        -3 * q * w20 - omega * v20 + p * (w11 + v20),
        -3 * q * w11 - omega * v11 + p * (v11 - 2 * w20 + 2 * w02),
        -3 * q * w02 - omega * v02 - p * (w11 - v02),
    ])


def vortex_chain_rhs(
    state: VortexChainState, params: PhysicalParams, *, r_coupling: RCoupling = "pr"
) -> VortexChainState:
    """Time derivative of every chain variable, packed in a state container.

    ``r_coupling`` selects the damping term of the ``r`` equation: ``"pr"``
    (default) gives ``-4 p r``, ``"qr"`` gives ``-4 q r``, which is what
    differentiating the continuity equation twice produces.
    """
    return VortexChainState.from_array(_rhs(state.to_array(), params.omega, r_coupling))


def third_order_closure(state: VortexChainState) -> tuple[float, float]:
    """Values fixed for ``(3 v30 + w21, 3 w03 + v12)`` by the closure."""
    s = state
    S = 0.5 * s.rho10 * (3 * s.v20 + s.w11 - s.v02) - 0.5 * s.rho01 * (3 * s.w02 + s.v11 - s.w20)
    return S, -S


@dataclass(frozen=True)
class VortexSeries:
    """Chain solution sampled on ``t``; ``Y`` has one column per FIELDS entry.

    ``dense`` is the integrator's continuous extension, when available, and
    is used for quadratures between samples.
    """

    t: np.ndarray
    Y: np.ndarray
    omega: float
    dense: object | None = None
    stop_reason: str = "completed"

    def __getitem__(self, name: str) -> np.ndarray:
        return self.Y[:, _IX[name]]

    def state(self, i: int) -> VortexChainState:
        return VortexChainState.from_array(self.Y[i])

    def __len__(self) -> int:
        return len(self.t)

    def at(self, t) -> np.ndarray:
        """Chain variables at arbitrary times inside the span (rows)."""
        tt = np.atleast_1d(np.asarray(t, float))
        if np.any(tt < self.t[0]) or np.any(tt > self.t[-1]):
            raise ParameterError("time outside the series span")
        if self.dense is not None:
            return np.atleast_2d(self.dense(tt).T)
        return np.column_stack([np.interp(tt, self.t, col) for col in self.Y.T])


def integrate_vortex_chain(
    initial: VortexChainState,
    params: PhysicalParams,
    t_span: tuple[float, float],
    tol: float = 1e-9,
    *,
    atol: float = 1e-12,
    t_eval=None,
    n_samples: int = 201,
    r_coupling: RCoupling = "pr",
) -> VortexSeries:
    """Integrate the closed chain; halts with PhysicalityError if rho0 <= 0."""
    initial.validate()
    if tol <= 0:
        raise ParameterError("tol must be positive")
    t0, t1 = map(float, t_span)
    if t1 < t0:
        raise ParameterError("t_span must be increasing")
    y0 = initial.to_array()
    if t1 == t0:
        return VortexSeries(np.array([t0]), y0[None, :], params.omega)
    grid = np.linspace(t0, t1, n_samples) if t_eval is None else np.asarray(t_eval, float)
    omega = params.omega

    def fun(_t, y):
        return _rhs(y, omega, r_coupling)

    def rho0_vanishes(_t, y):
        return y[_IX["rho0"]]

    rho0_vanishes.terminal = True
    sol = _ode.integrate(
        fun, (t0, t1), y0, t_eval=grid, rtol=tol, atol=atol, events=[rho0_vanishes], dense_output=True
    )
    series = VortexSeries(sol.t, sol.y.T.copy(), omega, sol.sol)
    if sol.status == 1:
        t_stop = float(sol.t_events[0][0])
        keep = series["rho0"] > 0
        partial = VortexSeries(series.t[keep], series.Y[keep], omega, sol.sol, "rho0_vanished")
        raise PhysicalityError(f"rho0 reached zero at t={t_stop:.6g}", partial=partial)
    return series


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def cumulative_integral(series: VortexSeries, name: str, times=None) -> np.ndarray:
    """``int_{t[0]}^{tau} f dt`` for each ``tau`` in ``times`` (default: series.t).

    With a dense solution each interval between consecutive abscissae is
    integrated by 8-point Gauss-Legendre; otherwise the trapezoid rule on the
    samples is used.
    """
    col = _IX[name]
    tau = series.t if times is None else np.atleast_1d(np.asarray(times, float))
    order = np.argsort(tau)
    knots = np.concatenate(([series.t[0]], tau[order]))
    if series.dense is None:
        f = series[name]
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(series.t))))
        vals = np.interp(knots[1:], series.t, cum)
        # exact inside a sample interval only up to trapezoid error
    else:
        a, b = knots[:-1], knots[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = (mid[:, None] + half[:, None] * _GL_NODES).ravel()
        f = series.dense(nodes)[col].reshape(len(a), -1)
        vals = np.cumsum(half * (f @ _GL_WEIGHTS))
    out = np.empty_like(tau, dtype=float)
    out[order] = vals
    return out


def rotation_angle(series: VortexSeries, Theta0: float, times=None) -> np.ndarray:
    """Orientation ``Theta0 + int p dt`` of the vortex section."""
    if len(series) == 0:
        raise ParameterError("empty series")
    return Theta0 + cumulative_integral(series, "p", times)


def amplitude_factor(series: VortexSeries, times=None) -> np.ndarray:
    """Singular-part amplitude ``exp(-3 int q dt)``."""
    if np.any(series["rho0"] <= 0):
        raise PhysicalityError("rho0 must stay positive")
    return np.exp(-3.0 * cumulative_integral(series, "q", times))


_T = np.array([[0.0, 1.0], [-1.0, 0.0]])


def evaluate_singular_field(x, t: float, shape: VortexShape, series: VortexSeries):
    """Leading singular part ``(u1, u2, rho)`` at a planar point ``x``.

    ``A(t) sqrt(<Q* d, B0 Q* d>) Q T B0 Q* d`` with ``d = x - X(t)``, ``Q*`` the
    rotation by ``Theta(t)`` and ``B0 = diag(b1, b2)``. The geopotential part
    vanishes at this order.
    """
    if shape.b1 == shape.b2:
        raise DegeneracyError("b1 == b2")
    y = series.at(t)[0]
    theta = float(rotation_angle(series, shape.Theta0, [t])[0])
    amp = float(amplitude_factor(series, [t])[0])
    c, s = math.cos(theta), math.sin(theta)
    Qs = np.array([[c, -s], [s, c]])
    B0 = np.diag([shape.b1, shape.b2])
    d = np.asarray(x, float) - y[[_IX["X1"], _IX["X2"]]]
    e = Qs @ d
    u = amp * math.sqrt(float(e @ B0 @ e)) * (Qs.T @ _T @ B0 @ e)
    return float(u[0]), float(u[1]), 0.0
