"""Shock-front chains for the Hopf equation ``w_t + (w**2/2)_x = 0``.

A shock solution is written ``w = H(x, t) + A(x, t) * [x < phi(t)]``: ``H`` is
the state to the right of the front and ``H + A`` the state to the left.
Both are expanded in Taylor series about the front,

    H = sum_k H_k(t) (x - phi)^k,    A = sum_k A_k(t) (x - phi)^k,

and each side satisfies the Hopf equation on its own. Matching powers of
``x - phi`` gives, with ``W = H + A`` and ``s = dphi/dt``,

    s       = H_0 + A_0 / 2                           (Rankine-Hugoniot)
    dH_k/dt = -sum_{j=0..k} (H_j - s [j=0]) (k+1-j) H_{k+1-j}
    dW_k/dt = -sum_{j=0..k} (W_j - s [j=0]) (k+1-j) W_{k+1-j}

The chain is cut at order ``n`` by setting ``H_{n+1} = A_{n+1} = 0``.

Also here: a closed-form front law with five constants and a first-order
Godunov solver used as an independent oracle for front positions.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from . import _ode
from .errors import DegeneracyError, DomainError, ParameterError, SingularStateError, TrackingError

log = logging.getLogger(__name__)

CFL = 0.9


@dataclass(frozen=True)
class HopfChainState:
    phi: float
    H: tuple[float, ...]
    A: tuple[float, ...]

    def __post_init__(self) -> None:
        H = tuple(float(h) for h in self.H)
        A = tuple(float(a) for a in self.A)
        if len(H) == 0 or len(H) != len(A):
            raise ParameterError("H and A must be nonempty and of equal length")
        if not all(map(math.isfinite, (self.phi, *H, *A))):
            raise ParameterError("state contains non-finite values")
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        """Closure order."""
        return len(self.H) - 1

    def padded(self, n: int) -> HopfChainState:
        """Same state at closure order ``n >= self.n`` (zero padding)."""
        if n < self.n:
            raise ParameterError("cannot truncate a state by padding")
        extra = (0.0,) * (n - self.n)
        return HopfChainState(self.phi, self.H + extra, self.A + extra)

    def to_array(self) -> np.ndarray:
        return np.concatenate(([self.phi], self.H, self.A))

    @classmethod
    def from_array(cls, y: np.ndarray) -> HopfChainState:
        m = (len(y) - 1) // 2
        return cls(float(y[0]), tuple(y[1 : m + 1]), tuple(y[m + 1 :]))


def front_speed(H0: float, A0: float) -> float:
    """Hugoniot speed ``((H0 + A0)^2 - H0^2) / (2 A0)`` of a jump ``A0``."""
    if A0 == 0.0:
        raise SingularStateError("jump amplitude A0 is zero; front speed undefined")
    return ((H0 + A0) ** 2 - H0**2) / (2.0 * A0)


def _side_rates(c: np.ndarray, s: float) -> np.ndarray:
    # Taylor-coefficient rates for one smooth side, closure c_{n+1} = 0.
    n = len(c) - 1
    shifted = c.copy()
    shifted[0] -= s
    ext = np.append(c, 0.0)
    out = np.empty_like(c)
    for k in range(n + 1):
        j = np.arange(k + 1)
        out[k] = -np.sum(shifted[j] * (k + 1 - j) * ext[k + 1 - j])
    return out


def _chain_rates(H: np.ndarray, A: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    s = front_speed(H[0], A[0])
    dH = _side_rates(H, s)
    dW = _side_rates(H + A, s)
    return s, dH, dW - dH


def hopf_chain_rhs(state: HopfChainState) -> HopfChainState:
    """Time derivative of a cut chain state.

    The returned object reuses the state container: ``phi`` holds the front
    speed, ``H`` and ``A`` the coefficient rates.
    """
    s, dH, dA = _chain_rates(np.asarray(state.H), np.asarray(state.A))
    return HopfChainState(s, tuple(dH), tuple(dA))


@dataclass(frozen=True)
class HopfSeries:
    """Sampled chain solution.

    ``stop_reason`` is ``"completed"`` or ``"jump_vanished"`` (A0 reached zero
    and the integration was halted early).
    """

    t: np.ndarray
    phi: np.ndarray
    H: np.ndarray  # (samples, n+1)
    A: np.ndarray
    stop_reason: str = "completed"

    @property
    def n(self) -> int:
        return self.H.shape[1] - 1

    def state(self, i: int) -> HopfChainState:
        return HopfChainState(self.phi[i], tuple(self.H[i]), tuple(self.A[i]))

    def __len__(self) -> int:
        return len(self.t)


def integrate_hopf_chain(
    initial: HopfChainState,
    t_span: tuple[float, float],
    tol: float = 1e-9,
    *,
    atol: float = 1e-12,
    t_eval: Sequence[float] | None = None,
    n_samples: int = 101,
) -> HopfSeries:
    """Integrate the cut chain over ``t_span``.

    Samples go on ``t_eval`` if given, otherwise on ``n_samples`` uniform
    points. If ``A0`` crosses zero the run stops there and the partial series
    is returned with ``stop_reason="jump_vanished"``.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    t0, t1 = map(float, t_span)
    if t1 < t0:
        raise ParameterError("t_span must be increasing")
    if initial.A[0] == 0.0:
        raise SingularStateError("initial jump amplitude A0 is zero")
    m = initial.n + 1
    y0 = initial.to_array()

    def as_series(t, Y, reason="completed"):
        Y = np.atleast_2d(Y)
        return HopfSeries(np.asarray(t, float), Y[:, 0], Y[:, 1 : m + 1], Y[:, m + 1 :], reason)

    if t1 == t0:
        return as_series([t0], y0[None, :])

    grid = np.linspace(t0, t1, n_samples) if t_eval is None else np.asarray(t_eval, float)

    def fun(_t, y):
        s, dH, dA = _chain_rates(y[1 : m + 1], y[m + 1 :])
        return np.concatenate(([s], dH, dA))

    def jump_vanishes(_t, y):
        return y[m + 1]

    jump_vanishes.terminal = True

    sol = _ode.integrate(fun, (t0, t1), y0, t_eval=grid, rtol=tol, atol=atol, events=[jump_vanishes])
    series = as_series(sol.t, sol.y.T)
    if sol.status == 1:
        t_stop = float(sol.t_events[0][0])
        log.info("A0 vanished at t=%g; chain halted", t_stop)
        # drop a sample sitting on the event itself, where A0 == 0
        keep = np.abs(series.A[:, 0]) > 0
        series = HopfSeries(series.t[keep], series.phi[keep], series.H[keep], series.A[keep], "jump_vanished")
    return series


@dataclass(frozen=True)
class PhiClosedForm:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float

    def __post_init__(self) -> None:
        if self.c1 == self.c2:
            raise DegeneracyError("c1 == c2: closed form divides by c2 - c1")


def phi_closed_form(c: PhiClosedForm, t):
    """Front law ``c3/(c2-c1) * sqrt((t+c1)/(t+c2)) + c4 t + c5``."""
    if c.c1 == c.c2:
        raise DegeneracyError("c1 == c2: closed form divides by c2 - c1")
    t_arr = np.asarray(t, dtype=float)
    num = t_arr + c.c1
    den = t_arr + c.c2
    if np.any(den <= 0) or np.any(num < 0):
        raise DomainError("closed form needs t + c1 >= 0 and t + c2 > 0")
    out = c.c3 / (c.c2 - c.c1) * np.sqrt(num / den) + c.c4 * t_arr + c.c5
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Godunov oracle


def godunov_flux(uL: np.ndarray, uR: np.ndarray) -> np.ndarray:
    """Exact Riemann flux for Burgers' equation."""
    fL = 0.5 * uL * uL
    fR = 0.5 * uR * uR
    shock = np.where(0.5 * (uL + uR) > 0, fL, fR)
    fan = np.where(uL > 0, fL, np.where(uR < 0, fR, 0.0))
    return np.where(uL > uR, shock, fan)


def _with_ghosts(w: np.ndarray, bc: str) -> np.ndarray:
    if bc == "periodic":
        return np.concatenate(([w[-1]], w, [w[0]]))
    if bc == "outflow":
        return np.concatenate(([w[0]], w, [w[-1]]))
    if bc == "extrapolate":
        return np.concatenate(([2 * w[0] - w[1]], w, [2 * w[-1] - w[-2]]))
    raise ParameterError(f"unknown boundary condition {bc!r}")


def godunov_step(w: np.ndarray, dx: float, dt: float, bc: str = "extrapolate") -> np.ndarray:
    u = _with_ghosts(w, bc)
    F = godunov_flux(u[:-1], u[1:])
    return w - dt / dx * (F[1:] - F[:-1])


def cell_averages(profile: Callable[[np.ndarray], np.ndarray], edges: np.ndarray) -> np.ndarray:
    """Cell averages of ``profile`` by 4-point Gauss-Legendre per cell."""
    nodes, weights = np.polynomial.legendre.leggauss(4)
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    return 0.5 * np.sum(weights * profile(x), axis=1)


def godunov_evolve(
    w0: np.ndarray,
    dx: float,
    sample_times: Sequence[float],
    bc: str = "extrapolate",
) -> list[np.ndarray]:
    """Advance cell averages, returning a snapshot at every sample time."""
    times = np.asarray(sample_times, float)
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ParameterError("sample times must be non-negative and increasing")
    w = np.array(w0, dtype=float)
    t = 0.0
    out = []
    for target in times:
        while t < target:
            vmax = float(np.max(np.abs(w)))
            dt = target - t if vmax == 0 else min(CFL * dx / vmax, target - t)
            w = godunov_step(w, dx, dt, bc)
            t = target if dt == target - t else t + dt
        out.append(w.copy())
    return out


def locate_shock(x: np.ndarray, w: np.ndarray, *, halo: int = 3, jump_tol: float = 1e-8) -> float:
    """Front position as the mid-level crossing of the steepest downward jump.

    The plateau values are read ``halo`` cells either side of the jump; the
    crossing is located by linear interpolation between cell centers.
    """
    d = w[:-1] - w[1:]
    i = int(np.argmax(d))
    floor = max(jump_tol, 10.0 * float(np.median(np.abs(d))))
    if d[i] <= floor:
        raise TrackingError("no downward jump detected in profile")
    lo = max(i - halo, 0)
    hi = min(i + 1 + halo, len(w) - 1)
    mid = 0.5 * (w[lo] + w[hi])
    for j in range(lo, hi):
        if w[j] >= mid > w[j + 1]:
            return float(x[j] + (w[j] - mid) / (w[j] - w[j + 1]) * (x[j + 1] - x[j]))
    raise TrackingError("profile is not monotone across the detected jump")


@dataclass(frozen=True)
class ShockTrack:
    t: np.ndarray
    position: np.ndarray
    dx: float


def godunov_reference(
    initial_profile: Callable[[np.ndarray], np.ndarray],
    t_end: float,
    cells: int = 4000,
    *,
    domain: tuple[float, float] = (-2.0, 2.0),
    n_samples: int = 51,
    sample_times: Sequence[float] | None = None,
    bc: str = "extrapolate",
) -> ShockTrack:
    """Track a single shock with a first-order Godunov scheme."""
    if cells < 100:
        raise ParameterError("need at least 100 cells")
    if t_end < 0:
        raise ParameterError("t_end must be non-negative")
    a, b = domain
    edges = np.linspace(a, b, cells + 1)
    dx = (b - a) / cells
    x = 0.5 * (edges[:-1] + edges[1:])
    times = np.linspace(0.0, t_end, n_samples) if sample_times is None else np.asarray(sample_times, float)
    snaps = godunov_evolve(cell_averages(initial_profile, edges), dx, times, bc)
    pos = np.array([locate_shock(x, s) for s in snaps])
    return ShockTrack(times, pos, dx)


def initial_profile(state: HopfChainState) -> Callable[[np.ndarray], np.ndarray]:
    """Piecewise-polynomial profile ``H + A [x < phi]`` built from a chain state."""
    H = np.asarray(state.H)[::-1]
    W = (np.asarray(state.H) + np.asarray(state.A))[::-1]

    def profile(x):
        xi = np.asarray(x, float) - state.phi
        return np.where(xi < 0, np.polyval(W, xi), np.polyval(H, xi))

    return profile
