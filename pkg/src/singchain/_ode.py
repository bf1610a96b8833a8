"""Thin wrapper over scipy's adaptive Runge-Kutta integrators."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StiffnessError

METHOD = "DOP853"


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0: np.ndarray,
    *,
    t_eval: np.ndarray | None = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    events: Sequence[Callable] | None = None,
    dense_output: bool = False,
):
    """Run ``solve_ivp`` and translate step-size underflow into StiffnessError.

    Returns the raw scipy result object; callers inspect ``status`` (1 means a
    terminal event fired).
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    sol = solve_ivp(
        fun,
        t_span,
        np.asarray(y0, dtype=float),
        method=METHOD,
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        events=events,
        dense_output=dense_output,
    )
    if sol.status == -1:
        raise StiffnessError(f"integration failed: {sol.message}", partial=sol)
    return sol
