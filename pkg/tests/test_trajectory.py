import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singchain import hill, trajectory as tr
from singchain.errors import ParameterError, ResonanceError
from singchain.hill import HillPotential


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(0.05, 1.0))
def test_branch_arctan(a, mu):
    v = tr.branch_arctan(a, mu)
    n = math.floor(a / math.pi)
    assert math.pi * n - 1e-12 <= v <= math.pi * (n + 1) + 1e-12
    if abs(math.cos(a)) > 1e-3:
        assert math.tan(v) == pytest.approx(mu * math.tan(a), rel=1e-8, abs=1e-8)


def test_branch_arctan_monotone():
    a = np.linspace(-10, 10, 5001)
    assert np.all(np.diff(tr.branch_arctan(a, 0.3)) > 0)


def _params(beta_scale=0.05, **kw):
    base = dict(c=1.2, mu=0.8, t0=0.4, V0=0.1 - 0.05j, X0=0.5 + 0.2j, omega=1.1)
    base.update(kw)
    b = np.array([0.6, -0.2, 0.3, 0.5, -0.4, 0.1])
    pot = HillPotential.from_reals(0.42, beta_scale * b / np.linalg.norm(b))
    return tr.TrajectoryParams(pot, **base)


def test_inertial_limit():
    par = _params(beta_scale=0.0)
    t = np.linspace(0, 10, 21)
    s = tr.evaluate_trajectory(t, par)
    np.testing.assert_allclose(s.X, par.X0 + (1j / par.omega) * (np.exp(-1j * par.omega * t) - 1) * par.V0, atol=1e-14)
    np.testing.assert_allclose(s.V, par.V0 * np.exp(-1j * par.omega * t), atol=1e-14)


def test_velocity_is_derivative_of_position():
    par = _params()
    fl = hill.floquet_solution(par.pot)
    t = np.array([0.5, 3.0, 7.7])
    h = 1e-4 / par.omega
    fd = (tr.evaluate_trajectory(t + h, par, fl).X - tr.evaluate_trajectory(t - h, par, fl).X) / (2 * h)
    V = tr.evaluate_trajectory(t, par, fl).V
    assert np.max(np.abs(fd - V)) / np.max(np.abs(V)) < 1e-6


def test_rho0_positive_and_smooth():
    par = _params()
    fl = hill.floquet_solution(par.pot)
    t = np.linspace(0.2, 9, 7)
    assert np.all(tr.rho0_of_time(t, par, fl) > 0)

    def d(h):
        return (tr.rho0_of_time(t + h, par, fl) - tr.rho0_of_time(t - h, par, fl)) / (2 * h)

    # central differences at h and 2h agree to O(h^2)
    np.testing.assert_allclose(d(1e-3), d(2e-3), rtol=1e-4)


def test_t0_gauge_invariance_of_phase():
    par = _params()
    fl = hill.floquet_solution(par.pot)
    other = tr.TrajectoryParams(par.pot, par.c, par.mu, par.t0 + 2 * math.pi / par.omega, par.V0, par.X0, par.omega)
    t = np.linspace(0, 12, 9)
    np.testing.assert_allclose(tr.phase_of_time(t, other, fl), tr.phase_of_time(t, par, fl), atol=1e-10)
    np.testing.assert_allclose(tr.rho0_of_time(t, other, fl), tr.rho0_of_time(t, par, fl), rtol=1e-10)


def test_mismatched_floquet_rejected():
    par = _params()
    with pytest.raises(ParameterError):
        tr.evaluate_trajectory([0.0], par, hill.floquet_solution(HillPotential(0.3)))


def test_param_validation():
    pot = HillPotential(0.4)
    with pytest.raises(ParameterError):
        tr.TrajectoryParams(pot, 0.0, 0.5, 0, 0, 0, 1.0)
    with pytest.raises(ParameterError):
        tr.TrajectoryParams(pot, 1.0, 1.5, 0, 0, 0, 1.0)
    with pytest.raises(ParameterError):
        tr.TrajectoryParams(pot, 1.0, 0.5, 0, 0, 0, 0.0)
    with pytest.raises(ParameterError):
        tr.rot_u_on_trajectory(1.0, 0.0, 1.0)
    assert tr.rot_u_on_trajectory(2.0, 0.5, 1.0) == -2.0


def test_first_approximation_tracks_exact_solution():
    """Best first-approximation fit to the exact track: residual O(|beta|^3) against an O(|beta|) deviation."""
    res = []
    for s in (0.04, 0.02):
        par = _params(beta_scale=s, V0=0, X0=0)
        t = np.linspace(0, 4 * 2 * math.pi / par.omega, 120)
        X = tr.evaluate_trajectory(t, par).X
        fl = hill.floquet_solution(par.pot)
        D = tr.approx_basis(t, fl.quasi_momentum, par.mu, par.t0, par.omega)
        coef, *_ = np.linalg.lstsq(D, X, rcond=None)
        res.append(np.max(np.abs(D @ coef - X)) / np.max(np.abs(X - X[0])))
    assert res[0] < 1e-2
    assert res[1] < res[0] / 3  # relative residual ~ |beta|^2


def test_resonance():
    with pytest.raises(ResonanceError):
        tr.approx_basis([0.0], 0.5, 0.9, 0.0, 1.0)
    with pytest.raises(ResonanceError):
        tr.check_resonance(1.5)
    tr.check_resonance(0.49)


def test_circle_limit():
    ap = tr.ApproxTrajectoryParams(1 + 0.5j, 0.2, 0, 0, 0, 0.4, 1.0, 0.0, 1.0)
    t = np.linspace(0, 30, 301)
    x1, x2 = tr.position_first_approx(t, ap)
    np.testing.assert_allclose(np.hypot(x1 - 0.2, x2), abs(ap.A0), rtol=1e-12)  # mu = 1: exact circle
    circ = tr.circle_approx(ap)
    assert circ.sense == "counterclockwise" and circ.radius == pytest.approx(abs(ap.A0))
    assert circ.mean_angular_velocity == pytest.approx(0.125)


def test_circle_rule_and_exact_mean_rate_can_disagree():
    ap = tr.ApproxTrajectoryParams(1, 0, 0, 0, 0, 0.45, 0.6, 0.0, 1.0)
    circ = tr.circle_approx(ap)
    assert circ.sense == "clockwise"
    assert circ.mean_angular_velocity > 0
