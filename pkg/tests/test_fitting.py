import json
import math

import numpy as np
import pytest

from singchain import hopf, trajectory as tr
from singchain.acceptance import front_relative_error, synthetic_tracks
from singchain.errors import ParameterError
from singchain.fitting import FitResult, ObservedTrack, fit_track, predict, track_mse

OMEGA = 1.0


@pytest.fixture(scope="module")
def clean_fit():
    fit_tr, hold, _ = synthetic_tracks(0.0)
    return fit_tr, hold, fit_track(fit_tr, "approx", seed=0, omega=OMEGA)


def test_track_validation():
    with pytest.raises(ParameterError):
        ObservedTrack([0.0, 0.0], [1, 2], [0, 0])
    with pytest.raises(ParameterError):
        ObservedTrack([0.0, 1.0], [1, 2], [0])
    with pytest.raises(ParameterError):
        track_mse(ObservedTrack([0.0], [1.0], [0.0]), lambda t: (t * 0, t * 0))


def test_track_mse_basic():
    ap = tr.ApproxTrajectoryParams(1 + 1j, 0.2, 0, 0, 0, 0.45, 0.8, 0.3, OMEGA)
    t = np.linspace(0, 10, 40)
    x1, x2 = tr.position_first_approx(t, ap)
    model = lambda tt: tr.position_first_approx(tt, ap)  # noqa: E731
    assert track_mse(ObservedTrack(t, x1, x2), model) <= 1e-20
    assert track_mse(ObservedTrack(t, x1 + 1, x2), model) == pytest.approx(1.0)


def test_track_mse_order_invariant():
    model = lambda t: (np.sin(t), np.cos(t))  # noqa: E731
    t = np.linspace(0, 3, 17)
    rng = np.random.default_rng(0)
    x1, x2 = rng.normal(size=17), rng.normal(size=17)
    perm = rng.permutation(17)
    a = np.mean((x1 - np.sin(t)) ** 2 + (x2 - np.cos(t)) ** 2)
    # reordering samples is the same as permuting the summands
    b = np.mean((x1[perm] - np.sin(t[perm])) ** 2 + (x2[perm] - np.cos(t[perm])) ** 2)
    assert track_mse(ObservedTrack(t, x1, x2), model) == pytest.approx(a) == pytest.approx(b)


def test_self_recovery(clean_fit):
    _, hold, res = clean_fit
    pred = predict(res, hold.t)
    mse = np.mean((pred.x1 - hold.x1) ** 2 + (pred.x2 - hold.x2) ** 2)
    assert mse < 1e-6 * abs(1 + 0.5j) ** 2
    assert 0.3 <= res.params["omega0"] <= 0.7 and 0 < res.params["mu"] <= 1


def test_predict_in_sample_and_window(clean_fit):
    fit_tr, _, res = clean_fit
    with pytest.raises(ParameterError):
        predict(res, fit_tr.t)
    p = predict(res, fit_tr.t, in_sample=True)
    np.testing.assert_allclose(p.x1 + 1j * p.x2, res.model()(fit_tr.t), atol=0)
    # continuity at the window end
    a = predict(res, [res.t_end])
    assert a.x1[0] == pytest.approx(p.x1[-1], abs=1e-12)


def test_determinism_and_json_roundtrip(clean_fit):
    fit_tr, _, res = clean_fit
    again = fit_track(fit_tr, "approx", seed=0, omega=OMEGA)
    assert again.to_json() == res.to_json()
    text = json.dumps(res.to_json())
    back = FitResult.from_json(json.loads(text))
    assert back.params == res.params and back.mse == res.mse
    assert len(back.restarts) == 32


def test_monotone_in_restarts():
    fit_tr, _, _ = synthetic_tracks(0.01)
    mses = [fit_track(fit_tr, "approx", budget=200, seed=3, omega=OMEGA, n_restarts=k).mse for k in (1, 3, 6)]
    assert mses[0] >= mses[1] >= mses[2]


def test_t0_gauge():
    fit_tr, _, _ = synthetic_tracks(0.0)
    P = 2 * math.pi / OMEGA
    a = fit_track(fit_tr, "approx", bounds={"t0": (0.0, P)}, seed=1, omega=OMEGA, n_restarts=10)
    b = fit_track(fit_tr, "approx", bounds={"t0": (P, 2 * P)}, seed=1, omega=OMEGA, n_restarts=10)
    assert a.mse == pytest.approx(b.mse, abs=1e-10)


def test_bad_bounds_and_inputs():
    fit_tr, _, _ = synthetic_tracks(0.0)
    with pytest.raises(ParameterError):
        fit_track(fit_tr, "approx", bounds={"mu": (1.0, 0.5)}, omega=OMEGA)
    with pytest.raises(ParameterError):
        fit_track(fit_tr, "approx", bounds={"nope": (0, 1)}, omega=OMEGA)
    with pytest.raises(ParameterError):
        fit_track(fit_tr, "approx", budget=0, omega=OMEGA)
    with pytest.raises(ParameterError):
        fit_track(fit_tr, "approx")
    with pytest.raises(ParameterError):
        fit_track(fit_tr, "spline", omega=OMEGA)


def test_hopf_phi_against_oracle_front():
    st_ = hopf.HopfChainState(0.0, (0.2, -0.5), (1.0, 0.3))
    t = np.linspace(0, 1, 41)
    ref = hopf.godunov_reference(hopf.initial_profile(st_), 1.0, 4000, domain=(-3, 3), sample_times=t)
    res = fit_track(ObservedTrack(t, ref.position, np.zeros_like(t)), "hopf-phi", seed=0, n_restarts=6)
    p = predict(res, t, in_sample=True)
    assert front_relative_error(p.x1, ref.position) < 0.02
    assert np.all(p.x2 == 0)


def test_exact_family_recovers_inertial_track():
    # beta = 0 makes the exact family an inertial circle; X0 and V0 come from the linear solve
    V0, X0 = 0.3 - 0.1j, 0.2 + 0.4j
    t = np.linspace(0, 6, 30)
    X = X0 + (1j / OMEGA) * (np.exp(-1j * OMEGA * t) - 1) * V0
    bounds = {k: (0.0, 0.0) for k in ("b0_re", "b0_im", "b1_re", "b1_im", "b2_re", "b2_im")}
    res = fit_track(ObservedTrack(t, X.real, X.imag), "exact", bounds=bounds, budget=60, omega=OMEGA, n_restarts=1)
    assert res.mse < 1e-20
    assert res.params["V0"] == pytest.approx(V0) and res.params["X0"] == pytest.approx(X0)
