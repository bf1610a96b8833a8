import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singchain import hill
from singchain.errors import InvalidMonodromyError, ParameterError, StabilityError
from singchain.hill import HillPotential, Stability


def test_potential_examples():
    assert hill.potential_value(HillPotential(0.7), 1.234) == pytest.approx(0.49)
    assert hill.potential_value(HillPotential(1.0, 1, 1, 0), 0.0) == pytest.approx(2.5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6), st.floats(0, 2), st.floats(-10, 10))
def test_potential_periodic(b, om, phi):
    pot = HillPotential.from_reals(om, b)
    assert hill.potential_value(pot, phi + 2 * math.pi) == pytest.approx(hill.potential_value(pot, phi), abs=1e-12)


@pytest.mark.parametrize("om,trace", [(0.5, -2.0), (0.25, 0.0), (0.7, 2 * math.cos(1.4 * math.pi))])
def test_constant_monodromy_trace(om, trace):
    M = hill.monodromy(HillPotential(om))
    assert np.trace(M) == pytest.approx(trace, abs=1e-9)
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-9)


def test_classification():
    st_, idx = hill.classify_stability(hill.monodromy(HillPotential(0.25)))
    assert st_ is Stability.STRONGLY_STABLE and idx == pytest.approx(0.25)
    assert hill.classify_stability(hill.monodromy(HillPotential(0.5)))[0] is Stability.BOUNDARY
    st_u, idx_u = hill.classify_stability(np.array([[3.0, 1.0], [2.0, 1.0]]))
    assert st_u is Stability.UNSTABLE and math.isnan(idx_u)
    with pytest.raises(InvalidMonodromyError):
        hill.classify_stability(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_unstable_potential_has_no_floquet_solution():
    # a potential inside the first instability tongue: trace beyond -2
    pot = HillPotential(0.5, 0.0, 0.6, 0.6)
    M = hill.monodromy(pot)
    assert abs(np.trace(M)) > 2
    with pytest.raises(StabilityError):
        hill.floquet_solution(pot)


@pytest.mark.parametrize("om", [0.25, 0.7, 1.3])
def test_constant_floquet(om):
    fl = hill.floquet_solution(HillPotential(om))
    assert fl.quasi_momentum == pytest.approx(om, abs=1e-10)
    np.testing.assert_allclose(fl.g, 1 / math.sqrt(om), atol=1e-10)
    np.testing.assert_allclose(fl.theta, om * fl.Phi, atol=1e-9)


def test_coexistence_case():
    fl = hill.floquet_solution(HillPotential(0.5))
    assert fl.stability is Stability.BOUNDARY
    assert fl.quasi_momentum == pytest.approx(0.5, abs=1e-10)


def test_floquet_invariants_random():
    rng = np.random.default_rng(4)
    pot = HillPotential.from_reals(0.7, rng.normal(size=6) * 0.05)
    fl = hill.floquet_solution(pot)
    np.testing.assert_allclose(fl.wronskian(), 2j, atol=1e-9)
    assert fl.theta[0] == 0.0
    assert np.all(np.diff(fl.theta) > 0)
    assert np.all(fl.g > 0)
    # theta - Omega Phi is periodic, dtheta = 1/g^2
    assert fl.theta[-1] - fl.theta[0] == pytest.approx(2 * math.pi * fl.quasi_momentum, abs=1e-9)
    mid = 0.5 * (fl.Phi[1:] + fl.Phi[:-1])
    dth = np.diff(fl.theta) / np.diff(fl.Phi)
    np.testing.assert_allclose(dth, fl.dtheta_at(mid), rtol=1e-5)
    # the tabulated y solves the Hill equation: compare y'' by finite differences
    h = fl.Phi[1] - fl.Phi[0]
    ypp = (fl.y[2:] - 2 * fl.y[1:-1] + fl.y[:-2]) / h**2
    res = ypp + hill.potential_value(pot, fl.Phi[1:-1]) * fl.y[1:-1]
    assert np.max(np.abs(res)) < 1e-5


def test_quasi_momentum_is_second_order_in_beta():
    base = np.array([0.8, -0.3, 0.5, 0.2, -0.4, 0.6])
    devs = []
    for s in (0.05, 0.025):
        fl = hill.floquet_solution(HillPotential.from_reals(0.7, s * base / np.linalg.norm(base)))
        devs.append(abs(fl.quasi_momentum - 0.7))
    # deviation decays at least quadratically
    assert devs[1] < devs[0] / 3.5


def test_invert_theta_roundtrip():
    fl = hill.floquet_solution(HillPotential.from_reals(0.6, [0.05, 0.0, -0.03, 0.02, 0.01, 0.0]))
    Phi = np.linspace(-7, 20, 50)
    np.testing.assert_allclose(fl.invert_theta(fl.theta_at(Phi)), Phi, atol=1e-10)


def test_bad_inputs():
    with pytest.raises(ParameterError):
        HillPotential(-1.0)
    with pytest.raises(ParameterError):
        hill.monodromy(HillPotential(1.0), tol=0)
    with pytest.raises(ParameterError):
        HillPotential.from_reals(1.0, [0, 0, 0])
