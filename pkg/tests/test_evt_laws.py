import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxcox.errors import DomainError
from maxcox.evt_laws import EvtLaw, classical_form, h_tau, log_classical_form, log_h_tau

E1 = math.exp(-1.0)


def test_h_tau_examples():
    assert h_tau(1.0, 0.0) == pytest.approx(E1, rel=1e-15)
    assert h_tau(0.0, 0.0) == pytest.approx(E1, rel=1e-15)
    assert h_tau(1.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)


def test_log_h_tau_examples():
    assert log_h_tau(1.0, 0.0) == -1.0
    assert log_h_tau(0.0, 0.0) == -1.0
    assert log_h_tau(0.5, -2.0) == -math.inf


def test_support_sides():
    assert log_h_tau(0.5, -3.0) == -math.inf  # below the Frechet-type support
    assert log_h_tau(-0.5, 3.0) == 0.0  # above the Weibull-type right endpoint
    assert h_tau(-0.5, 3.0) == 1.0


def test_classical_form_examples():
    assert classical_form("frechet", 1.0, 1.0) == pytest.approx(E1, rel=1e-15)
    assert classical_form("weibull", 2.0, 0.0) == 1.0
    assert classical_form("gumbel", 1.0, -math.log(math.log(2.0))) == pytest.approx(0.5, rel=1e-15)
    assert classical_form("frechet", 2.0, 0.0) == 0.0
    assert classical_form("weibull", 2.0, -2.0) == pytest.approx(math.exp(-4.0), rel=1e-15)


@pytest.mark.parametrize("gamma", [0.0, -1.0])
def test_classical_form_rejects_gamma(gamma):
    with pytest.raises(DomainError):
        classical_form("frechet", gamma, 1.0)


def test_classical_form_rejects_kind():
    with pytest.raises(DomainError):
        classical_form("cauchy", 1.0, 1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(-10.0, 50.0))
def test_bridge_to_frechet(tau, x):
    w = 1.0 + tau * x
    if w <= 0:
        assert h_tau(tau, x) == 0.0
        return
    assert abs(h_tau(tau, x) - classical_form("frechet", 1.0 / tau, w)) <= 1e-14


@settings(max_examples=300, deadline=None)
@given(st.floats(-5.0, -0.05), st.floats(-50.0, 10.0))
def test_bridge_to_weibull(tau, x):
    w = 1.0 + tau * x
    if w <= 0:
        assert h_tau(tau, x) == 1.0
        return
    assert abs(h_tau(tau, x) - classical_form("weibull", -1.0 / tau, -w)) <= 1e-14


def test_gumbel_routing_is_continuous():
    xs = np.linspace(-3.0, 10.0, 2001)
    assert np.max(np.abs(h_tau(1e-9, xs) - h_tau(0.0, xs))) < 1e-7
    assert np.array_equal(h_tau(1e-9, xs), classical_form("gumbel", 1.0, xs))


@pytest.mark.parametrize("tau", [-2.0, -0.5, 0.0, 0.5, 2.0])
def test_monotone(tau):
    xs = np.linspace(-20.0, 20.0, 10_000)
    h = h_tau(tau, xs)
    assert np.all(np.diff(h) >= 0)
    assert np.all((h >= 0) & (h <= 1))


@pytest.mark.parametrize("tau", [-2.0, -0.5, 0.0, 0.5, 2.0])
def test_limits(tau):
    assert h_tau(tau, -1e6) == pytest.approx(0.0, abs=1e-300)
    assert h_tau(tau, 1e12) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("tau", [-1.0, 0.25, 1.0])
def test_support_iff(tau):
    xs = np.linspace(-10.0, 10.0, 4001)
    h = h_tau(tau, xs)
    w = 1.0 + tau * xs
    if tau < 0:
        assert np.all(h > 0)
    else:
        assert np.all(w[h > 0] > 0)
        assert np.all(h[w > 0.5] > 0)  # closer to the boundary exp(-w**(-1/tau)) underflows


def test_evt_law_constructors():
    f = EvtLaw.frechet(2.0)
    assert (f.kind, f.gamma, f.tau, f.classical) == ("frechet", 2.0, 0.5, True)
    w = EvtLaw.weibull(3.0)
    assert (w.kind, w.gamma) == ("weibull", 3.0)
    assert EvtLaw.gumbel().kind == "gumbel"
    assert EvtLaw.universal(0.0).kind == "gumbel"
    assert EvtLaw.universal(-0.5).kind == "weibull"
    assert EvtLaw.universal(-0.5).gamma == 2.0


def test_classical_law_uses_textbook_coordinates():
    f = EvtLaw.frechet(1.0)
    assert f.h(1.0) == pytest.approx(E1)
    assert f.log_h(2.0) == -0.5
    u = EvtLaw.universal(1.0)
    assert u.h(0.0) == pytest.approx(E1)


@pytest.mark.parametrize("law", [EvtLaw.frechet(1.5), EvtLaw.weibull(2.0), EvtLaw.gumbel(), EvtLaw.universal(0.3)])
@pytest.mark.parametrize("u", [0.05, 0.5, 0.95])
def test_quantile_round_trip(law, u):
    assert law.h(law.quantile(u)) == pytest.approx(u, rel=1e-12)


def test_log_classical_vectorized():
    xs = np.array([-1.0, 0.0, 1.0])
    out = log_classical_form("frechet", 1.0, xs)
    assert out[0] == -math.inf and out[1] == -math.inf and out[2] == -1.0
