import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxcox.errors import DomainError, TableFormatError
from maxcox.evt_laws import EvtLaw
from maxcox.mixing import MixingLaw, sup_lambda_power

FRECHET1 = EvtLaw.frechet(1.0)


def test_ls_transform_examples():
    assert MixingLaw.gamma(1.0, 1.0).ls_transform(1.0) == 0.5
    assert MixingLaw.point(7.3).ls_transform(0.0) == 1.0
    d = MixingLaw.discrete([0.0, 2.0], [0.3, 0.7])
    assert d.ls_transform(1.0) == pytest.approx(0.3 + 0.7 * math.exp(-2.0), rel=1e-15)
    assert d.ls_transform(1.0) == pytest.approx(0.3947347, abs=1e-7)


def test_ls_transform_rejects_negative():
    with pytest.raises(DomainError):
        MixingLaw.gamma(1.0).ls_transform(-0.1)


def test_ls_at_infinity_is_zero_mass():
    assert MixingLaw.discrete([0.0, 2.0], [0.3, 0.7]).ls_transform(math.inf) == 0.3
    assert MixingLaw.gamma(2.0).ls_transform(math.inf) == 0.0


def test_power_mixture_examples():
    assert MixingLaw.gamma(1.0).power_mixture(FRECHET1, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert MixingLaw.gamma(2.0).power_mixture(FRECHET1, 3.0) == pytest.approx(0.5625, rel=1e-15)
    for x in (0.2, 1.0, 5.0):
        assert MixingLaw.point(1.0).power_mixture(FRECHET1, x) == pytest.approx(FRECHET1.h(x), rel=1e-15)


@pytest.mark.parametrize("r,gamma", [(1.0, 1.0), (2.0, 1.0), (0.5, 2.0)])
def test_power_mixture_gamma_closed_form(r, gamma):
    evt = EvtLaw.frechet(gamma)
    for x in (0.1, 1.0, 10.0):
        xg = x**gamma
        assert MixingLaw.gamma(r).power_mixture(evt, x) == pytest.approx((xg / (1 + xg)) ** r, rel=1e-14)


def test_weighted_moment_examples():
    assert MixingLaw.gamma(1.0).weighted_moment(FRECHET1, 1.0, 1) == pytest.approx(0.25, rel=1e-15)
    m = MixingLaw.point(2.0).weighted_moment(EvtLaw.universal(1.0), 0.0, 3)
    assert m == pytest.approx(8.0 * math.exp(-2.0), rel=1e-15)
    assert m == pytest.approx(1.0827, abs=1e-4)


def test_weighted_moment_errors():
    with pytest.raises(DomainError):
        MixingLaw.gamma(1.0).weighted_moment(FRECHET1, -1.0, 1)
    with pytest.raises(DomainError):
        MixingLaw.gamma(1.0).weighted_moment(FRECHET1, 1.0, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r,s", [(1.0, 1.0), (2.5, 0.5), (0.5, 3.0)])
def test_weighted_moment_gamma_vs_mpmath(k, r, s):
    mix = MixingLaw.gamma(r, s)
    for x in (0.3, 1.0, 4.0):
        theta = x**-1.0
        ref = mpmath.quad(
            lambda lam: lam**k * mpmath.exp(-lam * theta) * lam ** (r - 1) * mpmath.exp(-lam / s)
            / (mpmath.gamma(r) * s**r), [0, 1, mpmath.inf])  # fmt: skip
        assert mix.weighted_moment(FRECHET1, x, k) == pytest.approx(float(ref), rel=1e-12)


def test_heavy_tail_moment_unavailable():
    # Pareto-type density f(l) = 2 / (1 + l)**3: E Lambda = 1, E Lambda**2 = inf
    mix = MixingLaw.density(lambda lam: 2.0 / (1.0 + lam) ** 3, tail_index=2.0)
    assert mix.mean() == pytest.approx(1.0, rel=1e-9)
    assert math.isinf(mix.moment(2))
    # theta > 0 makes every weighted moment finite
    assert math.isfinite(mix.weighted_moment(FRECHET1, 1.0, 3))


def test_tail_prob_examples():
    assert MixingLaw.point(1.0).tail_prob(2.0) == 0.0
    assert MixingLaw.point(1.0).tail_prob(0.5) == 1.0
    assert MixingLaw.gamma(1.0).tail_prob(1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_mean_examples():
    assert MixingLaw.gamma(2.0, 1.0).mean() == pytest.approx(2.0, rel=1e-14)
    assert MixingLaw.point(5.0).mean() == 5.0
    assert MixingLaw.discrete([1.0, 3.0], [0.5, 0.5]).mean() == 2.0


def test_sup_lambda_power_examples():
    assert sup_lambda_power(1.0, math.exp(-1.0)) == pytest.approx(1.0 / math.e, rel=1e-15)
    assert sup_lambda_power(2.0, math.exp(-1.0)) == pytest.approx((2.0 / math.e) ** 2, rel=1e-15)
    assert sup_lambda_power(2.0, math.exp(-1.0)) == pytest.approx(0.541341, abs=1e-6)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
def test_sup_lambda_power_domain(alpha):
    with pytest.raises(DomainError):
        sup_lambda_power(1.0, alpha)


@pytest.mark.parametrize("b,alpha", [(1.0, 0.3), (2.0, 0.9), (3.0, math.exp(-1.0))])
def test_sup_lambda_power_grid(b, alpha):
    lam = np.arange(0.0, 200.0, 1e-4)
    brute = np.max(lam**b * alpha**lam)
    assert sup_lambda_power(b, alpha) == pytest.approx(brute, rel=1e-6)


def test_construction_checks():
    with pytest.raises(DomainError):
        MixingLaw.discrete([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(DomainError):
        MixingLaw.density(lambda lam: 2.0 * math.exp(-lam))
    with pytest.raises(DomainError):
        MixingLaw.gamma(0.0)
    with pytest.raises(DomainError):
        MixingLaw.point(-1.0)


def test_from_csv(tmp_path):
    path = tmp_path / "mix.csv"
    path.write_text("lambda,p\n0,0.25\n2,0.75\n")
    mix = MixingLaw.from_csv(path)
    assert mix.mean() == 1.5
    path.write_text("lambda,p\n0,0.25\n2,x\n")
    with pytest.raises(TableFormatError, match="mix.csv:3"):
        MixingLaw.from_csv(path)
    path.write_text("lambda,p\n0,0.25\n2,0.5\n")
    with pytest.raises(TableFormatError):
        MixingLaw.from_csv(path)


@pytest.mark.parametrize("mix", [MixingLaw.gamma(1.0), MixingLaw.gamma(0.5, 2.0),
                                 MixingLaw.discrete([0.0, 1.0, 4.0], [0.2, 0.5, 0.3])])  # fmt: skip
def test_power_mixture_is_a_df(mix):
    xs = np.linspace(1e-3, 200.0, 1000)
    vals = np.array([mix.power_mixture(FRECHET1, x) for x in xs])
    assert np.all(np.diff(vals) >= -1e-15)
    assert mix.power_mixture(FRECHET1, 1e-300) == pytest.approx(mix.zero_mass, abs=1e-12)
    assert mix.power_mixture(FRECHET1, 1e12) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("a", [0.5, 2.0])
@pytest.mark.parametrize("gamma", [1.0, 2.0])
def test_scale_identity(a, gamma):
    # E H(a x)**Lambda' with Lambda' = a**gamma Lambda equals E H(x)**Lambda
    evt = EvtLaw.frechet(gamma)
    base = MixingLaw.gamma(1.5)
    scaled = MixingLaw.gamma(1.5, a**gamma)
    for x in (0.2, 1.0, 3.0):
        assert scaled.power_mixture(evt, a * x) == pytest.approx(base.power_mixture(evt, x), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([MixingLaw.gamma(1.0), MixingLaw.gamma(3.0, 0.5), MixingLaw.point(2.0),
                     MixingLaw.discrete([0.5, 4.0], [0.5, 0.5])]),  # fmt: skip
    st.floats(0.05, 50.0),
)
def test_first_moment_caps(mix, x):
    h = float(FRECHET1.h(x))
    m1 = mix.weighted_moment(FRECHET1, x, 1)
    assert m1 <= min(mix.mean(), sup_lambda_power(1.0, h)) * (1 + 1e-12)


def test_density_path_matches_gamma():
    for r, s in [(1.0, 1.0), (2.0, 0.5)]:
        g = MixingLaw.gamma(r, s)
        d = g.as_density()
        for x in (0.1, 1.0, 10.0):
            assert d.power_mixture(FRECHET1, x) == pytest.approx(g.power_mixture(FRECHET1, x), abs=1e-9)
            for k in (1, 2, 3):
                assert d.weighted_moment(FRECHET1, x, k) == pytest.approx(g.weighted_moment(FRECHET1, x, k), abs=1e-9)
        assert d.tail_prob(1.0) == pytest.approx(g.tail_prob(1.0), abs=1e-9)
        assert d.cdf(1.0) == pytest.approx(g.cdf(1.0), abs=1e-9)


def test_cdf_is_strict():
    mix = MixingLaw.point(2.0)
    assert mix.cdf(2.0) == 0.0
    assert mix.cdf(2.0 + 1e-12) == 1.0
    assert MixingLaw.discrete([1.0, 3.0], [0.5, 0.5]).cdf(3.0) == 0.5


def test_sampling_moments():
    rng = np.random.default_rng(5)
    for mix in (MixingLaw.gamma(2.0, 0.5), MixingLaw.gamma(2.0, 0.5).as_density()):
        draws = mix.sample(rng, 200_000)
        assert draws.mean() == pytest.approx(1.0, rel=0.01)
