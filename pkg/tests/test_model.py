import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tandem_aoi import (
    CouplingModel,
    GammaCompute,
    GammaFamily,
    ParameterError,
    SystemParams,
    average_power,
    max_feasible_mean_compute,
    mgf,
    transmission_rate,
    validate,
)
from tandem_aoi.model import max_feasible_mean_compute_array, random_feasible_point

shapes = st.floats(0.005, 20.0)
means = st.floats(1e-3, 20.0)
gammas = st.floats(0.0, 50.0)


class TestSystemParams:
    def test_defaults(self):
        p = SystemParams(lam=1.0, T_o=2.0)
        assert p.tau == 0 and p.p_c == 10 and p.C_avg == 1

    @pytest.mark.parametrize("kw, msg", [
        (dict(lam=1, T_o=1, tau=2), "deadline exceeds OFF time"),
        (dict(lam=0, T_o=1), "lambda"),
        (dict(lam=1, T_o=-1), "OFF time"),
        (dict(lam=1, T_o=1, p_c=1.0), "p_c"),
        (dict(lam=1, T_o=1, omega1=0, omega2=0), "degenerate objective"),
        (dict(lam=1, T_o=1, C_avg=0), "budget"),
    ])
    def test_rejects(self, kw, msg):
        with pytest.raises(ParameterError, match=msg):
            SystemParams(**kw)

    def test_tau_equal_T_o_allowed(self):
        assert SystemParams(lam=1, T_o=2, tau=2).tau == 2

    def test_with_revalidates(self):
        p = SystemParams(lam=1, T_o=2, tau=1)
        assert p.with_(T_o=5).T_o == 5
        with pytest.raises(ParameterError):
            p.with_(T_o=0.5)


class TestGamma:
    def test_exponential_case(self):
        assert mgf(GammaCompute(1.0, 1.0), 1.0) == pytest.approx(0.5, rel=1e-15)

    def test_mgf_at_zero(self):
        for k in (0.005, 0.1, 1.0, 7.0):
            assert mgf(GammaCompute(2.0, k), 0.0) == 1.0

    def test_mgf_monte_carlo(self):
        model = GammaCompute(2.0, 0.1)
        rng = np.random.default_rng(1)
        x = np.exp(-0.5 * model.sample(rng, 10**7))
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - mgf(model, 0.5)) <= 3 * se

    def test_second_moment_closed_form(self):
        assert GammaCompute(2.0, 0.5).second_moment == pytest.approx(4.0 * 3.0)

    def test_second_moment_sampler(self):
        model = GammaCompute(0.7, 0.3)
        x = model.sample(np.random.default_rng(2), 10**7) ** 2
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - model.second_moment) <= 3 * se

    def test_small_shape_sampler(self):
        x = GammaCompute(1.0, 0.005).sample(np.random.default_rng(3), 10**6)
        assert np.all(x >= 0) and abs(x.mean() - 1.0) < 0.2

    def test_tilted_mean_matches_derivative(self):
        m = GammaCompute(0.8, 0.2)
        h = 1e-6
        deriv = -(m.mgf(0.3 + h) - m.mgf(0.3 - h)) / (2 * h)
        assert m.tilted_mean(0.3) == pytest.approx(deriv, rel=1e-7)

    def test_derived_fields(self):
        m = GammaCompute(0.5, 0.1)
        assert m.kappa == 2.0 and m.rate == pytest.approx(0.2)

    @pytest.mark.parametrize("mean, k", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_invalid(self, mean, k):
        with pytest.raises(ParameterError):
            GammaCompute(mean, k)

    def test_negative_argument(self):
        with pytest.raises(ParameterError):
            mgf(GammaCompute(1.0, 1.0), -0.1)

    def test_family(self):
        assert GammaFamily(0.1)(2.0) == GammaCompute(2.0, 0.1)

    @settings(max_examples=1000, deadline=None)
    @given(shapes, means, gammas, gammas)
    def test_mgf_monotone(self, k, m, g1, g2):
        model = GammaCompute(m, k)
        lo, hi = sorted((g1, g2))
        v_lo, v_hi = mgf(model, lo), mgf(model, hi)
        assert 0 < v_hi <= v_lo <= 1
        if hi - lo > 1e-6 and v_lo > 1e-300:
            assert mgf(model, hi) < mgf(model, lo) or v_lo - v_hi < 1e-15 * v_lo


class TestCoupling:
    def test_decoupled(self):
        for m in (0.1, 1.0, 5.0):
            assert transmission_rate(CouplingModel(10, 0), m) == pytest.approx(0.1)

    def test_exponent_cancels(self):
        assert transmission_rate(CouplingModel(10, 1), math.log(10)) == pytest.approx(1.0)

    def test_direct(self):
        assert transmission_rate(CouplingModel(10, 1), 1.0) == pytest.approx(math.e / 10)

    def test_monotone(self):
        mu = transmission_rate(CouplingModel(10, 0.5), np.linspace(0.1, 3, 20))
        assert np.all(np.diff(mu) > 0)

    @pytest.mark.parametrize("B0, alpha", [(0, 1), (-1, 1), (10, -0.1)])
    def test_invalid(self, B0, alpha):
        with pytest.raises(ParameterError):
            CouplingModel(B0, alpha)


class TestPower:
    def test_substitution(self):
        assert average_power(SystemParams(lam=1, T_o=1), 1.0) == pytest.approx(11 / 3)
        assert average_power(SystemParams(lam=1, T_o=5), 0.1) == pytest.approx(2 / 6.1)

    def test_vanishing_compute(self):
        assert average_power(SystemParams(lam=3, T_o=0, p_c=25), 0.0) == pytest.approx(1.0)

    def test_bounds(self):
        b = max_feasible_mean_compute(SystemParams(lam=1, T_o=1))
        assert b.status == "bounded" and b.value == pytest.approx(1 / 9)
        assert max_feasible_mean_compute(SystemParams(lam=1, T_o=1, C_avg=12)).status == "unbounded"
        assert max_feasible_mean_compute(SystemParams(lam=1, T_o=0.5, C_avg=0.5)).status == "infeasible"

    def test_array_bound(self):
        b = max_feasible_mean_compute_array(SystemParams(lam=1, T_o=1, C_avg=0.5), np.array([0.5, 2.0]))
        assert math.isnan(b[0]) and b[1] == pytest.approx((1.0 - 0.5) / 9.5)

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(0.05, 5), st.floats(0, 20), st.floats(1, 9), st.floats(1.5, 30))
    def test_bound_saturates_budget(self, lam, T_o, C_avg, p_c):
        p = SystemParams(lam=lam, T_o=T_o, C_avg=C_avg, p_c=p_c)
        b = max_feasible_mean_compute(p)
        if b.status == "bounded" and b.value > 0:
            assert average_power(p, b.value) == pytest.approx(C_avg, rel=1e-12)

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(0.05, 5), st.floats(0, 20), st.floats(1, 5), st.floats(0.01, 5), st.floats(0.01, 5))
    def test_power_monotone(self, lam, T_o, C_avg, m1, m2):
        p = SystemParams(lam=lam, T_o=T_o, C_avg=C_avg)
        lo, hi = sorted((m1, m2))
        assert average_power(p, lo) <= average_power(p, hi) + 1e-15
        assert average_power(p.with_(T_o=T_o + 1.0), lo) < average_power(p, lo)


class TestValidate:
    def test_deadline(self):
        assert "deadline exceeds OFF time" in validate(dict(lam=1, T_o=1, tau=2))

    def test_degenerate(self):
        assert "degenerate objective" in validate(dict(lam=1, T_o=1, omega1=0, omega2=0))

    def test_reference_setting_ok(self):
        p = SystemParams(lam=1, T_o=5, p_c=10, C_avg=1)
        assert validate(p, GammaCompute(0.5, 0.1), CouplingModel(10, 1)) == []

    def test_power_violation(self):
        errors = validate(SystemParams(lam=1, T_o=1), GammaCompute(0.5, 0.1))
        assert any("exceeds power-feasible bound" in e for e in errors)

    def test_collects_everything(self):
        errors = validate(dict(lam=-1, T_o=1, tau=2), dict(mean_P=-1, k=1), dict(B0=0, alpha=1))
        assert len(errors) >= 4

    def test_never_raises_on_junk(self):
        assert validate(dict(lam="x", T_o=1))
        assert validate(dict(bogus=1))


def test_random_feasible_point_is_feasible():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p, c, cp = random_feasible_point(rng)
        assert p.tau <= p.T_o
        assert validate(p, c, cp) == []
