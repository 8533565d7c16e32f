import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tandem_aoi import CouplingModel, GammaFamily, ParameterError, SystemParams, average_power
from tandem_aoi.analysis import evaluate
from tandem_aoi.model import GammaCompute, transmission_rate
from tandem_aoi.optimize import (
    SearchSpec,
    _evaluate,
    front_points,
    is_dominated,
    minimize,
    pareto_front,
    strict_vs_best_threshold,
)

BASE = SystemParams(lam=1.0, T_o=3.0, tau=0.0)
COARSE = SearchSpec(n_tau=11, n_meanP=21, n_To=21, refinement_rounds=2)


def _fam(k=0.1):
    return GammaFamily(k)


class TestSearchSpec:
    def test_defaults(self):
        s = SearchSpec()
        assert s.fixed == frozenset({"T_o"}) and s.T_o_range == (0.0, 20.0)

    @pytest.mark.parametrize("kw", [
        dict(n_tau=1), dict(fixed={"T_o"}, n_meanP=1), dict(fixed=set(), T_o_range=(3.0, 3.0)),
        dict(refinement_rounds=-1), dict(fixed={"speed"}), dict(fixed={"mean_P"}),
        dict(mean_P_min=0.0),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ParameterError):
            SearchSpec(**kw)

    def test_pinned_axis_may_have_one_point(self):
        SearchSpec(n_To=1)

    def test_doubled_contains_old_grid(self):
        s = SearchSpec(n_tau=5, n_meanP=7, n_To=3).doubled()
        assert (s.n_tau, s.n_meanP, s.n_To) == (9, 13, 5)
        old, new = np.linspace(0, 1, 5), np.linspace(0, 1, 9)
        assert np.allclose(old, new[::2])

    def test_pin_release(self):
        s = SearchSpec().pinned("tau").released("T_o")
        assert s.fixed == frozenset({"tau"})


class TestMinimize:
    def test_single_grid_point(self, ref_coupling):
        p = BASE.with_(tau=1.0)
        spec = SearchSpec(fixed={"tau", "mean_P", "T_o"}, mean_P=0.1)
        r = minimize(p, _fam(), ref_coupling, spec)
        assert r.feasible and r.n_evaluated == 1
        assert (r.best_tau, r.best_meanP, r.best_To) == (1.0, 0.1, 3.0)
        ref = evaluate(p, GammaCompute(0.1, 0.1), ref_coupling)
        assert r.avg_aoi == pytest.approx(ref.avg_aoi, rel=1e-12)

    def test_aoi_only_weight_is_definitional(self, ref_coupling):
        spec = SearchSpec(n_tau=11, n_meanP=21, refinement_rounds=0)
        r = minimize(BASE, _fam(), ref_coupling, spec)
        assert r.objective_value == r.avg_aoi
        pts, _ = _evaluate(BASE, _fam(), ref_coupling, spec, [3.0],
                           np.linspace(0, 1, 21), np.linspace(0, 1, 11))
        assert pts["aoi"].min() >= r.avg_aoi
        assert pts["obj"].size == r.n_evaluated

    def test_peak_only_weight(self, ref_coupling):
        r = minimize(BASE.with_(omega1=0.0, omega2=1.0), _fam(), ref_coupling, COARSE)
        assert r.objective_value == r.avg_peak_aoi

    def test_best_off_time_is_positive(self, ref_coupling):
        r = minimize(BASE, _fam(), ref_coupling, COARSE.released("T_o"))
        assert r.feasible and r.best_To > 0
        assert r.best_tau <= r.best_To

    def test_refinement_monotone(self, ref_coupling):
        r = minimize(BASE, _fam(), ref_coupling, SearchSpec(refinement_rounds=5, fixed=set()))
        h = r.round_objectives
        assert len(h) == 6
        assert all(b <= a for a, b in zip(h, h[1:]))
        assert h[-1] == r.objective_value

    def test_tau_endpoints_on_grid(self, ref_coupling):
        spec = SearchSpec(n_tau=3, n_meanP=3, refinement_rounds=0)
        pts, _ = _evaluate(BASE, _fam(), ref_coupling, spec, [3.0], np.linspace(0, 1, 3), np.linspace(0, 1, 3))
        assert set(np.unique(pts["tau"])) == {0.0, 1.5, 3.0}
        # u = 1 sits exactly on the budget
        top = pts["u"] == 1.0
        for mP in pts["mean_P"][top]:
            assert average_power(BASE, mP) == pytest.approx(BASE.C_avg, abs=1e-12)

    def test_deterministic(self, ref_coupling):
        spec = COARSE.released("T_o")
        assert minimize(BASE, _fam(), ref_coupling, spec) == minimize(BASE, _fam(), ref_coupling, spec)

    def test_infeasible_carries_constraint(self, ref_coupling):
        p = SystemParams(lam=1.0, T_o=0.01, C_avg=0.05, p_c=10.0)
        r = minimize(p, _fam(), ref_coupling, COARSE)
        assert not r.feasible and "power budget" in r.violated
        assert math.isinf(r.objective_value) and r.n_infeasible_pruned > 0

    def test_pinned_mean_over_budget_is_infeasible(self, ref_coupling):
        spec = SearchSpec(fixed={"mean_P", "T_o"}, mean_P=5.0, n_tau=5)
        r = minimize(BASE, _fam(), ref_coupling, spec)
        assert not r.feasible and r.violated

    def test_pinned_tau_above_off_time_pruned(self, ref_coupling):
        spec = SearchSpec(fixed={"tau", "mean_P"}, mean_P=0.05, n_To=11, T_o_range=(0.0, 2.0), refinement_rounds=0)
        r = minimize(BASE.with_(tau=1.0, T_o=1.0), _fam(), ref_coupling, spec)
        assert r.feasible and r.best_To >= 1.0 and r.n_infeasible_pruned == 5

    def test_zero_off_time_allowed_in_range(self, ref_coupling):
        # a budget above the busy power makes T_o = 0 feasible
        p = BASE.with_(C_avg=12.0)
        r = minimize(p, _fam(), ref_coupling, COARSE.released("T_o"))
        assert r.feasible and r.power_slack >= -1e-12


class TestProperties:
    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(
        lam=st.floats(0.2, 2.0), T_o=st.floats(0.5, 10.0), k=st.floats(0.005, 1.0),
        alpha=st.floats(0.0, 2.0), C_avg=st.floats(1.0, 2.0), w=st.floats(0.0, 1.0),
        free_To=st.booleans(),
    )
    def test_feasible_output_and_doubling(self, lam, T_o, k, alpha, C_avg, w, free_To):
        p = SystemParams(lam=lam, T_o=T_o, C_avg=C_avg, omega1=w, omega2=1.0 - w)
        cp = CouplingModel(10.0, alpha)
        spec = SearchSpec(n_tau=5, n_meanP=9, n_To=9, refinement_rounds=0, fixed=set() if free_To else {"T_o"})
        r = minimize(p, GammaFamily(k), cp, spec)
        assert r.feasible
        assert r.power_slack >= -1e-12
        assert 0.0 <= r.best_tau <= r.best_To
        pt = p.with_(T_o=r.best_To, tau=r.best_tau)
        assert average_power(pt, r.best_meanP) <= C_avg + 1e-12
        r2 = minimize(p, GammaFamily(k), cp, spec.doubled())
        assert r2.objective_value <= r.objective_value

    @settings(max_examples=25, deadline=None)
    @given(lam=st.floats(0.2, 2.0), T_o=st.floats(0.5, 10.0), k=st.floats(0.005, 1.0), rounds=st.integers(1, 4))
    def test_rounds_monotone(self, lam, T_o, k, rounds):
        spec = SearchSpec(n_tau=5, n_meanP=7, n_To=5, refinement_rounds=rounds, fixed=set())
        r = minimize(SystemParams(lam=lam, T_o=T_o), GammaFamily(k), CouplingModel(10.0, 1.0), spec)
        h = r.round_objectives
        assert all(b <= a for a, b in zip(h, h[1:]))


class TestThreshold:
    def test_improvement_band(self, ref_coupling):
        spec = SearchSpec(n_tau=21, n_meanP=41, n_To=41, refinement_rounds=3, fixed=set())
        hi = strict_vs_best_threshold(BASE, _fam(), ref_coupling, spec)
        lo = strict_vs_best_threshold(BASE.with_(lam=0.2), _fam(), ref_coupling, spec)
        assert hi.strict.best_tau == 0.0
        assert 0.02 <= hi.improvement <= 0.08
        assert lo.improvement < hi.improvement

    def test_fast_transmitter_removes_benefit(self):
        cp = CouplingModel(10.0, 800.0)
        spec = SearchSpec(fixed={"T_o", "mean_P"}, mean_P=0.05, n_tau=21)
        cmp = strict_vs_best_threshold(BASE, _fam(), cp, spec)
        assert transmission_rate(cp, 0.05) > 1e15
        assert cmp.improvement == pytest.approx(0.0, abs=1e-9)
        assert cmp.improvement >= 0.0

    def test_best_never_worse(self, ref_coupling):
        cmp = strict_vs_best_threshold(BASE.with_(lam=0.5), GammaFamily(0.02), ref_coupling, COARSE)
        assert cmp.best.objective_value <= cmp.strict.objective_value


class TestPareto:
    def test_single_weight_equals_minimize(self, ref_coupling):
        (r,) = pareto_front(BASE, _fam(), ref_coupling, COARSE, [(1, 0)])
        m = minimize(BASE, _fam(), ref_coupling, COARSE)
        assert (r.best_tau, r.best_meanP, r.objective_value) == (m.best_tau, m.best_meanP, m.objective_value)
        assert r.pareto == ((math.inf, m.avg_aoi, m.avg_peak_aoi),)

    def test_corners(self, ref_coupling):
        a, b = pareto_front(BASE, _fam(), ref_coupling, COARSE, [(1, 0), (0, 1)])
        assert a.avg_aoi <= b.avg_aoi
        assert b.avg_peak_aoi <= a.avg_peak_aoi

    def test_front_non_dominated(self, ref_coupling):
        weights = [(1, 0), (1, 0.5), (1, 1), (0.5, 1), (0, 1)]
        res = pareto_front(BASE, GammaFamily(0.005), ref_coupling, COARSE.released("T_o"), weights)
        assert len(res) == len(weights)
        front = res[0].pareto
        assert front and front == tuple(front_points(res))
        ratios = [f[0] for f in front]
        assert ratios == sorted(ratios)
        for p in front:
            assert not any(is_dominated((p[1], p[2]), (q[1], q[2])) for q in front)

    def test_larger_variance_is_worse(self, ref_coupling):
        weights = [(1, 0), (1, 1), (0, 1)]
        spec = COARSE.released("T_o")
        big = pareto_front(BASE, GammaFamily(0.005), ref_coupling, spec, weights)
        small = pareto_front(BASE, GammaFamily(0.008), ref_coupling, spec, weights)
        for b, s in zip(big, small):
            assert b.avg_aoi >= s.avg_aoi

    def test_empty_weights(self, ref_coupling):
        with pytest.raises(ParameterError):
            pareto_front(BASE, _fam(), ref_coupling, COARSE, [])

    def test_dominance_helper(self):
        assert is_dominated((2, 2), (1, 2))
        assert not is_dominated((1, 2), (1, 2))
        assert not is_dominated((1, 3), (2, 1))
