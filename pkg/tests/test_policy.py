import numpy as np
import pytest

from levyinvest.boundary import closed_form_boundary_table
from levyinvest.errors import ConditionViolation, DomainError
from levyinvest.levy import LevyModel, SamplePath, laplace_exponent
from levyinvest.policy import (StoppingRule, compare_policies, default_t_max,
                               evaluate_profit, foc_residuals, simulate_policy,
                               stopping_value)
from levyinvest.profit import cobb_douglas, custom
from levyinvest.wiener_hopf import exact_factors

BD = LevyModel.brownian(0.0, np.sqrt(2.0))
R = 2.0
CD = cobb_douglas(0.5, 0.5)
TABLE = closed_form_boundary_table(CD, exact_factors(BD, R), -2.0, 2.0, 41)
STABLE = LevyModel.stable(0.0, 1.5, 0.5)
N = 4096
H = 0.02
TM = 2.0


def make_path(values, dt=1.0):
    values = np.asarray(values, dtype=float)
    times = dt * np.arange(len(values))
    return SamplePath(times=times, values=values, jump_times=np.array([]))


class TestSimulatePolicy:
    def test_left_open_running_supremum(self):
        path = make_path([0.0, 0.5, -0.2, 1.0])
        c = simulate_policy(lambda u: np.exp(u), 0.0, 1.2, path)
        assert c[0] == 1.2
        assert c[1] == pytest.approx(max(1.2, 1.0))
        assert c[2] == pytest.approx(max(1.2, np.exp(0.5)))
        assert c[3] == pytest.approx(max(1.2, np.exp(0.5)))

    def test_high_start_never_invests(self):
        path = make_path([0.0, 0.1, 0.2])
        c = simulate_policy(lambda u: np.exp(u), 0.0, 50.0, path)
        assert (c == 50.0).all()

    def test_nondecreasing(self):
        rng = np.random.default_rng(0)
        path = make_path(np.cumsum(rng.normal(size=200)) * 0.1, dt=0.01)
        c = simulate_policy(TABLE, 0.0, 0.01, path)
        assert (np.diff(c) >= 0).all()

    def test_capacity_must_be_positive(self):
        with pytest.raises(DomainError):
            simulate_policy(TABLE, 0.0, 0.0, make_path([0.0, 1.0]))


class TestStoppingRule:
    def test_kinds_validated(self):
        with pytest.raises(DomainError):
            StoppingRule("whenever", 1.0)
        with pytest.raises(DomainError):
            StoppingRule.fixed(-1.0)

    def test_labels(self):
        assert StoppingRule.fixed(0.5).label() == "t=0.5"
        assert ">=" in StoppingRule.hit_above(0.3).label()
        assert "<=" in StoppingRule.hit_below(-0.3).label()


class TestEvaluateProfit:
    def test_zero_policy_matches_closed_form(self):
        # boundary pinned far below y: capacity never moves, so the value is
        # the discounted flow of pi(z, y) with its geometric-Brownian moment
        ev = evaluate_profit(CD, BD, R, lambda u: np.full_like(u, 1e-12), 0.0, 1.0,
                             20000, np.random.default_rng(1), step=H, t_max=TM)
        psi = laplace_exponent(BD, CD.alpha)
        exact = (1 - np.exp(-(R - psi) * ev.t_max)) / (R - psi)
        assert ev.pv_investment == 0.0
        assert abs(ev.j_value - exact) < 4 * ev.j_se

    def test_tail_bound_formula(self):
        ev = evaluate_profit(CD, BD, R, TABLE, 0.0, 1.0, N,
                             np.random.default_rng(2), step=H, t_max=TM)
        assert ev.tail_bound == pytest.approx(np.exp(-(R - 1.0) * ev.t_max))

    def test_worker_invariance(self):
        a = evaluate_profit(CD, BD, R, TABLE, 0.0, 0.05, 40000,
                            np.random.default_rng(3), step=H, t_max=TM, workers=1)
        b = evaluate_profit(CD, BD, R, TABLE, 0.0, 0.05, 40000,
                            np.random.default_rng(3), step=H, t_max=TM, workers=4)
        assert a == b

    def test_stable_has_no_certificate(self):
        with pytest.raises(ConditionViolation):
            evaluate_profit(CD, STABLE, 1.0, TABLE, 0.0, 1.0, N,
                            np.random.default_rng(4), step=H, t_max=TM)

    def test_custom_profit_has_no_certificate(self):
        p = custom(lambda z, c: np.sqrt(z * c))
        with pytest.raises(ConditionViolation):
            evaluate_profit(p, BD, R, TABLE, 0.0, 1.0, N,
                            np.random.default_rng(5), step=H, t_max=TM)

    def test_subcritical_rate_rejected(self):
        with pytest.raises(ConditionViolation):
            evaluate_profit(CD, BD, 0.9, TABLE, 0.0, 1.0, N,
                            np.random.default_rng(6), step=H, t_max=TM)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            evaluate_profit(CD, BD, R, TABLE, 0.0, -1.0, N,
                            np.random.default_rng(7), step=H, t_max=TM)
        with pytest.raises(DomainError):
            evaluate_profit(CD, BD, R, TABLE, 0.0, 1.0, 10,
                            np.random.default_rng(8), step=H, t_max=TM)

    def test_default_horizon(self):
        assert default_t_max(R) == pytest.approx(10.0)


class TestComparePolicies:
    def test_base_scale_added_and_paired_zero(self):
        res = compare_policies(CD, BD, R, TABLE, 0.0, 0.05, [0.5, 2.0], N,
                               np.random.default_rng(9), step=H, t_max=TM)
        scales = [row.scale for row in res.rows]
        assert 1.0 in scales
        base = res.rows[scales.index(1.0)]
        assert base.base_minus_this == 0.0 and base.base_minus_this_se == 0.0

    def test_investment_grows_with_scale(self):
        res = compare_policies(CD, BD, R, TABLE, 0.0, 0.01, [0.5, 1.0, 2.0], N,
                               np.random.default_rng(10), step=H, t_max=TM)
        pv = [row.pv_investment for row in sorted(res.rows, key=lambda r: r.scale)]
        assert pv[0] < pv[1] < pv[2]

    def test_scales_validated(self):
        with pytest.raises(DomainError):
            compare_policies(CD, BD, R, TABLE, 0.0, 1.0, [0.5, -1.0], N,
                             np.random.default_rng(11), step=H, t_max=TM)


class TestFOC:
    def test_never_hit_rule_contributes_zero(self):
        rules = (StoppingRule.hit_above(1e9),)
        rep = foc_residuals(CD, BD, R, TABLE, 0.0, 1.0, rules, N,
                            np.random.default_rng(12), step=H, t_max=TM)
        assert rep.entries[0].hit_fraction == 0.0
        assert rep.entries[0].supergradient == 0.0
        assert rep.entries[0].se == 0.0

    def test_fixed_rule_beyond_horizon_rejected(self):
        with pytest.raises(DomainError):
            foc_residuals(CD, BD, R, TABLE, 0.0, 1.0, (StoppingRule.fixed(TM + 1),),
                          N, np.random.default_rng(13), step=H, t_max=TM)

    def test_needs_rules(self):
        with pytest.raises(DomainError):
            foc_residuals(CD, BD, R, TABLE, 0.0, 1.0, (), N,
                          np.random.default_rng(14), step=H, t_max=TM)

    def test_deep_interior_stop_is_strictly_suboptimal(self):
        # stopping late at a fixed time wastes the option value: strongly negative
        bx = float(TABLE(0.0))
        rep = foc_residuals(CD, BD, R, TABLE, 0.0, bx, (StoppingRule.fixed(1.0),),
                            20000, np.random.default_rng(15), step=H, t_max=TM)
        e = rep.entries[0]
        assert e.hit_fraction == 1.0
        assert e.supergradient < -3 * e.se


class TestStoppingValue:
    def test_exactly_one_inside_investment_region(self):
        bx = float(TABLE(0.0))
        v, se = stopping_value(CD, BD, R, TABLE, 0.0, 0.5 * bx, N,
                               np.random.default_rng(16), step=H, t_max=TM)
        assert v == 1.0 and se == 0.0

    def test_below_one_outside(self):
        bx = float(TABLE(0.0))
        v, se = stopping_value(CD, BD, R, TABLE, 0.0, 4.0 * bx, 20000,
                               np.random.default_rng(17), step=H, t_max=TM)
        assert v < 1.0 - 3.0 * se

    def test_worker_invariance(self):
        bx = float(TABLE(0.0))
        args = (CD, BD, R, TABLE, 0.0, 2.0 * bx, 40000)
        a = stopping_value(*args, np.random.default_rng(18), step=H, t_max=TM,
                           workers=1)
        b = stopping_value(*args, np.random.default_rng(18), step=H, t_max=TM,
                           workers=3)
        assert a == b
