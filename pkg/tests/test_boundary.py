import numpy as np
import pytest

from levyinvest.boundary import (BoundaryTable, ExtrapolationWarning,
                                 ces_boundary_constant, ces_polynomial_constant,
                                 closed_form_boundary_table, cobb_douglas_boundary,
                                 integral_equation_residual, log_boundary,
                                 marginal_gap, solve_boundary_grid,
                                 solve_boundary_point)
from levyinvest.errors import BracketFailure, DomainError, MonotonicityViolation
from levyinvest.levy import LevyModel
from levyinvest.profit import ces, cobb_douglas, log_profit
from levyinvest.wiener_hopf import exact_factors, inf_moment, sample_triplet

BD = LevyModel.brownian(0.0, np.sqrt(2.0))
R = 2.0
WH = exact_factors(BD, R)
CD = cobb_douglas(0.5, 0.5)


class TestBoundaryTable:
    def test_interpolation_hits_nodes(self):
        tab = BoundaryTable(grid=np.array([0.0, 1.0, 2.0]),
                            values=np.array([1.0, 2.0, 4.0]),
                            provenance="test")
        for u, v in zip(tab.grid, tab.values):
            assert tab(u) == pytest.approx(v)

    def test_log_linear_between_nodes(self):
        tab = BoundaryTable(grid=np.array([0.0, 1.0]),
                            values=np.array([1.0, np.e]),
                            provenance="test")
        assert tab(0.5) == pytest.approx(np.exp(0.5))

    def test_extrapolation_warns(self):
        tab = BoundaryTable(grid=np.array([0.0, 1.0]),
                            values=np.array([1.0, np.e]),
                            provenance="test")
        with pytest.warns(ExtrapolationWarning):
            high = tab(3.0)
        assert high == pytest.approx(np.exp(3.0))

    def test_vector_and_scalar_calls(self):
        tab = BoundaryTable(grid=np.array([0.0, 1.0]),
                            values=np.array([1.0, 2.0]),
                            provenance="test")
        assert np.isscalar(float(tab(0.5)))
        out = tab(np.array([0.0, 1.0]))
        assert out.shape == (2,)

    def test_decreasing_values_rejected(self):
        with pytest.raises(MonotonicityViolation):
            BoundaryTable(grid=np.array([0.0, 1.0]),
                          values=np.array([2.0, 1.0]), provenance="test")

    def test_unsorted_grid_rejected(self):
        with pytest.raises(MonotonicityViolation):
            BoundaryTable(grid=np.array([1.0, 0.0]),
                          values=np.array([1.0, 2.0]), provenance="test")

    def test_nonpositive_values_rejected(self):
        with pytest.raises(MonotonicityViolation):
            BoundaryTable(grid=np.array([0.0, 1.0]),
                          values=np.array([0.0, 1.0]), provenance="test")


class TestMarginalGap:
    def test_sign_structure(self):
        # large capacity -> expected marginal profit below r; tiny -> above
        lo, _ = marginal_gap(CD, WH, 0.0, 1e3)
        hi, _ = marginal_gap(CD, WH, 0.0, 1e-6)
        assert lo < 0 < hi

    def test_zero_at_closed_form_root(self):
        b = cobb_douglas_boundary(CD, WH, 0.7)
        gap, _ = marginal_gap(CD, WH, 0.7, b)
        assert gap == pytest.approx(0.0, abs=1e-9)

    def test_capacity_must_be_positive(self):
        with pytest.raises(DomainError):
            marginal_gap(CD, WH, 0.0, 0.0)


class TestSolvers:
    def test_point_matches_closed_form(self):
        for u in (-1.0, 0.0, 1.3):
            got = solve_boundary_point(CD, WH, u)
            assert got == pytest.approx(cobb_douglas_boundary(CD, WH, u), rel=1e-8)

    def test_grid_matches_closed_form(self):
        tab = solve_boundary_grid(CD, WH, -1.0, 1.0, 9)
        ref = closed_form_boundary_table(CD, WH, -1.0, 1.0, 9)
        assert np.allclose(tab.values, ref.values, rtol=1e-8)
        assert tab.provenance == "generic_solver"
        assert tab.ses is None

    def test_mc_mode_keeps_ses(self):
        pool = sample_triplet(BD, R, 20000, np.random.default_rng(0))
        tab = solve_boundary_grid(CD, pool, -0.5, 0.5, 5)
        assert tab.ses is not None and (np.asarray(tab.ses) > 0).all()

    def test_rate_below_kappa_cannot_bracket(self):
        p = ces(0.5, 0.5)  # kappa = 0.25
        wh_low = exact_factors(BD, 0.2)
        with pytest.raises(BracketFailure):
            solve_boundary_point(p, wh_low, 0.0)

    def test_grid_needs_two_points(self):
        with pytest.raises(DomainError):
            solve_boundary_grid(CD, WH, -1.0, 1.0, 1)


class TestClosedForms:
    def test_cobb_douglas_formula(self):
        # b(u) = (theta e^u)^(alpha / (1 - beta)), theta = (beta E e^{alpha I} / r)^(1/alpha)
        e_ai = inf_moment(WH, 0.5)
        theta = (0.5 * e_ai / R) ** 2.0
        assert cobb_douglas_boundary(CD, WH, 0.0) == pytest.approx(theta, rel=1e-12)
        assert cobb_douglas_boundary(CD, WH, 1.0) == pytest.approx(theta * np.e,
                                                                   rel=1e-12)

    def test_log_boundary_formula(self):
        p = log_profit()
        assert log_boundary(p, WH, 0.3) == pytest.approx(
            inf_moment(WH, 1.0) * np.exp(0.3) / R, rel=1e-12)

    def test_ces_constant_solves_its_equation(self):
        p = ces(0.5, 0.5)
        k = ces_boundary_constant(p, WH)
        gap, _ = marginal_gap(p, WH, 0.0, k)
        assert gap == pytest.approx(0.0, abs=1e-8)

    def test_ces_polynomial_matches_quadrature(self):
        p = ces(0.5, 0.5)
        k_quad = ces_boundary_constant(p, WH)
        moments = [inf_moment(WH, 0.5)]
        k_poly = ces_polynomial_constant(0.5, 2, moments, R)
        assert k_poly == pytest.approx(k_quad, rel=1e-8)

    def test_ces_needs_rate_above_kappa(self):
        p = ces(0.5, 0.5)
        with pytest.raises(DomainError):
            ces_boundary_constant(p, exact_factors(BD, 0.2))

    def test_closed_form_table_provenances(self):
        assert closed_form_boundary_table(CD, WH, -1, 1, 5).provenance \
            == "cobb_douglas_closed_form"
        assert closed_form_boundary_table(ces(0.5, 0.5), WH, -1, 1, 5).provenance \
            == "ces_closed_form"
        assert closed_form_boundary_table(log_profit(), WH, -1, 1, 5).provenance \
            == "log_closed_form"


class TestIntegralEquation:
    def test_true_boundary_residual_small(self):
        tab = closed_form_boundary_table(CD, WH, -2.0, 2.0, 41)
        res, se = integral_equation_residual(tab, CD, BD, R, 0.5, 30000,
                                             np.random.default_rng(1))
        assert se > 0 and abs(res) < 3.5 * se

    def test_scaled_boundary_rejected(self):
        tab = closed_form_boundary_table(CD, WH, -2.0, 2.0, 41)
        doubled = BoundaryTable(grid=tab.grid, values=2.0 * np.asarray(tab.values),
                                provenance="scaled")
        res, se = integral_equation_residual(doubled, CD, BD, R, 0.5, 30000,
                                             np.random.default_rng(2))
        assert res < -3.0 * se
