import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import agmx
from agmx import MethodKind, RateRegime, SolverConfig
from agmx.analysis import (
    COMPARISON_CSV_HEADER,
    RateFitError,
    compare,
    estimate_rate,
    find_minimizer,
    rows_to_csv,
    theoretical_rate,
)

from _helpers import diagonal_quadratic


class TestFindMinimizer:
    def test_quadratic_returns_center_exactly(self):
        center = np.array([2.0, -1.0, 0.5])
        f = diagonal_quadratic([1.0, 2.0, 3.0], center=center)
        np.testing.assert_array_equal(find_minimizer(f), center)

    def test_logistic_gradient_ratio(self, logistic_default):
        f = logistic_default
        g0 = np.linalg.norm(f.gradient(np.zeros(f.dim)))
        ghat = np.linalg.norm(f.gradient(f.minimizer))
        assert ghat <= 1e-12 * g0

    def test_piecewise_oracle_self_consistency(self, piecewise_default):
        # restarting NAG from the oracle point barely moves over 100 steps
        f = piecewise_default
        mu, L = f.mu, f.lipschitz
        m = (np.sqrt(L / mu) - 1.0) / (np.sqrt(L / mu) + 1.0)
        x = f.minimizer.copy()
        y = x.copy()
        for _ in range(100):
            xn = y - f.gradient(y) / L
            y = xn + m * (xn - x)
            x = xn
        assert np.linalg.norm(x - f.minimizer) <= 1e-6


class TestEstimateRate:
    def test_exact_geometric(self):
        e = 0.25 ** np.arange(60)
        est = estimate_rate(e)
        assert est.rate == pytest.approx(0.25, rel=1e-12)
        assert est.fit_residual <= 1e-12

    def test_constant_sequence(self):
        est = estimate_rate(np.ones(40))
        assert est.rate == 1.0

    def test_floor_truncation(self):
        e = np.concatenate([0.5 ** np.arange(50), np.full(10, 1e-40)])
        est = estimate_rate(e, tail_fraction=0.5)
        assert est.rate == pytest.approx(0.5, rel=1e-10)
        assert est.window[1] <= 49

    def test_window_spans_at_least_ten_steps(self):
        est = estimate_rate(0.9 ** np.arange(20), tail_fraction=0.5)
        assert est.window[1] - est.window[0] >= 10

    def test_errors(self):
        with pytest.raises(RateFitError):
            estimate_rate(0.5 ** np.arange(10))
        with pytest.raises(RateFitError):
            estimate_rate(np.concatenate([[1.0], np.full(30, -1.0)]))
        with pytest.raises(RateFitError):
            estimate_rate(np.ones(30), tail_fraction=0.0)
        with pytest.raises(RateFitError):
            # only 5 usable points survive the floor cut
            estimate_rate(np.concatenate([np.ones(5), np.full(20, 1e-40)]))

    @given(scale=st.floats(1e-8, 1e8))
    @settings(deadline=None, max_examples=40)
    def test_scale_invariance(self, scale):
        e = 0.7 ** np.arange(45)
        base = estimate_rate(e).rate
        scaled = estimate_rate(scale * e).rate
        assert scaled == pytest.approx(base, abs=1e-12)


class TestTheoreticalRate:
    def test_catalog_values(self):
        assert theoretical_rate(MethodKind.GD, 1.0) == 0.0
        assert theoretical_rate(MethodKind.NAG, 100.0) == pytest.approx(0.9)
        assert theoretical_rate(MethodKind.TM, 100.0) == pytest.approx(0.8)
        assert theoretical_rate(
            MethodKind.HNAG, 3150.0, RateRegime.QUADRATIC_OR_ASYMPTOTIC
        ) == pytest.approx(0.95202, abs=5e-6)

    def test_kappa_below_one_rejected(self):
        with pytest.raises(ValueError):
            theoretical_rate(MethodKind.GD, 0.5)

    @pytest.mark.parametrize("kappa", [100.0, 400.0, 1e4])
    def test_ordering_at_large_kappa(self, kappa):
        gd = theoretical_rate(MethodKind.GD, kappa)
        nag = theoretical_rate(MethodKind.NAG, kappa)
        hnag = theoretical_rate(MethodKind.HNAG, kappa)
        tm = theoretical_rate(MethodKind.TM, kappa)
        plus = theoretical_rate(MethodKind.HNAG_PLUS, kappa)
        asym = theoretical_rate(MethodKind.HNAG, kappa, RateRegime.QUADRATIC_OR_ASYMPTOTIC)
        assert gd > nag > hnag > max(tm, plus)
        assert min(tm, plus) > asym


class TestCompare:
    def test_kappa_one_quadratic(self):
        f = diagonal_quadratic([3.0, 3.0], center=np.array([1.0, 1.0]))
        rows = compare(f, [MethodKind.GD], SolverConfig(method=MethodKind.GD),
                       np.array([5.0, -4.0]))
        assert len(rows) == 1
        assert rows[0].iterations <= 3
        assert np.isnan(rows[0].measured_rate)

    def test_deterministic_iteration_counts(self, lap9):
        x0 = agmx.Rng(42).uniform(lap9.dim)
        methods = [MethodKind.GD, MethodKind.NAG, MethodKind.HNAG]
        cfg = SolverConfig(method=MethodKind.GD)
        a = compare(lap9, methods, cfg, x0)
        b = compare(lap9, methods, cfg, x0)
        assert [r.iterations for r in a] == [r.iterations for r in b]
        assert [r.measured_rate for r in a] == [r.measured_rate for r in b]

    def test_csv_shape(self, lap9):
        x0 = agmx.Rng(42).uniform(lap9.dim)
        rows = compare(lap9, [MethodKind.GD, MethodKind.NAG],
                       SolverConfig(method=MethodKind.GD), x0)
        text = rows_to_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0] == COMPARISON_CSV_HEADER
        assert len(lines) == 3
        assert lines[1].startswith("gd,")

    @pytest.mark.filterwarnings("ignore:overflow")
    def test_divergence_recorded_not_fatal(self):
        # understated smoothness constant makes GD's step explosive
        lying = agmx.SimpleObjective(
            value_fn=lambda x: 50.0 * float(x @ x),
            grad_fn=lambda x: 100.0 * x,
            dim=2, mu=1.0, lipschitz=2.0, minimizer=np.zeros(2),
        )
        rows = compare(lying, [MethodKind.GD, MethodKind.NAG],
                       SolverConfig(method=MethodKind.GD, max_iter=2000),
                       np.ones(2))
        assert rows[0].status == "diverged"
        assert len(rows) == 2
