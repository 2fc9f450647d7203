"""Threshold-Beta fits and the correlated-confidence copula."""

import numpy as np
import pytest

from quizstrat.confidence import (
    calibrate_copula,
    copula_confidence_draw,
    fit_confidence_beta,
    fit_confidence_beta_fixed_threshold,
    _pair_latent,
)
from quizstrat.correlated import empirical_binary_corr


class TestBetaFit:
    def test_average_contestant_anchor(self):
        m = fit_confidence_beta(0.61, 0.87)
        assert m.beta_alpha == pytest.approx(0.69, abs=0.02)
        assert m.beta_beta == pytest.approx(0.40, abs=0.02)
        assert m.buzz_threshold == pytest.approx(0.572, abs=0.005)

    def test_moment_conditions_tight(self):
        for b, p in [(0.61, 0.87), (0.80, 0.89), (0.855, 0.915), (0.5, 0.8)]:
            m = fit_confidence_beta(b, p)
            assert m.attempt_rate == pytest.approx(b, abs=1e-4)
            assert m.precision == pytest.approx(p, abs=1e-4)

    def test_high_attempt_rate_drives_threshold_down(self):
        t_high = fit_confidence_beta(0.95, 0.75).buzz_threshold
        t_low = fit_confidence_beta(0.55, 0.75).buzz_threshold
        assert t_high < t_low and t_high < 0.35

    def test_champion_sampling_check(self):
        m = fit_confidence_beta(0.80, 0.89)
        rng = np.random.default_rng(0)
        x = m.sample(rng, 1_000_000)
        att = x > m.buzz_threshold
        assert att.mean() == pytest.approx(0.80, abs=0.002)
        assert x[att].mean() == pytest.approx(0.89, abs=0.002)

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            fit_confidence_beta(0.61, 0.3)
        with pytest.raises(ValueError):
            fit_confidence_beta(1.2, 0.9)

    def test_fixed_threshold_fit(self):
        m = fit_confidence_beta_fixed_threshold(0.70, 0.86, 0.5)
        assert m.buzz_threshold == 0.5
        assert m.attempt_rate == pytest.approx(0.70, abs=1e-6)
        assert m.precision == pytest.approx(0.86, abs=1e-6)


class TestCopula:
    def test_zero_latents_give_uncorrelated_buzzing(self):
        m = fit_confidence_beta(0.61, 0.87)
        rng = np.random.default_rng(1)
        conf, rights = copula_confidence_draw(
            [m] * 3, np.eye(3), np.eye(3), rng, 300_000
        )
        att = conf > m.buzz_threshold
        assert abs(empirical_binary_corr(att[:, 0], att[:, 1])) < 0.01
        assert att.mean() == pytest.approx(0.61, abs=0.005)

    def test_calibration_hits_buzz_target(self):
        m = fit_confidence_beta(0.61, 0.87)
        cal = calibrate_copula(m, 0.2, 0.0, n=150_000)
        rng = np.random.default_rng(2)
        conf, _ = copula_confidence_draw(
            [m] * 3, _pair_latent(cal.confidence_correlation), np.eye(3),
            rng, 400_000,
        )
        att = conf > m.buzz_threshold
        assert empirical_binary_corr(att[:, 0], att[:, 1]) == pytest.approx(0.2, abs=0.015)

    def test_posterior_drop_anchor(self):
        """Initial confidence near 0.8 falls to about one half after both
        opponents miss, at the published noise correlation."""
        m = fit_confidence_beta(0.61, 0.87)
        rng = np.random.default_rng(3)
        conf, rights = copula_confidence_draw(
            [m] * 3, _pair_latent(0.316), _pair_latent(0.4), rng, 3_000_000
        )
        att = conf > m.buzz_threshold
        sel = (np.abs(conf[:, 0] - 0.8) < 0.02) & att[:, 1] & att[:, 2]
        sel &= ~rights[:, 1] & ~rights[:, 2]
        assert rights[sel, 0].mean() == pytest.approx(0.5, abs=0.05)

    def test_precision_given_buzz(self):
        m = fit_confidence_beta(0.61, 0.87)
        rng = np.random.default_rng(4)
        conf, rights = copula_confidence_draw(
            [m] * 3, _pair_latent(0.316), _pair_latent(0.4), rng, 400_000
        )
        att = conf > m.buzz_threshold
        assert rights[att[:, 0], 0].mean() == pytest.approx(0.87, abs=0.005)
