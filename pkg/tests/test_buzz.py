"""Event-tree formulas, closed forms, and threshold extraction."""

import numpy as np
import pytest

from quizstrat.buzz import (
    EOC_STATES,
    NEVER_BUZZ,
    BuzzParams,
    ineligible_values,
    live_values_and_thresholds,
    max_delta_E,
    max_delta_thresholds,
    printed_live_values_and_thresholds,
    simplified_threshold,
    uncorrelated_params,
)


def random_E(seed=0, lo=0.0, hi=1.0):
    rng = np.random.default_rng(seed)
    return {s: float(rng.uniform(lo, hi)) for s in EOC_STATES}


class TestStates:
    def test_twenty_states(self):
        assert len(EOC_STATES) == 20
        gains = [s for s in EOC_STATES if 1 in s]
        assert len(gains) == 12


class TestIneligibleValues:
    def test_constant_equities_absorb(self):
        E = {s: 0.37 for s in EOC_STATES}
        p = BuzzParams.from_marginals(0.61, 0.61, 0.2, 0.87, 0.87, 0.2, 0.5, 1 / 3)
        v0, v1, v2 = ineligible_values(E, p)
        assert v0 == pytest.approx(0.37)
        assert v1 == pytest.approx(0.37)
        assert v2 == pytest.approx(0.37)

    def test_max_delta_closed_form_vis1(self):
        E = max_delta_E()
        p = uncorrelated_params(0.61, 0.87, 0.5, 1 / 3)
        _, v1, v2 = ineligible_values(E, p)
        assert v1 == pytest.approx(0.61 - 1 - 2 * 0.61 * 0.87, abs=1e-12)
        assert v2 == pytest.approx(v1, abs=1e-12)

    def test_no_rebounders_sentinel(self):
        E = random_E(1)
        p = BuzzParams.from_marginals(0.0, 0.0, 0.0, 0.9, 0.9, 0.0, 0.5, 1 / 3)
        _, v1, v2 = ineligible_values(E, p)
        assert np.isnan(v1) and np.isnan(v2)

    def test_branch_probabilities_sum_to_one(self):
        """Coefficient audit on the printed ineligible-state formulas."""
        p = BuzzParams.from_marginals(0.61, 0.61, 0.2, 0.87, 0.87, 0.2, 0.5, 1 / 3)
        ones = {s: 1.0 for s in EOC_STATES}
        for v in ineligible_values(ones, p):
            assert v == pytest.approx(1.0, abs=1e-12)


class TestMaxDelta:
    def test_published_average_contestant_values(self):
        ts = max_delta_thresholds(0.61, 0.87, 0.5, 1 / 3)
        assert ts.theta0 == pytest.approx(0.434, abs=0.0005)
        assert ts.theta1 == pytest.approx(0.478, abs=0.0005)
        assert ts.theta2 == pytest.approx(0.478, abs=0.0005)
        assert ts.theta3 == 0.5

    def test_lonely_game_reduces_to_half(self):
        ts = max_delta_thresholds(0.0, 0.5, 0.5, 1 / 3)
        assert ts.theta0 == pytest.approx(0.5, abs=1e-9)
        assert ts.theta1 == pytest.approx(0.5, abs=1e-9)

    def test_simplified_identity(self):
        assert simplified_threshold(0.0325, -0.0096) == pytest.approx(0.436, abs=0.001)
        assert simplified_threshold(0.0325, -0.0086) == pytest.approx(0.442, abs=0.001)

    def test_printed_tree_agrees_within_grid(self):
        """The closed forms reproduce the published-layout tree to one grid
        step on the score-delta objective."""
        E = max_delta_E()
        params = uncorrelated_params(0.61, 0.87, 0.5, 1 / 3)
        _, tree = printed_live_values_and_thresholds(E, params)
        closed = max_delta_thresholds(0.61, 0.87, 0.5, 1 / 3)
        assert abs(tree.theta0 - closed.theta0) <= 0.011
        assert abs(tree.theta1 - closed.theta1) <= 0.011
        assert abs(tree.theta3 - closed.theta3) <= 0.011


class TestTrees:
    def test_constant_equities_make_every_state_indifferent_at_half(self):
        E = {s: 0.37 for s in EOC_STATES}
        # with E constant the only live term is the strategic answer itself,
        # which is value-neutral: thresholds collapse to ties everywhere
        p = BuzzParams.from_marginals(0.61, 0.61, 0.2, 0.87, 0.87, 0.2, 0.5, 1 / 3)
        vals, th = live_values_and_thresholds(E, p)
        for i in range(4):
            diffs = vals.v_buzz[i] - vals.v_nobuzz[i]
            assert np.max(np.abs(diffs)) < 1e-9

    def test_exact_tree_close_to_printed_on_random_equities(self):
        """Root and double-rebound thresholds agree between the exact and
        published-layout trees; the single-rebound states marginalize the
        partner attempt differently by design."""
        p = BuzzParams.from_marginals(0.61, 0.61, 0.2, 0.87, 0.87, 0.2, 0.5, 1 / 3)
        for seed in range(6):
            E = random_E(seed)
            _, t_exact = live_values_and_thresholds(E, p)
            _, t_printed = printed_live_values_and_thresholds(E, p)
            for i in (0, 3):
                a, b = t_exact.as_tuple()[i], t_printed.as_tuple()[i]
                if a == NEVER_BUZZ or b == NEVER_BUZZ:
                    assert a == b
                    continue
                assert abs(a - b) <= 0.06

    def test_threshold_matches_curve_crossing(self):
        """The reported threshold is the first grid point where buzzing is
        at least as good as passing, given a strict improvement exists."""
        p = BuzzParams.from_marginals(0.61, 0.61, 0.2, 0.87, 0.87, 0.2, 0.5, 1 / 3)
        E = random_E(11)
        vals, th = live_values_and_thresholds(E, p)
        for i in range(4):
            t = th.as_tuple()[i]
            gaps = vals.v_buzz[i] - vals.v_nobuzz[i]
            if t == NEVER_BUZZ:
                assert (gaps <= 1e-4 * max(np.abs(vals.v_buzz[i]).max(), 1.0)).all()
            else:
                k = int(round(t / th.grid_step))
                assert gaps[k] >= -1e-4 * max(np.abs(vals.v_buzz[i]).max(), 1.0)

    def test_threshold_decision_function(self):
        from quizstrat.buzz import ThresholdSet
        ts = ThresholdSet(theta0=0.4, theta1=0.6, theta2=0.6, theta3=NEVER_BUZZ)
        assert ts.decision(0, 0.45)
        assert not ts.decision(0, 0.35)
        assert not ts.decision(3, 1.0)
