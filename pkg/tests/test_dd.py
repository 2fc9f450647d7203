"""DD wagering: confidence table, risk controls, blend identity."""

import numpy as np
import pytest

from quizstrat.contestants import PRESETS
from quizstrat.dd import (
    InCategoryConfidenceTable,
    RiskParams,
    ROW_DD_ACCURACY,
    bet_grid,
    endgame_mc_bet,
    in_category_confidence,
    select_dd_bet,
)
from quizstrat.gse import GameStateEvaluator, state_features
from quizstrat.rollout import SeatModel


class TestConfidenceTable:
    def test_four_for_four_anchors(self):
        assert InCategoryConfidenceTable.standard().confidence(4, 0) == pytest.approx(0.75, abs=1e-9)
        assert InCategoryConfidenceTable.conservative().confidence(4, 0) == pytest.approx(0.718, abs=1e-9)

    def test_row_fallbacks(self):
        t = InCategoryConfidenceTable.standard()
        assert t.confidence(0, 0, row=2, round_no=2) == 0.72
        assert t.confidence(0, 0, row=5, round_no=2) == 0.57

    def test_monotone(self):
        t = InCategoryConfidenceTable.standard()
        for r in range(4):
            assert t.confidence(r + 1, 0) > t.confidence(r, 0)
        for w in range(3):
            assert t.confidence(1, w + 1) < t.confidence(1, w)

    def test_counts_validated(self):
        t = InCategoryConfidenceTable.standard()
        with pytest.raises(ValueError):
            t.confidence(3, 2)
        with pytest.raises(ValueError):
            t.confidence(-1, 0)

    def test_module_level_wrapper(self):
        t = InCategoryConfidenceTable.standard()
        assert in_category_confidence(t, 4, 0) == t.confidence(4, 0)


class TestBetGrid:
    def test_endpoints_present(self):
        g = bet_grid(5, 11000, 100)
        assert g[0] == 5 and g[-1] == 11000

    def test_within_range(self):
        g = bet_grid(5, 777, 100)
        assert (g >= 5).all() and (g <= 777).all() and 777 in g


class TestSelectDDBet:
    @staticmethod
    def monotone_evaluator():
        """An evaluator that strictly prefers more money."""
        ev = GameStateEvaluator.fresh(hidden=4, seed=0)
        ev.w1 = np.zeros_like(ev.w1)
        ev.w1[0, 0] = 2.0  # own score feature
        ev.b1 = np.zeros_like(ev.b1)
        ev.w2 = np.zeros_like(ev.w2)
        ev.w2[0] = 4.0
        ev.b2 = 0.0
        return ev

    def test_blend_identity_bitexact(self):
        ev = select_dd_bet(self.monotone_evaluator(), (11000, 4200, 4200), 0,
                           0.75, 2, 0, 20, 20000)
        assert np.array_equal(
            ev.blended, 0.75 * ev.equity_right + 0.25 * ev.equity_wrong
        )

    def test_certain_confidence_maxes_out(self):
        ev = select_dd_bet(self.monotone_evaluator(), (11000, 4200, 4200), 0,
                           1.0, 2, 0, 20, 20000, risk=RiskParams.neutral())
        assert ev.chosen_bet == 11000

    def test_risk_neutral_recovery(self):
        ev = select_dd_bet(self.monotone_evaluator(), (8000, 9000, 2000), 0,
                           0.7, 2, 0, 10, 9000, risk=RiskParams.neutral())
        assert ev.chosen_bet == ev.risk_neutral_bet
        assert ev.allowed.all()

    def test_downside_filter_enforced(self):
        risk = RiskParams(volatility_coefficient=0.0, downside_cap=0.08)
        ev = select_dd_bet(self.monotone_evaluator(), (8000, 9000, 2000), 0,
                           0.7, 2, 0, 10, 9000, risk=risk)
        downside = ev.equity_wrong[0] - ev.equity_wrong
        chosen_idx = int(np.where(ev.bets == ev.chosen_bet)[0][0])
        assert downside[chosen_idx] <= 0.08 + 1e-12

    def test_bet_monotone_in_confidence(self):
        ev_net = self.monotone_evaluator()
        bets = []
        for conf in (0.45, 0.55, 0.65, 0.75, 0.85):
            ev = select_dd_bet(ev_net, (11000, 4200, 4200), 0, conf, 2,
                               0, 20, 20000, risk=RiskParams.neutral())
            bets.append(ev.chosen_bet)
        assert all(b2 >= b1 for b1, b2 in zip(bets, bets[1:]))


class TestEndgameMC:
    def test_blend_identity_and_seed_reproducibility(self):
        human = SeatModel.human(PRESETS["average"])
        seats = [human, human, human]
        a = endgame_mc_bet((9000, 11000, 4000), 0, 0.6, seats, 2,
                           [(0, 1), (1, 2)], n_trials=4000, seed=3, step=1000)
        b = endgame_mc_bet((9000, 11000, 4000), 0, 0.6, seats, 2,
                           [(0, 1), (1, 2)], n_trials=4000, seed=3, step=1000)
        assert np.array_equal(a.blended, b.blended)
        assert np.array_equal(a.blended, 0.6 * a.equity_right + 0.4 * a.equity_wrong)
