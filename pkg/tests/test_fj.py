"""Final-round evaluation, regions, rule-based bets, best response and
historical replacement."""

import numpy as np
import pytest

from quizstrat.correlated import symmetric_rho_matrix
from quizstrat.fj import (
    FJRecord,
    FJSituation,
    best_response_fj_bet,
    classify_region,
    evaluate_fj_exact,
    historical_replacement,
    record_winners,
    rule_based_fj_bet,
)


class TestClassifyRegion:
    def test_two_thirds_breakpoints(self):
        r = classify_region(10000, 7000, 3000)
        assert r.two_thirds_available
        assert not r.b_covers_overtake
        assert r.b_keepout_c

    def test_lock_tie(self):
        r = classify_region(10000, 5000, 2000)
        assert r.lock_tie and not r.lock

    def test_equal_spacing_boundary(self):
        assert classify_region(9000, 6000, 3000).equal_spacing_side == 0

    def test_scale_invariance(self):
        base = classify_region(9100, 6100, 2700)
        for k in (2, 3, 17):
            assert classify_region(9100 * k, 6100 * k, 2700 * k) == base

    def test_c_flags(self):
        r = classify_region(10000, 8000, 4500)
        assert r.c_alive and r.c_reaches_2ab
        assert not r.c_overtakes_a
        r2 = classify_region(10000, 9000, 6300)
        assert r2.c_overtakes_a and r2.c_two_thirds_of_b


class TestEvaluateExact:
    def test_lockout_leader_certain(self):
        win = evaluate_fj_exact((10000, 4000, 3000), (1000, 4000, 3000),
                                (0.5, 0.5, 0.5), symmetric_rho_matrix(0.3))
        assert win[0] == pytest.approx(1.0)

    def test_lock_tie_shared_win(self):
        # leader stands pat; second bets everything: second wins iff right
        win = evaluate_fj_exact((10000, 5000, 2000), (0, 5000, 0),
                                (0.5, 0.6, 0.5), symmetric_rho_matrix(0.0))
        assert win[0] == pytest.approx(1.0)
        assert win[1] == pytest.approx(0.6, abs=1e-9)

    def test_symmetry(self):
        win = evaluate_fj_exact((8000, 8000, 8000), (4000, 4000, 4000),
                                (0.5, 0.5, 0.5), symmetric_rho_matrix(0.3))
        assert np.allclose(win, win[0], atol=1e-4)

    def test_weights_sum_and_bounds(self):
        win = evaluate_fj_exact((9000, 7000, 2000), (5000, 7000, 2000),
                                (0.6, 0.5, 0.5), symmetric_rho_matrix(0.3))
        assert ((win >= 0) & (win <= 1)).all()

    def test_barred_negative_player(self):
        win = evaluate_fj_exact((9000, 7000, -500), (5000, 7000, 0),
                                (0.6, 0.5, 0.9), symmetric_rho_matrix(0.0))
        assert win[2] == 0.0

    def test_illegal_wager_rejected(self):
        with pytest.raises(ValueError):
            evaluate_fj_exact((9000, 7000, 100), (9500, 0, 0),
                              (0.5, 0.5, 0.5), symmetric_rho_matrix(0.0))


class TestRuleBased:
    def test_b_quoted_rule(self):
        # B >= 2A/3 and B < 2C: cover the doubled C when it fits the
        # two-thirds cap, otherwise bankroll
        sit = FJSituation(scores=(10000, 7000, 4000), my_role="B", my_confidence=0.5)
        assert rule_based_fj_bet(sit) == 1000  # 2C-B = 1000 <= 3B-2A = 1000

    def test_b_bankroll_when_cover_exceeds_cap(self):
        sit = FJSituation(scores=(10000, 7000, 4600), my_role="B", my_confidence=0.5)
        assert rule_based_fj_bet(sit) == 7000  # 2C-B = 2200 > 3B-2A = 1000

    def test_a_cover(self):
        sit = FJSituation(scores=(10000, 7000, 1000), my_role="A", my_confidence=0.5)
        assert rule_based_fj_bet(sit) == 4000

    def test_a_lock_tie_zero(self):
        sit = FJSituation(scores=(10000, 5000, 1000), my_role="A", my_confidence=0.5)
        assert rule_based_fj_bet(sit) == 0

    def test_a_locked_safe(self):
        sit = FJSituation(scores=(10000, 4000, 1000), my_role="A", my_confidence=0.5)
        bet = rule_based_fj_bet(sit)
        assert 10000 - bet > 8000

    def test_a_anti_two_thirds_full_mode(self):
        sit = FJSituation(scores=(10000, 7000, 1000), my_role="A", my_confidence=0.2)
        assert rule_based_fj_bet(sit, mode="full") == 2000  # 3A - 4B
        # confident leader still covers
        sit2 = FJSituation(scores=(10000, 7000, 1000), my_role="A", my_confidence=0.7)
        assert rule_based_fj_bet(sit2, mode="full") == 4000

    def test_c_minimum_rational(self):
        sit = FJSituation(scores=(10000, 8000, 3000), my_role="C", my_confidence=0.5)
        assert rule_based_fj_bet(sit) == 2 * 2000 - 3000

    def test_c_stay_above(self):
        sit = FJSituation(scores=(10000, 9000, 5000), my_role="C", my_confidence=0.5)
        bet = rule_based_fj_bet(sit)
        assert 5000 - bet >= 2 * 1000

    def test_scale_covariance(self):
        sit1 = FJSituation(scores=(10000, 7000, 4000), my_role="B", my_confidence=0.5)
        sit2 = FJSituation(scores=(20000, 14000, 8000), my_role="B", my_confidence=0.5)
        assert 2 * rule_based_fj_bet(sit1) == rule_based_fj_bet(sit2)


class TestBestResponse:
    def test_lockout_band_certain(self):
        sit = FJSituation(scores=(10000, 4000, 1000), my_role="A",
                          my_confidence=0.5)
        curve = best_response_fj_bet(sit, n_samples=800, rng=np.random.default_rng(0))
        sel = curve.bets <= 10000 - 2 * 4000 - 1
        assert np.allclose(curve.equity[sel], 1.0)

    def test_lock_tie_zero_guarantees(self):
        sit = FJSituation(scores=(10000, 5000, 2000), my_role="A", my_confidence=0.5)
        curve = best_response_fj_bet(sit, n_samples=2000, rng=np.random.default_rng(1))
        assert curve.equity[curve.bets == 0][0] == pytest.approx(1.0)
        assert curve.best_bet == 0

    def test_never_forfeits_lockout(self):
        sit = FJSituation(scores=(10000, 4000, 1000), my_role="A", my_confidence=0.3)
        curve = best_response_fj_bet(sit, n_samples=2000, rng=np.random.default_rng(2))
        assert curve.best_bet <= 10000 - 2 * 4000 - 1

    def test_curve_in_unit_range_and_reproducible(self):
        sit = FJSituation(scores=(10000, 8000, 3000), my_role="B", my_confidence=0.5)
        c1 = best_response_fj_bet(sit, n_samples=1500, rng=np.random.default_rng(3))
        c2 = best_response_fj_bet(sit, n_samples=1500, rng=np.random.default_rng(3))
        assert np.array_equal(c1.equity, c2.equity)
        assert ((c1.equity >= 0) & (c1.equity <= 1)).all()

    def test_anti_two_thirds_appears_at_low_confidence(self):
        """As A with B in the two-thirds window and weak confidence, small
        counter bets should be near-optimal against the shipped B model."""
        sit = FJSituation(scores=(10000, 7000, 1000), my_role="A",
                          my_confidence=0.25)
        curve = best_response_fj_bet(sit, n_samples=8000,
                                     rng=np.random.default_rng(4), step=100)
        anti_cap = 3 * 10000 - 4 * 7000  # 2000
        anti_best = curve.equity[curve.bets <= anti_cap].max()
        cover_eq = curve.equity[curve.bets == 4000][0]
        assert anti_best > cover_eq


class TestHistoricalReplacement:
    @staticmethod
    def synthetic_records(n=400, seed=0):
        rng = np.random.default_rng(seed)
        from quizstrat.contestants import human_fj_bet
        from quizstrat.correlated import pair_joint
        recs = []
        while len(recs) < n:
            a = int(rng.integers(8000, 30000))
            b = int(rng.integers(a // 2 + 1, a + 1))
            c = int(rng.integers(1, b + 1))
            bets = (
                human_fj_bet("A", (a, b, c), rng),
                human_fj_bet("B", (a, b, c), rng),
                human_fj_bet("C", (a, b, c), rng),
            )
            right = tuple(bool(rng.uniform() < 0.5) for _ in range(3))
            recs.append(FJRecord(scores=(a, b, c), bets=bets, right=right))
        return recs

    def test_identity_replacement(self):
        recs = self.synthetic_records()
        for role, idx in (("A", 0), ("B", 1), ("C", 2)):
            out = historical_replacement(
                recs, lambda sit, rec: rec.bets["ABC".index(sit.my_role)], role
            )
            assert out["raw_win_rate"] == out["replaced_win_rate"]

    def test_rule_based_b_improves_on_model_mixture(self):
        recs = self.synthetic_records(n=4000, seed=1)
        out = historical_replacement(
            recs, lambda sit, rec: rule_based_fj_bet(sit), "B"
        )
        assert out["replaced_win_rate"] >= out["raw_win_rate"]

    def test_locked_records_skipped(self):
        recs = [FJRecord(scores=(10000, 4000, 1000), bets=(0, 0, 0),
                         right=(True, True, True))]
        out = historical_replacement(recs, lambda sit, rec: 0, "A")
        assert out["n"] == 0 and out["skipped"] == 1

    def test_record_winners_ties(self):
        assert record_winners((10, 10, 3), (0, 0, 0), (True, True, True)) == {0, 1}
