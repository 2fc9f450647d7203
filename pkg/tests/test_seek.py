"""Bayesian DD-location inference against brute-force enumeration, plus
selection-policy behavior."""

import itertools

import numpy as np
import pytest

from quizstrat.game import N_COLS
from quizstrat.placement import PlacementPrior
from quizstrat.seek import (
    DDBeliefState,
    dd_probability_grid,
    learning_scores,
    observe_dd_found,
    observe_no_dd,
    retain_control_prob,
    select_square,
)


def toy_prior(n_cols, n_rows, seed=0, round_no=2):
    rng = np.random.default_rng(seed)
    cells = [(c, r) for c in range(n_cols) for r in range(1, n_rows + 1)]
    grid = {cell: float(rng.uniform(0.05, 1.0)) for cell in cells}
    return PlacementPrior.from_cell_grids(grid, grid, n_cols=n_cols, n_rows=n_rows)


def brute_force_posterior(prior, round_no, no_dd_cells, found_cells):
    """Enumerate all placements consistent with the observations."""
    if round_no == 1:
        weights = {}
        for cell, w in prior.round1.items():
            if cell in no_dd_cells:
                continue
            if found_cells and cell not in found_cells:
                continue
            weights[cell] = w
        total = sum(weights.values())
        return {c: w / total for c, w in weights.items()}
    weights = {}
    for pair, w in prior.round2_joint.items():
        if any(c in no_dd_cells for c in pair):
            continue
        if any(f not in pair for f in found_cells):
            continue
        weights[pair] = w
    total = sum(weights.values())
    return {p: w / total for p, w in weights.items()}


class TestOracleEquivalence:
    @pytest.mark.parametrize("round_no", [1, 2])
    def test_random_observation_sequences(self, round_no):
        rng = np.random.default_rng(7)
        for trial in range(60):
            n_cols, n_rows = rng.integers(2, 4), rng.integers(2, 4)
            prior = toy_prior(int(n_cols), int(n_rows), seed=trial, round_no=round_no)
            if round_no == 2 and not prior.round2_joint:
                continue
            belief = DDBeliefState.fresh(prior, round_no)
            cells = [(c, r) for c in range(n_cols) for r in range(1, n_rows + 1)]
            rng.shuffle(cells)
            observed_no = []
            for cell in cells[: rng.integers(1, len(cells))]:
                marg = belief.dd_probability_grid().get(cell, 0.0)
                if marg >= 1.0 - 1e-12:
                    continue
                belief = observe_no_dd(belief, cell)
                observed_no.append(cell)
                oracle = brute_force_posterior(prior, round_no, set(observed_no), set())
                if round_no == 1:
                    for c, w in oracle.items():
                        assert belief.marginal[c] == pytest.approx(w, abs=1e-12)
                else:
                    for p, w in oracle.items():
                        assert belief.joint[p] == pytest.approx(w, abs=1e-12)

    def test_zero_stays_zero(self):
        prior = toy_prior(3, 3, seed=1)
        grid = dict(prior.round1)
        dead = next(iter(grid))
        grid[dead] = 0.0
        prior2 = PlacementPrior.from_cell_grids(grid, grid, n_cols=3, n_rows=3)
        belief = DDBeliefState.fresh(prior2, 1)
        for cell in list(grid)[2:4]:
            if cell == dead or belief.marginal[cell] >= 1 - 1e-12:
                continue
            belief = observe_no_dd(belief, cell)
            assert belief.marginal[dead] == 0.0

    def test_round1_two_cell_collapse(self):
        grid = {(0, 1): 0.5, (1, 1): 0.5}
        prior = PlacementPrior.from_cell_grids(grid, {(0, 1): 0.5, (1, 1): 0.5, (0, 2): 0.1},
                                               n_cols=2, n_rows=2)
        belief = DDBeliefState.fresh(prior, 1)
        belief = observe_no_dd(belief, (0, 1))
        assert belief.marginal[(1, 1)] == pytest.approx(1.0)

    def test_order_irrelevance(self):
        prior = toy_prior(3, 3, seed=3)
        b1 = DDBeliefState.fresh(prior, 2)
        b1 = observe_no_dd(observe_no_dd(b1, (0, 1)), (1, 2))
        b2 = DDBeliefState.fresh(prior, 2)
        b2 = observe_no_dd(observe_no_dd(b2, (1, 2)), (0, 1))
        for pair in b1.joint:
            assert b1.joint[pair] == pytest.approx(b2.joint[pair], abs=1e-14)


class TestRound2Structure:
    def test_fresh_grid_sums_to_two(self):
        belief = DDBeliefState.fresh(PlacementPrior.default(), 2)
        assert sum(dd_probability_grid(belief).values()) == pytest.approx(2.0)

    def test_found_column_excluded(self):
        belief = DDBeliefState.fresh(PlacementPrior.default(), 2)
        belief = observe_dd_found(belief, (2, 4))
        grid = dd_probability_grid(belief)
        assert sum(grid.values()) == pytest.approx(1.0)
        assert all(grid[(2, r)] == 0.0 for r in range(1, 6))

    def test_partner_matches_placement_conditional(self):
        prior = PlacementPrior.default()
        belief = observe_dd_found(DDBeliefState.fresh(prior, 2), (2, 4))
        grid = dd_probability_grid(belief)
        # conditional from the prior joint directly
        mass = {}
        for pair, w in prior.round2_joint.items():
            if (2, 4) in pair:
                other = next(c for c in pair if c != (2, 4))
                mass[other] = mass.get(other, 0.0) + w
        total = sum(mass.values())
        for cell, w in mass.items():
            assert grid[cell] == pytest.approx(w / total, abs=1e-12)

    def test_both_found_all_zero(self):
        belief = DDBeliefState.fresh(PlacementPrior.default(), 2)
        belief = observe_dd_found(belief, (2, 4))
        belief = observe_dd_found(belief, (4, 5))
        assert sum(dd_probability_grid(belief).values()) == 0.0

    def test_inconsistent_find_rejected(self):
        belief = DDBeliefState.fresh(PlacementPrior.default(), 2)
        belief = observe_no_dd(belief, (3, 4))
        with pytest.raises(ValueError):
            observe_dd_found(belief, (3, 4))


class TestCalibration:
    def test_predictions_match_sampling(self):
        """Cells binned by predicted p_DD hold DDs at the predicted rate."""
        prior = PlacementPrior.default()
        rng = np.random.default_rng(11)
        preds, hits = [], []
        for _ in range(4000):
            dds = prior.sample(2, rng)
            belief = DDBeliefState.fresh(prior, 2)
            cells = [(c, r) for c in range(6) for r in range(1, 6)]
            rng.shuffle(cells)
            for cell in cells[:10]:
                grid = dd_probability_grid(belief)
                preds.append(grid[cell])
                hits.append(cell in dds)
                if cell in dds:
                    belief = observe_dd_found(belief, cell)
                else:
                    belief = observe_no_dd(belief, cell)
        preds = np.array(preds)
        hits = np.array(hits, dtype=float)
        for lo, hi in [(0.0, 0.05), (0.05, 0.1), (0.1, 0.2), (0.2, 1.0)]:
            sel = (preds >= lo) & (preds < hi)
            if sel.sum() < 200:
                continue
            rate = hits[sel].mean()
            mean_pred = preds[sel].mean()
            se = np.sqrt(mean_pred * (1 - mean_pred) / sel.sum())
            assert abs(rate - mean_pred) < 4 * se + 0.005


class TestRetainControl:
    def test_certain_bot(self):
        # attempt, precision and buzzability all certain
        p = retain_control_prob(1.0, 1.0, 1e12, (0.61, 0.61), (0.87, 0.87))
        assert p == pytest.approx(1.0)

    def test_no_attempt(self):
        p = retain_control_prob(0.0, 0.9, 8.0, (1.0, 1.0), (1.0, 1.0))
        assert p == pytest.approx(0.0)

    def test_matches_simulation(self):
        from quizstrat.rollout import SeatModel, RolloutConfig, _draw_and_resolve_cell
        from quizstrat.contestants import PRESETS
        bot_b, bot_p, w = 0.70, 0.86, 8.0
        analytic = retain_control_prob(bot_b, bot_p, w, (0.61, 0.61), (0.87, 0.87))
        human = SeatModel.human(PRESETS["average"])
        from quizstrat.confidence import fit_confidence_beta_fixed_threshold
        cm = fit_confidence_beta_fixed_threshold(bot_b, bot_p, 0.5)
        bot = SeatModel(is_bot=True, b_by_row={1: [bot_b] * 5, 2: [bot_b] * 5},
                        p_by_row={1: [bot_p] * 5, 2: [bot_p] * 5},
                        dd_accuracy=0.6, fj_accuracy=0.6, buzz_weight=w,
                        conf_alpha=cm.beta_alpha, conf_beta=cm.beta_beta)
        rng = np.random.default_rng(5)
        n = 100_000
        deltas, winner, _, _ = _draw_and_resolve_cell(
            [bot, human, human], 2, 3, 1200, RolloutConfig(), rng, n
        )
        retained = (winner == 0) | (winner == -1)
        assert abs(retained.mean() - analytic) < 0.02


class TestSelection:
    def test_lrtb(self):
        cells = [(c, r) for c in range(6) for r in range(1, 6)]
        assert select_square(cells, None, "lrtb") == (0, 1)

    def test_simple_seeking_prefers_heavy_rows(self):
        prior = PlacementPrior.default()
        cells = [(c, r) for c in range(6) for r in range(1, 6)]
        cell = select_square(cells, None, "simple_seeking",
                             row_prior=prior.row_marginal(2))
        assert cell[1] == 4  # heaviest row in the default prior

    def test_bayesian_avoids_top_row_fresh_board(self):
        prior = PlacementPrior.default()
        belief = DDBeliefState.fresh(prior, 2)
        cells = [(c, r) for c in range(6) for r in range(1, 6)]
        cell = select_square(cells, belief, "bayesian", alpha=0.0)
        assert cell[1] != 1

    def test_alpha_zero_is_pure_grid_argmax(self):
        prior = PlacementPrior.default()
        belief = DDBeliefState.fresh(prior, 2)
        cells = [(c, r) for c in range(6) for r in range(1, 6)]
        grid = dd_probability_grid(belief)
        best = max(sorted(cells), key=lambda cr: (grid[cr], -cr[0], -cr[1]))
        assert select_square(cells, belief, "bayesian", alpha=0.0) == best

    def test_single_cell(self):
        assert select_square([(3, 2)], None, "lrtb") == (3, 2)

    def test_post_dd_learning_picks_bottom_of_best_category(self):
        prior = PlacementPrior.default()
        belief = DDBeliefState.fresh(prior, 2)
        belief = observe_dd_found(belief, (0, 3))
        belief = observe_dd_found(belief, (1, 3))
        cells = [(2, r) for r in (1, 2, 3)] + [(5, 5)]
        cell = select_square(cells, belief, "bayesian")
        assert cell == (2, 3)  # bottom of the richest remaining category
