"""Buzz-policy orchestration: end-of-clue equity estimation feeding the
event-tree threshold calculation, the lockout-preserving filter, and the
end-game dynamic-programming lookahead (exact and one-step approximate).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .buzz import (
    EOC_STATES,
    NEVER_BUZZ,
    BuzzParams,
    LiveStateValues,
    ThresholdSet,
    live_values_and_thresholds,
)
from .game import ROUND_WAGER_LIMIT, cell_value
from .rollout import (
    RolloutConfig,
    RolloutState,
    SeatModel,
    end_of_clue_offsets,
    fj_win_probability,
    rollout_equities_chunked,
)

Cell = tuple[int, int]


@dataclass
class ClueContext:
    """A clue in play from the strategic seat's point of view."""

    rollout_state: RolloutState  # remaining clues EXCLUDING the one in play
    seats: list[SeatModel]
    clue_row: int
    clue_round: int
    strategic_seat: int = 0
    z1: float | None = None
    z2: float | None = None

    @property
    def clue_value(self) -> int:
        return cell_value(self.clue_round, self.clue_row)


def buzz_params_for(ctx: ClueContext, cfg: RolloutConfig) -> BuzzParams:
    seats = ctx.seats
    strat = ctx.strategic_seat
    opp = [i for i in range(3) if i != strat]
    b1, p1 = (
        seats[opp[0]].b_by_row[ctx.clue_round][ctx.clue_row - 1],
        seats[opp[0]].p_by_row[ctx.clue_round][ctx.clue_row - 1],
    )
    b2, p2 = (
        seats[opp[1]].b_by_row[ctx.clue_round][ctx.clue_row - 1],
        seats[opp[1]].p_by_row[ctx.clue_round][ctx.clue_row - 1],
    )
    rho_b = cfg.rho_buzz if not (seats[opp[0]].is_bot or seats[opp[1]].is_bot) else 0.0
    rho_p = cfg.rho_precision if rho_b else 0.0
    w_strat = seats[strat].buzz_weight
    w1 = seats[opp[0]].buzz_weight
    w2 = seats[opp[1]].buzz_weight
    z1 = ctx.z1 if ctx.z1 is not None else w_strat / (w_strat + max(w1, w2))
    z2 = ctx.z2 if ctx.z2 is not None else w_strat / (w_strat + w1 + w2)
    return BuzzParams.from_marginals(b1, b2, rho_b, p1, p2, rho_p, z1, z2)


def estimate_eoc_equities(
    ctx: ClueContext,
    n: int,
    seed: int,
    cfg: RolloutConfig | None = None,
) -> dict[tuple[int, int, int], float]:
    """E_xyz for the clue in play via offset-coupled rollouts."""
    cfg = cfg or RolloutConfig(strategic_seat=ctx.strategic_seat)
    offsets = end_of_clue_offsets(ctx.clue_value, ctx.strategic_seat)
    est = rollout_equities_chunked(
        ctx.rollout_state, ctx.seats, offsets, n, seed, cfg
    )
    return {s: float(v) for s, v in zip(EOC_STATES, est.values)}


def clue_thresholds(
    ctx: ClueContext,
    n: int = 100_000,
    seed: int = 0,
    cfg: RolloutConfig | None = None,
    grid_step: float = 0.01,
) -> tuple[LiveStateValues, ThresholdSet]:
    """End-of-clue equities + event tree -> buzz thresholds for the clue."""
    cfg = cfg or RolloutConfig(strategic_seat=ctx.strategic_seat)
    E = estimate_eoc_equities(ctx, n, seed, cfg)
    params = buzz_params_for(ctx, cfg)
    return live_values_and_thresholds(E, params, grid_step=grid_step)


# --------------------------------------------------------------------------
# Lockout-preserving filter
# --------------------------------------------------------------------------

def _max_opponent_cap(scores, strat, remaining_value, dd_count, limit) -> int:
    caps = []
    for i in range(3):
        if i == strat:
            continue
        s = scores[i] + remaining_value
        for _ in range(dd_count):
            s = s + max(s, limit)
        caps.append(s)
    return max(caps)


def lockout_preserved(
    scores, strat: int, clue_value: int, remaining_value_after: int,
    dd_count_after: int, round_no: int,
) -> tuple[bool, bool]:
    """(locked_if_pass, locked_if_buzz_wrong) for the clue in play.

    `remaining_value_after` excludes the clue in play. An opponent may still
    win the clue in play when the strategic player passes or misses.
    """
    limit = ROUND_WAGER_LIMIT[round_no]
    cap_after = _max_opponent_cap(
        scores, strat, remaining_value_after + clue_value, dd_count_after, limit
    )
    locked_pass = scores[strat] > 2 * cap_after
    locked_wrong = (scores[strat] - clue_value) > 2 * cap_after
    return locked_pass, locked_wrong


def lockout_preserving_filter(
    decision: bool, scores, strat: int, clue_value: int,
    remaining_value_after: int, dd_count_after: int, round_no: int = 2,
) -> bool:
    """Forbid buzzing when not buzzing preserves a guaranteed lockout that a
    wrong answer would break; otherwise pass the decision through."""
    locked_pass, locked_wrong = lockout_preserved(
        scores, strat, clue_value, remaining_value_after, dd_count_after, round_no
    )
    if locked_pass and not locked_wrong:
        return False
    return decision


# --------------------------------------------------------------------------
# Endgame dynamic programming
# --------------------------------------------------------------------------

@dataclass
class DPResult:
    thresholds: ThresholdSet
    root_value: float
    mode: str
    budget_exceeded: bool = False


def _confidence_weights(model_alpha, model_beta, grid) -> np.ndarray:
    """Probability mass of the strategic confidence on each grid point."""
    from scipy import stats

    edges = np.concatenate([[0.0], (grid[1:] + grid[:-1]) / 2, [1.0]])
    cdf = stats.beta(model_alpha, model_beta).cdf(edges)
    w = np.diff(cdf)
    return w / w.sum()


class ExactEndgameSolver:
    """Full expansion of the remaining clues; final-round leaves evaluated
    by the exact eight-outcome rule on sampled model bets.

    Exact within the model given: next square uniform over remaining cells,
    strategic confidence drawn per clue from a Beta density, opponents per
    the clue model. Feasible for a handful of remaining clues only.
    """

    def __init__(self, ctx: ClueContext, cfg: RolloutConfig, grid_step=0.01,
                 leaf_samples: int = 4096, seed: int = 0):
        self.ctx = ctx
        self.cfg = cfg
        self.grid = np.round(np.arange(0.0, 1.0 + 1e-12, grid_step), 10)
        self.grid_step = grid_step
        self.leaf_samples = leaf_samples
        self.seed = seed
        self._leaf_cache: dict = {}
        self._value_cache: dict = {}
        sm = ctx.seats[ctx.strategic_seat]
        self.conf_w = _confidence_weights(sm.conf_alpha, sm.conf_beta, self.grid)
        self._fju = np.random.default_rng(seed).uniform(
            size=(leaf_samples, 3, 2)
        )

    def leaf_value(self, scores: tuple[int, int, int]) -> float:
        v = self._leaf_cache.get(scores)
        if v is None:
            arr = np.tile(np.array(scores, dtype=np.int64), (self.leaf_samples, 1))
            win = fj_win_probability(
                self.ctx.seats, arr, self.ctx.strategic_seat, self._fju,
                self.cfg.fj_rho_humans,
            )
            v = float(win.mean())
            self._leaf_cache[scores] = v
        return v

    def value(self, remaining: tuple[int, ...], scores: tuple[int, int, int]) -> float:
        """Pre-selection value with `remaining` row multiset left to play."""
        if not remaining:
            return self.leaf_value(scores)
        key = (remaining, scores)
        v = self._value_cache.get(key)
        if v is not None:
            return v
        total = 0.0
        uniq: dict[int, int] = {}
        for r in remaining:
            uniq[r] = uniq.get(r, 0) + 1
        for row, cnt in uniq.items():
            p_row = cnt / len(remaining)
            rest = list(remaining)
            rest.remove(row)
            curve, _ = self.clue_curve(tuple(rest), scores, row)
            total += p_row * float((np.maximum(*curve) * self.conf_w).sum())
        self._value_cache[key] = total
        return total

    def clue_curve(self, rest: tuple[int, ...], scores, row):
        """(V_B(c), V_NB(c)] arrays for a clue of `row` given continuation."""
        d = cell_value(self.ctx.clue_round, row)
        E = {}
        strat = self.ctx.strategic_seat
        opp = [i for i in range(3) if i != strat]
        for s in EOC_STATES:
            ns = list(scores)
            ns[strat] += s[0] * d
            ns[opp[0]] += s[1] * d
            ns[opp[1]] += s[2] * d
            E[s] = self.value(rest, tuple(ns))
        ctx_row = replace(self.ctx, clue_row=row)
        params = buzz_params_for(ctx_row, self.cfg)
        vals, th = live_values_and_thresholds(E, params, grid_step=self.grid_step)
        return (vals.v_buzz[0], vals.v_nobuzz[0]), th

    def root(self) -> DPResult:
        rest = tuple(sorted(r for (_, r) in self.ctx.rollout_state.remaining))
        curve, th = self.clue_curve(
            rest, tuple(self.ctx.rollout_state.scores), self.ctx.clue_row
        )
        root_value = float((np.maximum(*curve) * self.conf_w).sum())
        return DPResult(thresholds=th, root_value=root_value, mode="exact")


def approx_dp_decision(
    ctx: ClueContext,
    n: int = 100_000,
    seed: int = 0,
    cfg: RolloutConfig | None = None,
    mode: str = "approximate",
    grid_step: float = 0.01,
    exact_k_cap: int = 5,
) -> DPResult:
    """Buzz policy for the clue in play with K clues remaining after it.

    Approximate mode applies one backward step (the event tree) on top of
    plain Monte-Carlo continuation values; exact mode expands every
    successor state and is capped at small K.
    """
    if ctx.rollout_state.dd_hidden_count or ctx.rollout_state.dd_remaining:
        raise ValueError("endgame buzz analysis requires no remaining DDs")
    cfg = cfg or RolloutConfig(
        strategic_seat=ctx.strategic_seat, order_mode="uniform"
    )
    if mode == "exact":
        k = len(ctx.rollout_state.remaining)
        if k > exact_k_cap:
            raise ValueError(f"exact mode capped at K <= {exact_k_cap}, got {k}")
        solver = ExactEndgameSolver(ctx, cfg, grid_step=grid_step, seed=seed)
        return solver.root()
    vals, th = clue_thresholds(ctx, n=n, seed=seed, cfg=cfg, grid_step=grid_step)
    sm = ctx.seats[ctx.strategic_seat]
    w = _confidence_weights(sm.conf_alpha, sm.conf_beta, vals.grid)
    root_value = float(
        (np.maximum(vals.v_buzz[0], vals.v_nobuzz[0]) * w).sum()
    )
    return DPResult(thresholds=th, root_value=root_value, mode="approximate")


# --------------------------------------------------------------------------
# Correlated-human thresholds (copula conditioning)
# --------------------------------------------------------------------------

@dataclass
class ConditionalTables:
    """Per-confidence-bin opponent behavior for a human strategic player.

    Opponent attempt joints condition on the strategic player's observed
    confidence; right/wrong joints additionally condition on both opponents
    attempting (answering contexts), and the ineligible-state variants on
    the strategic player having answered wrong. Posterior right-rates feed
    the rebound states.
    """

    bin_edges: np.ndarray
    b_joint: np.ndarray  # (bins, 2, 2)
    p_joint: np.ndarray  # (bins, 2, 2)
    p_joint_is: np.ndarray  # (bins, 2, 2)
    post_one_wrong: np.ndarray  # (bins,)
    post_both_wrong: np.ndarray  # (bins,)

    def bin_of(self, c: float) -> int:
        k = int(np.searchsorted(self.bin_edges, c, side="right")) - 1
        return min(max(k, 0), len(self.bin_edges) - 2)


def tabulate_conditional_tables(
    model,
    conf_latent: float,
    noise_latent: float,
    n: int = 30_000_000,
    bins: int = 50,
    seed: int = 0,
    chunk: int = 2_000_000,
) -> ConditionalTables:
    """Estimate the conditional opponent tables by large-sample tabulation.

    Draws correlated (confidence, noise) triples from the copula model,
    discretizes the strategic player's confidence, and counts opponent
    attempt/right patterns at each level. Bins with thin support borrow
    their neighbors' counts (widening with a warning rather than failing).
    """
    from .confidence import copula_confidence_draw, _pair_latent

    edges = np.linspace(0.0, 1.0, bins + 1)
    t = model.buzz_threshold
    cnt_b = np.zeros((bins, 2, 2))
    cnt_p = np.zeros((bins, 2, 2))
    cnt_p_is = np.zeros((bins, 2, 2))
    post1_num = np.zeros(bins)
    post1_den = np.zeros(bins)
    post3_num = np.zeros(bins)
    post3_den = np.zeros(bins)
    done = 0
    block = 0
    while done < n:
        m = min(chunk, n - done)
        rng = np.random.default_rng(np.random.SeedSequence((seed, block)))
        conf, rights = copula_confidence_draw(
            [model] * 3, _pair_latent(conf_latent), _pair_latent(noise_latent),
            rng, m,
        )
        att = conf > t
        k = np.clip(np.searchsorted(edges, conf[:, 0], side="right") - 1, 0, bins - 1)
        a1 = att[:, 1].astype(np.int64)
        a2 = att[:, 2].astype(np.int64)
        r0 = rights[:, 0]
        r1 = rights[:, 1].astype(np.int64)
        r2 = rights[:, 2].astype(np.int64)
        np.add.at(cnt_b, (k, a1, a2), 1.0)
        both = att[:, 1] & att[:, 2]
        np.add.at(cnt_p, (k[both], r1[both], r2[both]), 1.0)
        is_sel = both & ~r0
        np.add.at(cnt_p_is, (k[is_sel], r1[is_sel], r2[is_sel]), 1.0)
        # posterior right-rate after observing opponent wrongs
        one_wrong = att[:, 1] & ~rights[:, 1]
        np.add.at(post1_num, k[one_wrong], r0[one_wrong].astype(float))
        np.add.at(post1_den, k[one_wrong], 1.0)
        bw = both & ~rights[:, 1] & ~rights[:, 2]
        np.add.at(post3_num, k[bw], r0[bw].astype(float))
        np.add.at(post3_den, k[bw], 1.0)
        done += m
        block += 1

    def _smooth(numer, denom, floor=2500):
        out = np.zeros(len(numer))
        for i in range(len(numer)):
            lo = hi = i
            nmr, dnm = numer[i].copy() if numer.ndim > 1 else numer[i], denom[i]
            while dnm < floor and (lo > 0 or hi < len(numer) - 1):
                lo = max(lo - 1, 0)
                hi = min(hi + 1, len(numer) - 1)
                nmr = numer[lo : hi + 1].sum(axis=0)
                dnm = denom[lo : hi + 1].sum()
            out[i] = nmr / dnm if dnm > 0 else 0.5
        return out

    def _norm_joint(cnt):
        out = np.empty_like(cnt)
        for i in range(cnt.shape[0]):
            tot = cnt[i].sum()
            lo = hi = i
            acc = cnt[i].copy()
            while tot < 4000 and (lo > 0 or hi < cnt.shape[0] - 1):
                lo = max(lo - 1, 0)
                hi = min(hi + 1, cnt.shape[0] - 1)
                acc = cnt[lo : hi + 1].sum(axis=0)
                tot = acc.sum()
            out[i] = acc / tot if tot > 0 else 0.25
        return out

    post1 = _smooth(post1_num, post1_den)
    post3 = _smooth(post3_num, post3_den)
    return ConditionalTables(
        bin_edges=edges,
        b_joint=_norm_joint(cnt_b),
        p_joint=_norm_joint(cnt_p),
        p_joint_is=_norm_joint(cnt_p_is),
        post_one_wrong=post1,
        post_both_wrong=post3,
    )


def human_strategic_thresholds(
    ctx: ClueContext,
    tables: ConditionalTables | None,
    n: int = 800_000,
    seed: int = 0,
    cfg: RolloutConfig | None = None,
    grid_step: float = 0.01,
    E: dict | None = None,
):
    """Buzz thresholds for a human strategic player.

    With `tables` the opponent joints and the player's answering confidence
    condition on the observed confidence level (the correlated extension);
    without, the flat clue model applies.
    """
    cfg = cfg or RolloutConfig(strategic_seat=ctx.strategic_seat)
    if E is None:
        E = estimate_eoc_equities(ctx, n, seed, cfg)
    base = buzz_params_for(ctx, cfg)
    if tables is None:
        return live_values_and_thresholds(E, base, grid_step=grid_step), E

    def params_for_c(c):
        k = tables.bin_of(c)
        return BuzzParams(
            b_joint=tables.b_joint[k],
            p_joint=tables.p_joint[k],
            z1=base.z1,
            z2=base.z2,
        )

    def is_params_for_c(c):
        k = tables.bin_of(c)
        return BuzzParams(
            b_joint=tables.b_joint[k],
            p_joint=tables.p_joint_is[k],
            z1=base.z1,
            z2=base.z2,
        )

    def posterior(c, state):
        k = tables.bin_of(c)
        if state == 3:
            return float(tables.post_both_wrong[k])
        return float(tables.post_one_wrong[k])

    return (
        live_values_and_thresholds(
            E, base, grid_step=grid_step, posterior=posterior,
            params_for_c=params_for_c, is_params_for_c=is_params_for_c,
        ),
        E,
    )
