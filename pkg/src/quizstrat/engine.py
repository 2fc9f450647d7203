"""Full-game engine: plays complete matches between a strategy-driven bot
seat and modeled human opponents, and aggregates validation statistics.

Trials are partitioned into seed-indexed blocks; statistics merge through
associative accumulators, so results are deterministic for a fixed
(seed, block size) regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sstats

from .confidence import ConfidenceModel, fit_confidence_beta_fixed_threshold
from .contestants import (
    ContestantProfile,
    PRESETS,
    SelectionModel,
    WagerModel,
    assign_roles,
    human_dd_bet,
    human_fj_bet_from_uniforms,
    human_square_selection,
)
from .correlated import latent_matrix, pair_joint
from .dd import (
    BetEvaluation,
    InCategoryConfidenceTable,
    RiskParams,
    endgame_mc_bet,
    select_dd_bet,
)
from .fj import FJSituation, rule_based_fj_bet
from .game import (
    Board,
    GameState,
    N_COLS,
    N_ROWS,
    Phase,
    ROUND_WAGER_LIMIT,
    cell_value,
    final_placement,
    is_lockout,
)
from .gse import GameStateEvaluator, state_features
from .placement import PlacementPrior
from .policy import lockout_preserving_filter
from .rollout import SeatModel
from .seek import (
    DDBeliefState,
    dd_probability_grid,
    observe_dd_found,
    observe_no_dd,
    retain_control_prob,
    select_square,
)

Cell = tuple[int, int]

DEFAULT_LEARNING_CURVE = (0.0, 0.01, 0.02, 0.03, 0.04)


from functools import lru_cache


@lru_cache(maxsize=256)
def _cached_conf_model(b: float, p: float, t: float) -> ConfidenceModel:
    return fit_confidence_beta_fixed_threshold(b, p, t)


@dataclass(frozen=True)
class BotProfile:
    """The strategy-driven seat's stochastic performance parameters."""

    attempt_rate: float = 0.735
    precision: float = 0.87
    dd_accuracy_base: float = 0.73
    fj_accuracy: float = 0.45
    buzzability_vs_two: float = 0.73
    learning_curve: tuple = DEFAULT_LEARNING_CURVE
    buzz_threshold: float = 0.5

    @property
    def buzz_weight(self) -> float:
        q = self.buzzability_vs_two
        return 2 * q / (1 - q)

    def confidence_model(self) -> ConfidenceModel:
        return _cached_conf_model(
            self.attempt_rate, self.precision, self.buzz_threshold
        )


@dataclass
class BotStrategy:
    """Which decision systems the bot seat deploys."""

    selection_policy: str = "bayesian"  # bayesian | simple_seeking | lrtb
    selection_alpha: float = 0.1
    post_dd_learning: bool = True
    dd_wagering: str = "gse"  # gse | heuristic | average
    endgame_mc: bool = True
    endgame_mc_max_clues: int = 8
    endgame_mc_trials: int = 1024
    fj_mode: str = "constrained"  # constrained | full
    lockout_preserving: bool = True
    risk: RiskParams = field(default_factory=RiskParams)
    evaluator: GameStateEvaluator | None = None
    confidence_table: InCategoryConfidenceTable = field(
        default_factory=InCategoryConfidenceTable.standard
    )


@dataclass
class MatchConfig:
    bot: BotProfile
    humans: tuple[ContestantProfile, ContestantProfile]
    strategy: BotStrategy
    prior: PlacementPrior = field(default_factory=PlacementPrior.default)
    bot_seat: int = 0
    rho_fj: float = 0.3


@dataclass
class TrialRecord:
    """Everything needed to audit or replay one simulated game."""

    final_scores: tuple[int, int, int]
    pre_fj_scores: tuple[int, int, int]
    winners: frozenset
    bot_lockout: bool
    human_lockout: bool
    bot_fj_lead: bool
    selections_bot: int
    selections_total: int
    dds_found_bot: int
    dds_total: int
    events: list = field(default_factory=list)


# --------------------------------------------------------------------------
# Per-game machinery
# --------------------------------------------------------------------------

class _HumanDraws:
    """Pre-drawn per-round correlated buzz/right triples for the two humans."""

    def __init__(self, profiles, rho_b, rho_p, rng, n_clues, round_no):
        self.attempt = np.zeros((n_clues, 2, N_ROWS), dtype=bool)
        self.right = np.zeros((n_clues, 2, N_ROWS), dtype=bool)
        # one latent pair per clue slot; row thresholds applied lazily so the
        # same latent serves whatever row gets played
        bs = np.array(
            [[p.clue_params(round_no, r)[0] for r in range(1, 6)] for p in profiles]
        )
        ps = np.array(
            [[p.clue_params(round_no, r)[1] for r in range(1, 6)] for p in profiles]
        )
        lat_b = _pair_latent_cache(bs.mean(), rho_b)
        lat_p = _pair_latent_cache(ps.mean(), rho_p)
        zb = rng.standard_normal((n_clues, 2)) @ lat_b.T
        zp = rng.standard_normal((n_clues, 2)) @ lat_p.T
        tb = sstats.norm.isf(np.clip(bs, 1e-9, 1 - 1e-9))
        tp = sstats.norm.isf(np.clip(ps, 1e-9, 1 - 1e-9))
        for j in range(2):
            self.attempt[:, j, :] = zb[:, j][:, None] > tb[j][None, :]
            self.right[:, j, :] = zp[:, j][:, None] > tp[j][None, :]


_LATENT_CACHE: dict = {}


def _pair_latent_cache(mean, rho):
    key = (round(float(mean), 6), round(float(rho), 6))
    if key not in _LATENT_CACHE:
        lat = latent_matrix(
            np.array([mean, mean, 0.5]),
            np.array([[0, rho, 0], [rho, 0, 0], [0, 0, 0]], dtype=float),
        )[:2, :2]
        _LATENT_CACHE[key] = np.linalg.cholesky(lat + 1e-12 * np.eye(2))
    return _LATENT_CACHE[key]


def _seat_models_for(config: MatchConfig) -> list[SeatModel]:
    cm = config.bot.confidence_model()
    bot_sm = SeatModel(
        is_bot=True,
        b_by_row={1: [config.bot.attempt_rate] * 5, 2: [config.bot.attempt_rate] * 5},
        p_by_row={1: [config.bot.precision] * 5, 2: [config.bot.precision] * 5},
        dd_accuracy=config.bot.dd_accuracy_base,
        fj_accuracy=config.bot.fj_accuracy,
        buzz_weight=config.bot.buzz_weight,
        conf_alpha=cm.beta_alpha,
        conf_beta=cm.beta_beta,
        buzz_threshold=config.bot.buzz_threshold,
    )
    out: list[SeatModel] = [None, None, None]
    out[config.bot_seat] = bot_sm
    hs = [s for s in range(3) if s != config.bot_seat]
    out[hs[0]] = SeatModel.human(config.humans[0])
    out[hs[1]] = SeatModel.human(config.humans[1])
    return out


def play_game(config: MatchConfig, seed, collector=None) -> TrialRecord:
    """Simulate one full game; deterministic for a fixed seed.

    `collector`, when given, receives a feature vector at every clue
    boundary (for evaluator training).
    """
    rng = np.random.default_rng(seed)
    bot_seat = config.bot_seat
    humans = [s for s in range(3) if s != bot_seat]
    hp = {humans[0]: config.humans[0], humans[1]: config.humans[1]}
    cm = config.bot.confidence_model()
    row_prior2 = config.prior.row_marginal(2)
    seat_models = _seat_models_for(config)

    scores = [0, 0, 0]
    control = int(rng.integers(3))
    sel_bot = 0
    sel_total = 0
    dd_bot = 0
    dd_total = 0
    events = []

    for round_no in (1, 2):
        dd_cells = config.prior.sample(round_no, rng)
        board = Board(round=round_no, dd_cells=frozenset(dd_cells))
        if round_no == 2:
            control = int(np.argmin(scores))
        belief = (
            DDBeliefState.fresh(config.prior, round_no)
            if config.strategy.selection_policy == "bayesian"
            else None
        )
        draws = _HumanDraws(
            [hp[humans[0]], hp[humans[1]]],
            hp[humans[0]].buzz_correlation,
            hp[humans[0]].precision_correlation,
            rng, 30, round_no,
        )
        bot_conf = rng.beta(cm.beta_alpha, cm.beta_beta, size=30)
        bot_noise = rng.uniform(size=30)
        dd_u = rng.uniform(size=30)
        clue_idx = 0
        cat_counts: dict[int, list[int]] = {c: [0, 0] for c in range(N_COLS)}
        cat_revealed = [0] * N_COLS
        current_category: int | None = None

        while board.unrevealed:
            if collector is not None:
                collector(
                    state_features(
                        scores, board.dds_remaining(), len(board.unrevealed),
                        board.remaining_value(), round_no,
                        control == bot_seat, bot_seat,
                    )
                )
            state = GameState(
                board=board, scores=tuple(scores), control=control,
                clue_in_play=None,
            )
            if control == bot_seat:
                cell = _bot_select(config, state, belief, row_prior2, cat_counts)
                sel_bot += 1
            else:
                cell = human_square_selection(
                    hp[control], state, config.prior.row_marginal(round_no), rng,
                    current_category,
                )
            sel_total += 1
            current_category = cell[0]
            col, row = cell
            value = cell_value(round_no, row)
            is_dd = cell in board.dd_cells
            pos = cat_revealed[col]
            inc = config.bot.learning_curve[min(pos, len(config.bot.learning_curve) - 1)]
            c_bot = min(bot_conf[clue_idx] + inc, 1.0)
            bot_right_latent = bot_noise[clue_idx] < c_bot

            if is_dd:
                dd_total += 1
                finder = control
                if finder == bot_seat:
                    dd_bot += 1
                    ev = _bot_dd_bet(config, board, cell, scores, cat_counts[col], rng)
                    bet = ev if isinstance(ev, int) else ev.chosen_bet
                    p_right = config.strategy.confidence_table.confidence(
                        cat_counts[col][0], cat_counts[col][1], row=row,
                        round_no=round_no,
                    ) if (cat_counts[col][0] or cat_counts[col][1]) else min(
                        config.bot.dd_accuracy_base + inc, 1.0
                    )
                    right = dd_u[clue_idx] < p_right
                else:
                    st = GameState(board=board, scores=tuple(scores),
                                   control=control, clue_in_play=cell)
                    bet = human_dd_bet(hp[finder], st, rng)
                    right = dd_u[clue_idx] < hp[finder].dd_accuracy
                scores[finder] += bet if right else -bet
                if belief is not None:
                    belief = observe_dd_found(belief, cell)
                if finder == bot_seat:
                    cat_counts[col][0 if right else 1] += 1
            else:
                h_att = [draws.attempt[clue_idx, j, row - 1] for j in range(2)]
                h_right = [draws.right[clue_idx, j, row - 1] for j in range(2)]
                bot_att = c_bot > config.bot.buzz_threshold
                if bot_att and config.strategy.lockout_preserving and round_no == 2:
                    bot_att = lockout_preserving_filter(
                        True, scores, bot_seat, value,
                        board.remaining_value() - value, board.dds_remaining(),
                        round_no,
                    )
                deltas, winner = _resolve_clue_scalar(
                    bot_att, bot_right_latent, h_att, h_right,
                    config.bot.buzz_weight, value, bot_seat, humans, rng,
                )
                for i in range(3):
                    scores[i] += deltas[i]
                if winner >= 0:
                    control = winner
                if belief is not None:
                    belief = observe_no_dd(belief, cell)
                cat_counts[col][0 if bot_right_latent else 1] += 1
            board = board.reveal(cell)
            cat_revealed[col] += 1
            clue_idx += 1

    pre_fj = tuple(scores)
    order = sorted(range(3), key=lambda i: -scores[i])
    bot_locked = scores[bot_seat] > 2 * max(scores[h] for h in humans)
    human_locked = any(
        scores[h] > 2 * max(scores[i] for i in range(3) if i != h) for h in humans
    )
    bot_lead = scores[bot_seat] > max(scores[h] for h in humans)

    finals = _final_round(config, scores, bot_seat, humans, hp, rng)
    placement = final_placement(tuple(finals))
    return TrialRecord(
        final_scores=tuple(finals),
        pre_fj_scores=pre_fj,
        winners=placement.winners,
        bot_lockout=bot_locked,
        human_lockout=human_locked,
        bot_fj_lead=bot_lead,
        selections_bot=sel_bot,
        selections_total=sel_total,
        dds_found_bot=dd_bot,
        dds_total=dd_total,
    )


def _resolve_clue_scalar(
    bot_att, bot_right, h_att, h_right, bot_weight, value, bot_seat, humans, rng
):
    """Race-based resolution of one regular clue (scalar path)."""
    deltas = [0, 0, 0]
    active = {}
    if bot_att:
        active[bot_seat] = (bot_weight, bot_right)
    for j in range(2):
        if h_att[j]:
            active[humans[j]] = (1.0, h_right[j])
    winner = -1
    while active:
        total = sum(w for w, _ in active.values())
        u = rng.uniform() * total
        acc = 0.0
        pick = None
        for seat, (w, r) in active.items():
            acc += w
            if u <= acc:
                pick = seat
                break
        w, r = active.pop(pick)
        if r:
            deltas[pick] += value
            winner = pick
            break
        deltas[pick] -= value
    return deltas, winner


def _bot_select(config, state, belief, row_prior2, cat_counts):
    strat = config.strategy
    unrevealed = state.board.unrevealed
    row_prior = config.prior.row_marginal(state.board.round)
    if strat.selection_policy == "lrtb":
        return select_square(unrevealed, None, "lrtb")
    if strat.selection_policy == "simple_seeking":
        if state.dds_remaining > 0:
            return select_square(unrevealed, None, "simple_seeking", row_prior=row_prior)
        if strat.post_dd_learning:
            return select_square(unrevealed, None, "bayesian", round_no=state.board.round)
        return select_square(unrevealed, None, "lrtb")
    retain = None
    if strat.selection_alpha > 0:
        bot = config.bot

        def retain(cell):
            col, row = cell
            r, w = cat_counts[col]
            shift = 0.04 * (r - w) / max(1, r + w)
            b_adj = min(max(bot.attempt_rate + shift, 0.0), 1.0)
            p_adj = min(max(bot.precision + shift, 0.0), 1.0)
            hb = [config.humans[i].clue_params(state.board.round, row)[0] for i in range(2)]
            hps = [config.humans[i].clue_params(state.board.round, row)[1] for i in range(2)]
            return retain_control_prob(
                b_adj, p_adj, bot.buzz_weight, tuple(hb), tuple(hps),
                config.humans[0].buzz_correlation, config.humans[0].precision_correlation,
            )

    if not strat.post_dd_learning and (belief is None or belief.dds_unfound() < 1e-9):
        return select_square(unrevealed, None, "lrtb")
    return select_square(
        unrevealed, belief, "bayesian", alpha=strat.selection_alpha,
        retain_fn=retain, round_no=state.board.round,
    )


def _bot_dd_bet(config, board, cell, scores, cat_count, rng):
    strat = config.strategy
    col, row = cell
    round_no = board.round
    value = cell_value(round_no, row)
    remaining_after = board.remaining_value() - value
    clues_after = len(board.unrevealed) - 1
    dds_after = board.dds_remaining() - 1
    rights, wrongs = cat_count
    if rights or wrongs:
        p_dd = strat.confidence_table.confidence(rights, wrongs, row=row, round_no=round_no)
    else:
        p_dd = strat.confidence_table.confidence(0, 0, row=row, round_no=round_no)
        p_dd = (p_dd + config.bot.dd_accuracy_base) / 2
    bot_seat = config.bot_seat
    lo = 5
    hi = max(scores[bot_seat], ROUND_WAGER_LIMIT[round_no])
    if strat.dd_wagering == "heuristic":
        best_opp = max(scores[i] for i in range(3) if i != bot_seat)
        if scores[bot_seat] > 2 * (best_opp + remaining_after):
            return lo
        # safe rules, confidence-blind: pad the lead without surrendering it,
        # or bet just enough to catch up
        if scores[bot_seat] > best_opp:
            return int(min(max(scores[bot_seat] - best_opp - 1, 5), hi))
        return int(min(max(best_opp - scores[bot_seat] + 100, 1000), hi))
    if strat.dd_wagering == "average":
        st = GameState(board=board, scores=tuple(scores), control=bot_seat,
                       clue_in_play=cell)
        return human_dd_bet(PRESETS["average"], st, rng)
    if (
        strat.endgame_mc
        and clues_after <= strat.endgame_mc_max_clues
    ):
        seats = _seat_models_for(config)
        remaining = [c for c in board.unrevealed if c != cell]
        dd_rem = [c for c in board.dd_cells if c not in board.revealed and c != cell]
        ev = endgame_mc_bet(
            tuple(scores), bot_seat, p_dd, seats, round_no, remaining,
            n_trials=strat.endgame_mc_trials, seed=int(rng.integers(2**31)),
            risk=strat.risk, step=max(hi // 40, 100) // 100 * 100 or 100,
            dd_remaining=dd_rem or None,
        )
        return ev
    if strat.evaluator is None:
        raise ValueError("gse wagering requires a trained evaluator")
    return select_dd_bet(
        strat.evaluator, tuple(scores), bot_seat, p_dd, round_no,
        dds_after, clues_after, remaining_after, risk=strat.risk,
    )


def _final_round(config, scores, bot_seat, humans, hp, rng):
    finals = list(scores)
    bets = [0, 0, 0]
    order = assign_roles(scores)
    roles = {seat: "ABC"[pos] for pos, seat in enumerate(order)}
    a, b, c = (scores[order[0]], scores[order[1]], scores[order[2]])
    for seat in range(3):
        if scores[seat] <= 0:
            continue
        if seat == bot_seat:
            sit = FJSituation(
                scores=(a, b, c), my_role=roles[seat],
                my_confidence=config.bot.fj_accuracy,
            )
            bets[seat] = rule_based_fj_bet(sit, mode=config.strategy.fj_mode)
        else:
            bets[seat] = human_fj_bet_from_uniforms(
                roles[seat], a, b, c, rng.uniform(), rng.uniform()
            )
        bets[seat] = max(0, min(bets[seat], scores[seat]))
    h_right = _correlated_pair_bernoulli(
        hp[humans[0]].fj_accuracy, hp[humans[1]].fj_accuracy, config.rho_fj, rng
    )
    rights = {humans[0]: h_right[0], humans[1]: h_right[1],
              bot_seat: rng.uniform() < config.bot.fj_accuracy}
    for seat in range(3):
        if scores[seat] <= 0:
            continue
        finals[seat] += bets[seat] if rights[seat] else -bets[seat]
    return finals


def _correlated_pair_bernoulli(m1, m2, rho, rng):
    joint = pair_joint(m1, m2, rho)
    u = rng.uniform()
    if u < joint[1, 1]:
        return True, True
    if u < joint[1, 1] + joint[1, 0]:
        return True, False
    if u < joint[1, 1] + joint[1, 0] + joint[0, 1]:
        return False, True
    return False, False


# --------------------------------------------------------------------------
# Trial harness
# --------------------------------------------------------------------------

@dataclass
class SimStats:
    n: int = 0
    wins: int = 0
    bot_lockouts: int = 0
    human_lockouts: int = 0
    fj_leads: int = 0
    selections_bot: int = 0
    selections_total: int = 0
    dds_bot: int = 0
    dds_total: int = 0
    bot_final_sum: float = 0.0
    human_final_sum: float = 0.0
    bot_final_sq: float = 0.0
    human_final_sq: float = 0.0

    def add(self, rec: TrialRecord, bot_seat: int):
        self.n += 1
        self.wins += bot_seat in rec.winners
        self.bot_lockouts += rec.bot_lockout
        self.human_lockouts += rec.human_lockout
        self.fj_leads += rec.bot_fj_lead
        self.selections_bot += rec.selections_bot
        self.selections_total += rec.selections_total
        self.dds_bot += rec.dds_found_bot
        self.dds_total += rec.dds_total
        bf = rec.final_scores[bot_seat]
        hf = np.mean([rec.final_scores[i] for i in range(3) if i != bot_seat])
        self.bot_final_sum += bf
        self.human_final_sum += hf
        self.bot_final_sq += bf * bf
        self.human_final_sq += hf * hf

    def merge(self, other: "SimStats") -> "SimStats":
        out = SimStats()
        for f in SimStats.__dataclass_fields__:
            setattr(out, f, getattr(self, f) + getattr(other, f))
        return out

    def summary(self) -> dict:
        n = max(self.n, 1)

        def rate(k):
            p = k / n
            return p, math.sqrt(p * (1 - p) / n)

        win, win_se = rate(self.wins)
        lock, lock_se = rate(self.bot_lockouts)
        hlock, hlock_se = rate(self.human_lockouts)
        lead, lead_se = rate(self.fj_leads)
        bf_mean = self.bot_final_sum / n
        hf_mean = self.human_final_sum / n
        bf_se = math.sqrt(max(self.bot_final_sq / n - bf_mean**2, 0) / n)
        hf_se = math.sqrt(max(self.human_final_sq / n - hf_mean**2, 0) / n)
        return {
            "n": self.n,
            "win_rate": win, "win_rate_se": win_se,
            "lockout_rate": lock, "lockout_rate_se": lock_se,
            "human_lockout_rate": hlock, "human_lockout_rate_se": hlock_se,
            "fj_lead_rate": lead, "fj_lead_rate_se": lead_se,
            "board_control": self.selections_bot / max(self.selections_total, 1),
            "dds_found": self.dds_bot / max(self.dds_total, 1),
            "bot_final_mean": bf_mean, "bot_final_se": bf_se,
            "human_final_mean": hf_mean, "human_final_se": hf_se,
        }


def run_trials(
    config: MatchConfig, n: int, seed: int = 0, block: int = 1000
) -> SimStats:
    """Play `n` games in seed-indexed blocks and merge the statistics."""
    if n < 1:
        raise ValueError("n must be at least 1")
    stats = SimStats()
    done = 0
    b_idx = 0
    while done < n:
        m = min(block, n - done)
        ss = np.random.SeedSequence((seed, b_idx))
        seeds = ss.spawn(m)
        blk = SimStats()
        for s in seeds:
            rec = play_game(config, s)
            blk.add(rec, config.bot_seat)
        stats = stats.merge(blk)
        done += m
        b_idx += 1
    return stats
