"""Vectorized Monte-Carlo rollouts with common random numbers.

A rollout plays the remaining clues of a game (optionally spanning the
round-2 board and hidden DDs) once per trial from a baseline state, then
re-scores the same event stream under a family of score offsets: the 20
end-of-clue delta states, or a grid of DD wagers. All behavioral draws
(buzz/right triples, selection order, wager mixtures, final-round bet
components) are shared across offsets, so two offset states that differ only
through events that cannot change the winner produce exactly equal
estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .buzz import EOC_STATES
from .contestants import ROUND_NUMBER_LADDER, average_dd_bet_mean
from .correlated import latent_matrix
from .correlated import triple_outcome_distribution
from .game import ROUND_WAGER_LIMIT, cell_value

Cell = tuple[int, int]


@dataclass
class SeatModel:
    """Per-seat behavior for vectorized rollouts."""

    is_bot: bool
    b_by_row: dict
    p_by_row: dict
    dd_accuracy: float
    fj_accuracy: float
    buzz_weight: float = 1.0
    aggressive_dd: bool = False
    conf_alpha: float = 1.0
    conf_beta: float = 1.0
    buzz_threshold: float = 0.5

    @staticmethod
    def human(profile) -> "SeatModel":
        rows = {}
        prows = {}
        for rnd in (1, 2):
            rows[rnd] = [profile.clue_params(rnd, r)[0] for r in range(1, 6)]
            prows[rnd] = [profile.clue_params(rnd, r)[1] for r in range(1, 6)]
        return SeatModel(
            is_bot=False,
            b_by_row=rows,
            p_by_row=prows,
            dd_accuracy=profile.dd_accuracy,
            fj_accuracy=profile.fj_accuracy,
            aggressive_dd=profile.wager_model.value == "aggressive_heuristic_dd",
        )


@dataclass
class RolloutState:
    """Starting point of a rollout: scores, control, remaining board."""

    scores: tuple[int, int, int]
    control: int
    round_no: int
    remaining: list[Cell]
    dd_remaining: list[Cell] | None = None  # known DD cells among remaining
    dd_hidden_count: int = 0  # DDs hidden among `remaining`, sampled per trial
    play_round2: bool = False  # continue into a fresh round-2 board afterward
    round2_dd_count: int = 2


@dataclass
class RolloutConfig:
    rho_buzz: float = 0.2
    rho_precision: float = 0.2
    fj_rho_humans: float = 0.3
    order_mode: str = "category"  # or "uniform"
    strategic_seat: int = 0
    lockout_monitor: bool = True
    row_prior: np.ndarray | None = None  # row marginal for hidden DD sampling


@dataclass
class EquityEstimate:
    offsets: list[tuple[int, int, int]]
    values: np.ndarray  # per-offset mean equity of the strategic seat
    std_err: np.ndarray
    per_trial: np.ndarray | None = None  # (n_offsets, n) when retained


DEFAULT_ROW_PRIOR = np.array([0.002, 0.088, 0.304, 0.384, 0.222])


def _human_latent(seats, rho, marginals) -> np.ndarray:
    rho_m = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i != j and not seats[i].is_bot and not seats[j].is_bot:
                rho_m[i, j] = rho
    return latent_matrix(np.asarray(marginals, dtype=float), rho_m)


def _draw_and_resolve_cell(seats, round_no, row, value, cfg, rng, n):
    """Draw one cell's triples and resolve its regular-clue outcome.

    Returns (deltas int16 (n,3), winner int8 (n,), dd_u f32, dd_bet_u f32).
    Buzz and correctness are fixed through rebounds; wrong answerers drop out.
    """
    bs = [s.b_by_row[round_no][row - 1] for s in seats]
    ps = [s.p_by_row[round_no][row - 1] for s in seats]
    attempt = np.zeros((n, 3), dtype=bool)
    right = np.zeros((n, 3), dtype=bool)
    humans = [i for i, s in enumerate(seats) if not s.is_bot]
    bots = [i for i, s in enumerate(seats) if s.is_bot]
    if humans:
        lat_b = _human_latent(seats, cfg.rho_buzz, bs)
        lat_p = _human_latent(seats, cfg.rho_precision, ps)
        zb = rng.standard_normal((n, 3)) @ np.linalg.cholesky(lat_b + 1e-12 * np.eye(3)).T
        zp = rng.standard_normal((n, 3)) @ np.linalg.cholesky(lat_p + 1e-12 * np.eye(3)).T
        tb = stats.norm.isf(np.clip(bs, 1e-12, 1 - 1e-12))
        tp = stats.norm.isf(np.clip(ps, 1e-12, 1 - 1e-12))
        for i in humans:
            attempt[:, i] = zb[:, i] > tb[i]
            right[:, i] = zp[:, i] > tp[i]
    for i in bots:
        conf = rng.beta(seats[i].conf_alpha, seats[i].conf_beta, size=n)
        attempt[:, i] = conf > seats[i].buzz_threshold
        right[:, i] = rng.uniform(size=n) < conf

    buzz_u = rng.uniform(size=(n, 3))
    deltas = np.zeros((n, 3), dtype=np.int16)
    winner = np.full(n, -1, dtype=np.int8)
    active = attempt.copy()
    weights = np.array([s.buzz_weight for s in seats])
    for rnd_i in range(3):
        any_active = active.any(axis=1)
        if not any_active.any():
            break
        w = active * weights
        total = w.sum(axis=1)
        safe_total = np.where(total == 0, 1.0, total)
        u = buzz_u[:, rnd_i] * safe_total
        cum = np.cumsum(w, axis=1)
        pick = (u[:, None] < cum).argmax(axis=1)
        for i in range(3):
            mask = any_active & (pick == i) & active[:, i]
            if not mask.any():
                continue
            r = right[mask, i]
            idx = np.where(mask)[0]
            deltas[idx[r], i] += value
            deltas[idx[~r], i] -= value
            winner[idx[r]] = i
            active[idx, i] = False
            active[idx[r], :] = False
    return (
        deltas,
        winner,
        rng.uniform(size=n).astype(np.float32),
        rng.uniform(size=n).astype(np.float32),
    )


def _dd_bets_vector(seats, finder, scores, remaining_after, frac_played, round_no, u, n):
    """Vectorized DD wager for the per-trial finder seat."""
    bets = np.zeros(n, dtype=np.int64)
    limit = ROUND_WAGER_LIMIT[round_no]
    order = np.argsort(-scores, axis=1, kind="stable")
    role = np.empty((n, 3), dtype=np.int64)
    rows = np.arange(n)
    for r in range(3):
        role[rows, order[:, r]] = r
    finder_score = scores[rows, finder]
    best_opp = np.where(
        finder == order[:, 0], scores[rows, order[:, 1]], scores[rows, order[:, 0]]
    )
    max_bet = np.maximum(finder_score, limit)
    near_lock = finder_score > 2 * (best_opp + remaining_after)
    for i, seat in enumerate(seats):
        mask = finder == i
        if not mask.any():
            continue
        if seat.aggressive_dd or seat.is_bot:
            bets[mask] = np.where(near_lock[mask], 5, max_bet[mask])
        else:
            ladder = np.array(ROUND_NUMBER_LADDER, dtype=float)
            if round_no == 1:
                ladder = ladder / 2.0
            for r in range(3):
                m2 = mask & (role[:, i] == r)
                if not m2.any():
                    continue
                mu = average_dd_bet_mean(r, frac_played, round_no)
                wts = np.exp(-0.5 * (np.log(ladder / mu) / 0.55) ** 2)
                cdf = np.cumsum(wts / wts.sum())
                pick = np.searchsorted(cdf, u[m2], side="right").clip(0, len(ladder) - 1)
                bets[m2] = ladder[pick].astype(np.int64)
            bets[mask] = np.minimum(np.maximum(bets[mask], 5), max_bet[mask])
    return bets


# --------------------------------------------------------------------------
# Final-round vectorized bets (must mirror contestants.fj_component_amount)
# --------------------------------------------------------------------------

def _mixture(bets, mask, u_mix, comps):
    if not mask.any():
        return
    cum = np.cumsum([w for _, w in comps])
    cum = cum / cum[-1]
    pick = np.searchsorted(cum, u_mix[mask], side="left").clip(0, len(comps) - 1)
    vals = np.stack([amt[mask] for amt, _ in comps], axis=1)
    bets[mask] = vals[np.arange(int(mask.sum())), pick]


def _bets_for_role_A(a, b, own, u_mix, u_amt):
    n = len(a)
    bets = np.zeros(n)
    locked = 2 * b < a
    tie = 2 * b == a
    close = ~locked & ~tie & (4 * b >= 3 * a)
    ahead = ~locked & ~tie & ~close
    cover = np.maximum(2 * b - a, 0)
    max_safe = np.maximum(a - 2 * b - 1, 0)
    rand_safe = np.floor(u_amt * (max_safe + 1))
    rand_under = np.floor(u_amt * (cover + 1))
    _mixture(bets, close, u_mix,
             [(cover, 0.62), (own.astype(float), 0.18), (rand_under, 0.20)])
    _mixture(bets, ahead, u_mix, [(cover, 0.78), (rand_under, 0.22)])
    _mixture(bets, locked, u_mix, [(max_safe, 0.5), (np.zeros(n), 0.3), (rand_safe, 0.2)])
    bets[tie] = 0
    return np.clip(bets, 0, own)


def _bets_for_role_B(a, b, c, own, u_mix, u_amt):
    n = len(a)
    bets = np.zeros(n)
    band_lt = 3 * b < 2 * a
    band_hi = 4 * b >= 3 * a
    band_mid = ~band_lt & ~band_hi
    keep = b >= 2 * c

    overtake = np.minimum(a - b + 1, own)
    bankroll = own.astype(float)
    keepout = np.maximum(b - 2 * c, 0)
    cover_c = np.maximum(2 * c - b, 0)
    two_thirds = np.maximum(3 * b - 2 * a, 0)
    small_cap = np.minimum(own // 4, np.where(3 * b - 2 * a >= 0, 3 * b - 2 * a, own))
    small_cap = np.minimum(small_cap, np.where(b - 2 * c >= 0, b - 2 * c, own))
    rand_small = np.floor(u_amt * (small_cap + 1))
    lo_big = np.minimum(a - b + 1, own)
    rand_big = lo_big + np.floor(u_amt * (own - lo_big + 1))

    _mixture(bets, band_hi & keep, u_mix,
             [(bankroll, 0.26), (keepout, 0.27), (overtake, 0.15),
              (two_thirds, 0.08), (rand_small, 0.12), (rand_big, 0.12)])
    _mixture(bets, band_hi & ~keep, u_mix,
             [(cover_c, 0.25), (bankroll, 0.30), (two_thirds, 0.15),
              (overtake, 0.15), (rand_small, 0.07), (rand_big, 0.08)])
    _mixture(bets, band_mid & keep, u_mix,
             [(bankroll, 0.28), (keepout, 0.25), (two_thirds, 0.15),
              (overtake, 0.12), (rand_small, 0.10), (rand_big, 0.10)])
    _mixture(bets, band_mid & ~keep, u_mix,
             [(cover_c, 0.25), (bankroll, 0.30), (two_thirds, 0.15),
              (overtake, 0.10), (rand_small, 0.10), (rand_big, 0.10)])
    _mixture(bets, band_lt, u_mix,
             [(bankroll, 0.55), (overtake, 0.30), (rand_big, 0.15)])
    return np.clip(bets, 0, own)


def _bets_for_role_C(a, b, c, own, u_mix, u_amt):
    n = len(a)
    bets = np.zeros(n)
    bankroll = own.astype(float)
    min_rational = np.clip(2 * (a - b) - c, 0, own)
    rand_small = np.floor(u_amt * (own // 4 + 1))
    cum = np.array([1 / 3, 2 / 3, 1.0])
    pick = np.searchsorted(cum, u_mix, side="left").clip(0, 2)
    vals = np.stack([bankroll, min_rational, rand_small], axis=1)
    bets[:] = vals[np.arange(n), pick]
    return np.clip(bets, 0, own)


def _bot_fj_bets(a, b, c, own_role, own):
    """Rule-based constrained bets, vectorized (ties count as wins)."""
    if own_role == 0:
        locked = 2 * b < a
        tie = 2 * b == a
        bets = np.where(locked, np.maximum(a - 2 * b - 1, 0), np.maximum(2 * b - a, 0))
        bets = np.where(tie, 0, bets)
    elif own_role == 1:
        can23 = 3 * b >= 2 * a
        need_c = b < 2 * c
        cover_c = 2 * c - b
        tt = np.maximum(np.minimum(3 * b - 2 * a, b - 2 * c), 0)
        bets = np.where(
            can23,
            np.where(need_c, np.where(cover_c <= 3 * b - 2 * a, cover_c, b), tt),
            b,
        )
    else:
        dead = c < a - b
        mid = (c >= a - b) & (c < 2 * (a - b))
        stay = c - 2 * (a - b)
        c23 = (3 * c >= 2 * b) & (4 * b >= 3 * a)
        high = np.where(c23, np.minimum(stay, np.maximum(3 * c - 2 * b, 0)), stay)
        bets = np.where(dead, c, np.where(mid, np.clip(2 * (a - b) - c, 0, c), high))
    return np.clip(bets, 0, own)


def fj_win_probability(seats, scores, strategic, fj_uniforms, rho_humans=0.3):
    """Exact eight-outcome win probability of the strategic seat, per trial.

    `scores` is (n, 3) entering the final round; `fj_uniforms` is (n, 3, 2)
    mixture/amount draws shared across offset states. Humans bet from the
    six-group model, bot seats from the constrained rule set; non-positive
    scores are barred (bet 0, answer ignored). Ties for the top all win.
    """
    n = scores.shape[0]
    order = np.argsort(-scores, axis=1, kind="stable")
    rows = np.arange(n)
    A = scores[rows, order[:, 0]].astype(float)
    B = scores[rows, order[:, 1]].astype(float)
    C = scores[rows, order[:, 2]].astype(float)
    bets = np.zeros((n, 3))
    for seat in range(3):
        role = np.empty(n, dtype=np.int64)
        for r in range(3):
            role[order[:, r] == seat] = r
        own = scores[:, seat].astype(float)
        u_mix = fj_uniforms[:, seat, 0]
        u_amt = fj_uniforms[:, seat, 1]
        out = np.zeros(n)
        if seats[seat].is_bot:
            for r in range(3):
                m = role == r
                if m.any():
                    out[m] = _bot_fj_bets(A[m], B[m], C[m], r, own[m])
        else:
            m = role == 0
            if m.any():
                out[m] = _bets_for_role_A(A[m], B[m], own[m], u_mix[m], u_amt[m])
            m = role == 1
            if m.any():
                out[m] = _bets_for_role_B(A[m], B[m], C[m], own[m], u_mix[m], u_amt[m])
            m = role == 2
            if m.any():
                out[m] = _bets_for_role_C(A[m], B[m], C[m], own[m], u_mix[m], u_amt[m])
        bets[:, seat] = out
    barred = scores <= 0
    bets[barred] = 0.0

    accs = np.array([s.fj_accuracy for s in seats], dtype=float)
    rho = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i != j and not seats[i].is_bot and not seats[j].is_bot:
                rho[i, j] = rho_humans
    weights = triple_outcome_distribution(accs, rho)
    opp = [i for i in range(3) if i != strategic]
    o_scores = [scores[:, j].astype(np.float64) for j in opp]
    o_bets = [np.where(barred[:, j], 0.0, bets[:, j]) for j in opp]
    mine_base = scores[:, strategic].astype(np.float64)
    my_bet = np.where(barred[:, strategic], 0.0, bets[:, strategic])
    # winner test reduces to mine >= max(opponent finals) and mine >= 0
    win = np.zeros(n)
    # reorder weights so axes run (strategic, opp[0], opp[1])
    w3 = np.empty((2, 2, 2))
    for x0 in (0, 1):
        for x1 in (0, 1):
            for x2 in (0, 1):
                idx = [0, 0, 0]
                idx[strategic] = x0
                idx[opp[0]] = x1
                idx[opp[1]] = x2
                w3[x0, x1, x2] = weights[tuple(idx)]
    for x1 in (0, 1):
        f1 = o_scores[0] + (2 * x1 - 1) * o_bets[0]
        for x2 in (0, 1):
            f2 = o_scores[1] + (2 * x2 - 1) * o_bets[1]
            m = np.maximum(f1, f2)
            for x0 in (0, 1):
                w = float(w3[x0, x1, x2])
                if w == 0:
                    continue
                mine = mine_base + (2 * x0 - 1) * my_bet
                win += w * ((mine >= m) & (mine >= 0))
    return win


# --------------------------------------------------------------------------
# The rollout proper
# --------------------------------------------------------------------------

def _orders(cells, n, mode, rng):
    """(n, k) per-trial playing orders (indices into `cells`)."""
    k = len(cells)
    if k == 0:
        return np.zeros((n, 0), dtype=np.int64)
    if mode == "uniform":
        return np.argsort(rng.uniform(size=(n, k)), axis=1)
    cols = np.array([c for c, _ in cells])
    rws = np.array([r for _, r in cells])
    col_rank = rng.uniform(size=(n, 6))
    keys = col_rank[:, cols] + rws[None, :] * 1e-4
    return np.argsort(keys, axis=1)


def _categorical(weights, rng):
    cdf = np.cumsum(weights, axis=1)
    u = rng.uniform(size=weights.shape[0]) * cdf[:, -1]
    return (u[:, None] < cdf).argmax(axis=1)


def _sample_hidden_dds(cells, count, row_prior, rng, n):
    """(n, count) per-trial DD cell indices, distinct columns within a trial."""
    if count == 0:
        return np.zeros((n, 0), dtype=np.int64)
    w = np.array([row_prior[r - 1] for (_, r) in cells], dtype=float)
    w = np.clip(w, 1e-12, None)
    out = np.empty((n, count), dtype=np.int64)
    cols = np.array([c for c, _ in cells])
    first = _categorical(np.tile(w, (n, 1)), rng)
    out[:, 0] = first
    if count > 1:
        w2 = np.tile(w, (n, 1))
        same_col = cols[None, :] == cols[first][:, None]
        w2[same_col] = 0.0
        out[:, 1] = _categorical(w2, rng)
    return out


def _opponent_cap(o1, o2, remaining_value, dd_counts, dd_sacrifice, limit):
    """Best-case opponent pre-FJ score, per trial (conservative DD upside)."""
    worst = np.full(o1.shape, -np.inf)
    max_dd = int(dd_counts.max()) if len(dd_counts) else 0
    for opp in (o1, o2):
        s = opp.astype(float) + remaining_value - np.where(dd_counts > 0, dd_sacrifice, 0)
        for step_i in range(max_dd):
            doubling = dd_counts > step_i
            s = np.where(doubling, s + np.maximum(s, limit), s)
        worst = np.maximum(worst, s)
    return worst


def _lockout_mask(lead, o1, o2, remaining_value, dd_counts, dd_sacrifice, limit):
    """Strict vectorized lockout test with per-trial conservative DD upside."""
    worst = _opponent_cap(o1, o2, remaining_value, dd_counts, dd_sacrifice, limit)
    return lead > 2 * worst


def rollout_equities(
    state: RolloutState,
    seats: list[SeatModel],
    offsets: list[tuple[int, int, int]],
    n: int,
    rng: np.random.Generator,
    cfg: RolloutConfig | None = None,
    keep_per_trial: bool = False,
) -> EquityEstimate:
    """Estimate the strategic seat's equity under each score offset.

    One baseline event stream per trial; every offset re-scores it. A
    lockout monitor marks offset-trials where the strategic seat becomes
    uncatchable as guaranteed wins, skipping their FJ evaluation.
    """
    cfg = cfg or RolloutConfig()
    strat = cfg.strategic_seat
    n_off = len(offsets)
    base_scores = np.tile(np.array(state.scores, dtype=np.int64), (n, 1))
    control = np.full(n, state.control, dtype=np.int64)
    locked = np.zeros((n_off, n), dtype=bool)
    off_arr = np.array(offsets, dtype=np.int64)
    opp = [i for i in range(3) if i != strat]

    segments = [
        (state.round_no, list(state.remaining), list(state.dd_remaining or []),
         state.dd_hidden_count)
    ]
    if state.play_round2 and state.round_no == 1:
        segments.append((2, [(c, r) for c in range(6) for r in range(1, 6)], [],
                         state.round2_dd_count))
    row_prior = cfg.row_prior if cfg.row_prior is not None else DEFAULT_ROW_PRIOR

    for seg_i, (round_no, cells, known_dds, hidden_count) in enumerate(segments):
        k = len(cells)
        if k == 0:
            continue
        if seg_i > 0:
            control = np.argmin(base_scores, axis=1)
        order = _orders(cells, n, cfg.order_mode, rng)
        dd_idx = _sample_hidden_dds(cells, hidden_count, row_prior, rng, n)
        known_idx = np.array([cells.index(c) for c in known_dds], dtype=np.int64)

        reg_deltas = np.empty((k, n, 3), dtype=np.int16)
        reg_winner = np.empty((k, n), dtype=np.int8)
        dd_us = np.empty((k, n), dtype=np.float32)
        dd_bet_us = np.empty((k, n), dtype=np.float32)
        values = np.empty(k, dtype=np.int64)
        for j in range(k):
            values[j] = cell_value(round_no, cells[j][1])
            d, w_, du, dbu = _draw_and_resolve_cell(
                seats, round_no, cells[j][1], values[j], cfg, rng, n
            )
            reg_deltas[j] = d
            reg_winner[j] = w_
            dd_us[j] = du
            dd_bet_us[j] = dbu
        total_value = int(values.sum())

        played_value = np.zeros(n, dtype=np.int64)
        dds_left = np.full(n, hidden_count + len(known_dds), dtype=np.int64)
        dd_sacrifice = float(values.min())
        future_r2_value = 0
        future_r2_dds = 0
        if seg_i == 0 and state.play_round2 and state.round_no == 1:
            future_r2_value = 6 * sum(cell_value(2, r) for r in range(1, 6))
            future_r2_dds = state.round2_dd_count
        trial_rows = np.arange(n)

        for step in range(k):
            cell_at = order[:, step]
            is_dd = np.isin(cell_at, known_idx) if len(known_idx) else np.zeros(n, bool)
            for d_i in range(dd_idx.shape[1]):
                is_dd |= cell_at == dd_idx[:, d_i]
            v_at = values[cell_at]

            deltas = reg_deltas[cell_at, trial_rows].astype(np.int64)
            winner = reg_winner[cell_at, trial_rows].astype(np.int64)

            if is_dd.any():
                remaining_after = (total_value - played_value - v_at).astype(np.int64)
                bets = _dd_bets_vector(
                    seats, control, base_scores, remaining_after + future_r2_value,
                    float(step) / max(k, 1), round_no,
                    dd_bet_us[cell_at, trial_rows].astype(float), n,
                )
                acc = np.array([s.dd_accuracy for s in seats])[control]
                right = dd_us[cell_at, trial_rows] < acc
                dd_delta = np.where(right, bets, -bets)
                add = np.zeros((n, 3), dtype=np.int64)
                add[trial_rows, control] = dd_delta
                deltas = np.where(is_dd[:, None], add, deltas)
                winner = np.where(is_dd, -1, winner)

            base_scores = base_scores + deltas
            control = np.where(winner >= 0, winner, control)
            played_value += v_at
            dds_left -= is_dd.astype(np.int64)

            if cfg.lockout_monitor:
                remaining_value = (total_value - played_value + future_r2_value).astype(float)
                dd_future = dds_left + future_r2_dds
                limit = ROUND_WAGER_LIMIT[2 if (round_no == 2 or future_r2_value) else 1]
                opp_static = not off_arr[:, opp].any()
                if opp_static:
                    # offsets touch only the strategic seat: opponent caps are
                    # shared across all offsets
                    worst = _opponent_cap(
                        base_scores[:, opp[0]], base_scores[:, opp[1]],
                        remaining_value, dd_future, dd_sacrifice, limit,
                    )
                    lead_all = base_scores[:, strat][None, :] + off_arr[:, strat][:, None]
                    locked |= lead_all > 2 * worst[None, :]
                else:
                    for oi in range(n_off):
                        if locked[oi].all():
                            continue
                        lead = base_scores[:, strat] + off_arr[oi, strat]
                        o1 = base_scores[:, opp[0]] + off_arr[oi, opp[0]]
                        o2 = base_scores[:, opp[1]] + off_arr[oi, opp[1]]
                        locked[oi] |= _lockout_mask(
                            lead, o1, o2, remaining_value, dd_future, dd_sacrifice, limit
                        )

    fj_uniforms = rng.uniform(size=(n, 3, 2))
    per_trial = np.zeros((n_off, n))
    group = max(1, min(n_off, int(4_000_000 // max(n, 1)) or 1))
    for g0 in range(0, n_off, group):
        g1 = min(g0 + group, n_off)
        g = g1 - g0
        scores_fj = (
            base_scores[None, :, :] + off_arr[g0:g1][:, None, :]
        ).reshape(g * n, 3)
        u = np.tile(fj_uniforms, (g, 1, 1))
        win = fj_win_probability(seats, scores_fj, strat, u, cfg.fj_rho_humans)
        per_trial[g0:g1] = np.where(
            locked[g0:g1], 1.0, win.reshape(g, n)
        )
    values_mean = per_trial.mean(axis=1)
    std_err = per_trial.std(axis=1, ddof=1) / np.sqrt(n)
    return EquityEstimate(
        offsets=list(offsets),
        values=values_mean,
        std_err=std_err,
        per_trial=per_trial if keep_per_trial else None,
    )


def rollout_equities_chunked(
    state, seats, offsets, n, seed, cfg=None, chunk=200_000, keep_per_trial=False
) -> EquityEstimate:
    """Run `rollout_equities` in seed-indexed blocks and merge the estimates.

    Deterministic for fixed (seed, chunk) regardless of how the merge is
    scheduled; keeps peak memory flat for large n.
    """
    done = 0
    parts = []
    block = 0
    while done < n:
        m = min(chunk, n - done)
        rng = np.random.default_rng(np.random.SeedSequence((seed, block)))
        parts.append((m, rollout_equities(state, seats, offsets, m, rng, cfg,
                                          keep_per_trial=keep_per_trial)))
        done += m
        block += 1
    values = np.zeros(len(offsets))
    var = np.zeros(len(offsets))
    for m, est in parts:
        values += m * est.values
    values /= n
    for m, est in parts:
        var += (m * est.std_err**2 * m + m * (est.values - values) ** 2)
    std_err = np.sqrt(var) / n
    per_trial = None
    if keep_per_trial:
        per_trial = np.concatenate([e.per_trial for _, e in parts], axis=1)
    return EquityEstimate(list(offsets), values, std_err, per_trial)


def end_of_clue_offsets(d: int, strategic: int = 0) -> list[tuple[int, int, int]]:
    """The 20 end-of-clue delta states scaled by the clue value, mapped so
    the strategic seat is `strategic` and opponents keep index order."""
    out = []
    others = [i for i in range(3) if i != strategic]
    for s in EOC_STATES:
        vec = [0, 0, 0]
        vec[strategic] = s[0] * d
        vec[others[0]] = s[1] * d
        vec[others[1]] = s[2] * d
        out.append(tuple(vec))
    return out
