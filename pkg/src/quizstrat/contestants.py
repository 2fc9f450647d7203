"""Stochastic contestant behavior: profiles, wagering and selection models.

Human models are fitted populations, not individuals: every draw is a
function of (inputs, rng stream) only. Final-round bets are mixtures over
strategy-anchored components (cover, bankroll, keepout, overtake,
two-thirds, anchored random bands); anchoring the random bands to the same
breakpoints the deterministic components use keeps coupled simulations
consistent across offset states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .game import ROUND_WAGER_LIMIT, GameState, N_COLS, N_ROWS, is_lockout


class WagerModel(str, Enum):
    AVERAGE_DD = "average_dd"
    AGGRESSIVE_HEURISTIC_DD = "aggressive_heuristic_dd"


class SelectionModel(str, Enum):
    AVERAGE = "average"
    DD_SEEKING = "dd_seeking"
    ANTI_LEARNING = "anti_learning"


@dataclass(frozen=True)
class ContestantProfile:
    """Performance parameters of one modeled human contestant population."""

    name: str
    attempt_rate: float
    buzz_correlation: float
    precision: float
    precision_correlation: float
    dd_accuracy: float
    fj_accuracy: float
    fj_correlation: float = 0.3
    wager_model: WagerModel = WagerModel.AVERAGE_DD
    selection_model: SelectionModel = SelectionModel.AVERAGE
    refined_table: dict | None = None  # {round: {"b": [5], "p": [5]}}

    def __post_init__(self):
        for name in ("attempt_rate", "precision", "dd_accuracy", "fj_accuracy"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be a probability, got {v}")
        for name in ("buzz_correlation", "precision_correlation", "fj_correlation"):
            v = getattr(self, name)
            if not (-1.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [-1, 1], got {v}")

    def clue_params(self, round_no: int, row: int) -> tuple[float, float]:
        """(attempt rate, precision) for a clue, refined by round/row if set."""
        if self.refined_table is None:
            return self.attempt_rate, self.precision
        tbl = self.refined_table[round_no]
        return tbl["b"][row - 1], tbl["p"][row - 1]


# Fig.-5-style refined table, digitized qualitatively: easier rows buzz more
# and answer better; values are approximate and config-overridable.
REFINED_AVERAGE_TABLE = {
    1: {
        "b": [0.73, 0.66, 0.61, 0.56, 0.53],
        "p": [0.935, 0.895, 0.870, 0.845, 0.812],
        "noise": [0.50, 0.47, 0.44, 0.42, 0.40],
    },
    2: {
        "b": [0.70, 0.64, 0.60, 0.55, 0.51],
        "p": [0.930, 0.890, 0.865, 0.840, 0.808],
        "noise": [0.49, 0.46, 0.43, 0.41, 0.39],
    },
}


def refined_noise_latent(round_no: int, row: int) -> float:
    """Precision-noise copula correlation for the refined per-row models.

    Easier rows couple the contestants' right/wrong noise more strongly: a
    miss on an easy clue says more about the clue than about the player.
    Values are calibration constants against the early-game threshold
    anchors and are flagged approximate.
    """
    return REFINED_AVERAGE_TABLE[round_no]["noise"][row - 1]

PRESETS: dict[str, ContestantProfile] = {
    "average": ContestantProfile(
        name="average",
        attempt_rate=0.61,
        buzz_correlation=0.2,
        precision=0.87,
        precision_correlation=0.2,
        dd_accuracy=0.64,
        fj_accuracy=0.50,
        wager_model=WagerModel.AVERAGE_DD,
        selection_model=SelectionModel.AVERAGE,
    ),
    "champion": ContestantProfile(
        name="champion",
        attempt_rate=0.80,
        buzz_correlation=0.2,
        precision=0.89,
        precision_correlation=0.2,
        dd_accuracy=0.75,
        fj_accuracy=0.60,
        wager_model=WagerModel.AGGRESSIVE_HEURISTIC_DD,
        selection_model=SelectionModel.DD_SEEKING,
    ),
    "grand_champion": ContestantProfile(
        name="grand_champion",
        attempt_rate=0.855,
        buzz_correlation=0.2,
        precision=0.915,
        precision_correlation=0.2,
        dd_accuracy=0.805,
        fj_accuracy=0.66,
        wager_model=WagerModel.AGGRESSIVE_HEURISTIC_DD,
        selection_model=SelectionModel.ANTI_LEARNING,
    ),
}


def refined_average_profile() -> ContestantProfile:
    import dataclasses

    return dataclasses.replace(PRESETS["average"], refined_table=REFINED_AVERAGE_TABLE)


# --------------------------------------------------------------------------
# Daily Double wagering
# --------------------------------------------------------------------------

ROUND_NUMBER_LADDER = [500, 1000, 1500, 2000, 2500, 3000, 3500, 4000, 4500, 5000]


def average_dd_bet_mean(role: int, frac_played: float, round_no: int) -> float:
    """Mean bet (dollars) by score rank and round progress, Fig.-2 shape.

    role 0 = leader, 1 = second, 2 = third; leaders shade down as the round
    progresses, trailers stay aggressive longer.
    """
    base = [2600.0, 2900.0, 2600.0][role]
    taper = [0.45, 0.25, 0.15][role]
    mu = base * (1.0 - taper * frac_played)
    if round_no == 1:
        mu *= 0.5
    return mu


def human_dd_bet(
    profile: ContestantProfile, state: GameState, rng: np.random.Generator
) -> int:
    """Draw a DD wager for the player in control under the profile's model."""
    player = state.control
    score = state.scores[player]
    lo = 5
    hi = max(score, ROUND_WAGER_LIMIT[state.board.round])
    if profile.wager_model == WagerModel.AGGRESSIVE_HEURISTIC_DD:
        remaining_after = state.board.remaining_value() - state.clue_value()
        best_opp = max(state.scores[i] for i in range(3) if i != player)
        if score > 2 * (best_opp + remaining_after):
            return lo
        return hi
    # AverageDD: round-number ladder with a lognormal-like spread around the
    # role/stage-conditioned mean
    played = len(state.board.revealed)
    frac = min(played / 30.0, 1.0)
    role = sorted(range(3), key=lambda i: -state.scores[i]).index(player)
    mu = average_dd_bet_mean(role, frac, state.board.round)
    ladder = np.array(ROUND_NUMBER_LADDER, dtype=float)
    if state.board.round == 1:
        ladder = ladder / 2.0
    weights = np.exp(-0.5 * (np.log(ladder / mu) / 0.55) ** 2)
    weights /= weights.sum()
    bet = int(ladder[rng.choice(len(ladder), p=weights)])
    return int(min(max(bet, lo), hi))


# --------------------------------------------------------------------------
# Final-round wagering
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FJComponent:
    """One betting-logic component: a fixed anchor or an anchored band."""

    kind: str
    weight: float


# group key: (band, keepout) where band is "lt23" | "23to34" | "ge34" and
# keepout is True iff B >= 2C. B-models for the lt23 band put all mass at or
# above the overtake anchor: small bets cannot win there.
B_GROUP_WEIGHTS: dict[tuple[str, bool], list[FJComponent]] = {
    ("ge34", True): [
        FJComponent("bankroll", 0.26),
        FJComponent("keepout_c", 0.27),
        FJComponent("overtake_a", 0.15),
        FJComponent("two_thirds", 0.08),
        FJComponent("rand_small", 0.12),
        FJComponent("rand_big", 0.12),
    ],
    ("ge34", False): [
        FJComponent("cover_c", 0.25),
        FJComponent("bankroll", 0.30),
        FJComponent("two_thirds", 0.15),
        FJComponent("overtake_a", 0.15),
        FJComponent("rand_small", 0.07),
        FJComponent("rand_big", 0.08),
    ],
    ("23to34", True): [
        FJComponent("bankroll", 0.28),
        FJComponent("keepout_c", 0.25),
        FJComponent("two_thirds", 0.15),
        FJComponent("overtake_a", 0.12),
        FJComponent("rand_small", 0.10),
        FJComponent("rand_big", 0.10),
    ],
    ("23to34", False): [
        FJComponent("cover_c", 0.25),
        FJComponent("bankroll", 0.30),
        FJComponent("two_thirds", 0.15),
        FJComponent("overtake_a", 0.10),
        FJComponent("rand_small", 0.10),
        FJComponent("rand_big", 0.10),
    ],
    ("lt23", True): [
        FJComponent("bankroll", 0.55),
        FJComponent("overtake_a", 0.30),
        FJComponent("rand_big", 0.15),
    ],
    ("lt23", False): [
        FJComponent("bankroll", 0.55),
        FJComponent("overtake_a", 0.30),
        FJComponent("rand_big", 0.15),
    ],
}

# leaders bet near-bankroll only under pressure (B at 3/4 of A or more);
# with a comfortable lead the mass sits on the cover line and honest
# under-cover scatter
A_COMPONENTS_LIVE_CLOSE = [
    FJComponent("cover", 0.62),
    FJComponent("bankroll", 0.18),
    FJComponent("rand_under_cover", 0.20),
]
A_COMPONENTS_LIVE_AHEAD = [
    FJComponent("cover", 0.78),
    FJComponent("rand_under_cover", 0.22),
]
A_COMPONENTS_LOCKED = [
    FJComponent("max_safe", 0.5),
    FJComponent("zero", 0.3),
    FJComponent("rand_safe", 0.2),
]
C_COMPONENTS = [
    FJComponent("bankroll", 1 / 3),
    FJComponent("min_rational", 1 / 3),
    FJComponent("rand_small", 1 / 3),
]


def fj_band(a: int, b: int) -> str:
    if 3 * b >= 2 * a and 4 * b < 3 * a:
        return "23to34"
    if 4 * b >= 3 * a:
        return "ge34"
    return "lt23"


def fj_component_amount(
    kind: str, role: str, a: int, b: int, c: int, u: float
) -> int:
    """Resolve a component to a dollar amount for the given role's bankroll.

    `u` feeds the banded components; fixed anchors ignore it. Amounts are
    clamped to the bettor's [0, score] range.
    """
    own = {"A": a, "B": b, "C": c}[role]
    if kind == "bankroll":
        amt = own
    elif kind == "zero":
        amt = 0
    elif kind == "cover":
        amt = max(2 * b - a, 0)
    elif kind == "max_safe":
        amt = max(a - 2 * b - 1, 0)
    elif kind == "rand_safe":
        amt = int(u * (max(a - 2 * b - 1, 0) + 1))
    elif kind == "rand_under_cover":
        amt = int(u * (max(2 * b - a, 0) + 1))
    elif kind == "keepout_c":
        amt = max(b - 2 * c, 0)
    elif kind == "cover_c":
        amt = max(2 * c - b, 0)
    elif kind == "overtake_a":
        amt = min(a - b + 1, own)
    elif kind == "two_thirds":
        amt = max(3 * b - 2 * a, 0)
    elif kind == "rand_small":
        if role == "C":
            cap = own // 4
        else:
            caps = [own // 4]
            if 3 * b - 2 * a >= 0:
                caps.append(3 * b - 2 * a)
            if b - 2 * c >= 0:
                caps.append(b - 2 * c)
            cap = min(caps)
        amt = int(u * (cap + 1))
    elif kind == "rand_big":
        lo = min(a - b + 1, own)
        amt = lo + int(u * (own - lo + 1))
    elif kind == "min_rational":
        amt = max(2 * (a - b) - c, 0)
    else:
        raise ValueError(f"unknown FJ component {kind}")
    return int(min(max(amt, 0), own))


def fj_components_for(role: str, a: int, b: int, c: int) -> list[FJComponent]:
    if role == "A":
        if 2 * b <= a:
            return A_COMPONENTS_LOCKED
        return A_COMPONENTS_LIVE_CLOSE if 4 * b >= 3 * a else A_COMPONENTS_LIVE_AHEAD
    if role == "B":
        return B_GROUP_WEIGHTS[(fj_band(a, b), b >= 2 * c)]
    return C_COMPONENTS


def human_fj_bet_from_uniforms(
    role: str, a: int, b: int, c: int, u_mix: float, u_amt: float
) -> int:
    """Deterministic bet given the two uniform draws; shared by the scalar
    and vectorized paths so coupled trials stay consistent."""
    comps = fj_components_for(role, a, b, c)
    total = sum(x.weight for x in comps)
    acc = 0.0
    chosen = comps[-1]
    for comp in comps:
        acc += comp.weight / total
        if u_mix <= acc:
            chosen = comp
            break
    return fj_component_amount(chosen.kind, role, a, b, c, u_amt)


def human_fj_bet(role: str, scores_sorted: tuple[int, int, int], rng: np.random.Generator) -> int:
    """Draw a bet for the player in `role` given role-sorted scores (A, B, C)."""
    a, b, c = scores_sorted
    return human_fj_bet_from_uniforms(role, a, b, c, rng.uniform(), rng.uniform())


def assign_roles(scores) -> list[int]:
    """Player indices sorted into (A, B, C) roles; ties broken by index."""
    return sorted(range(3), key=lambda i: (-scores[i], i))


# --------------------------------------------------------------------------
# Square selection
# --------------------------------------------------------------------------

STAY_IN_CATEGORY_P = 0.6
TOPMOST_P = 0.9


def _columns_with_cells(unrevealed: list[tuple[int, int]]) -> dict[int, list[int]]:
    cols: dict[int, list[int]] = {}
    for c, r in unrevealed:
        cols.setdefault(c, []).append(r)
    for c in cols:
        cols[c].sort()
    return cols


def learning_potential(cols: dict[int, list[int]], round_no: int) -> dict[int, float]:
    """Per-category learning score: (cells - 1) x their total dollar value."""
    from .game import cell_value

    return {
        c: (len(rows) - 1) * sum(cell_value(round_no, r) for r in rows)
        for c, rows in cols.items()
    }


def human_square_selection(
    profile: ContestantProfile,
    state: GameState,
    row_prior: np.ndarray,
    rng: np.random.Generator,
    current_category: int | None = None,
) -> tuple[int, int]:
    """Pick the next cell for a modeled human holding board control."""
    unrevealed = state.board.unrevealed
    if not unrevealed:
        raise ValueError("no unrevealed cells")
    if len(unrevealed) == 1:
        return unrevealed[0]
    cols = _columns_with_cells(unrevealed)
    model = profile.selection_model
    if model == SelectionModel.AVERAGE:
        if (
            current_category is not None
            and current_category in cols
            and rng.uniform() < STAY_IN_CATEGORY_P
        ):
            col = current_category
        else:
            choices = [c for c in cols if c != current_category] or list(cols)
            col = choices[rng.integers(len(choices))]
        rows = cols[col]
        if len(rows) == 1 or rng.uniform() < TOPMOST_P:
            return (col, rows[0])
        return (col, rows[1 + rng.integers(len(rows) - 1)])
    if model == SelectionModel.ANTI_LEARNING and state.dds_remaining == 0:
        pot = learning_potential(cols, state.board.round)
        best = max(pot.items(), key=lambda kv: (kv[1], -kv[0]))[0]
        return (best, cols[best][-1])
    # DD seeking from the known row statistics
    weights = np.array([row_prior[r - 1] for (_, r) in unrevealed])
    best = weights.max()
    top = [cell for cell, w in zip(unrevealed, weights) if w >= best - 1e-12]
    return top[rng.integers(len(top))]


# --------------------------------------------------------------------------
# Single-clue sampling
# --------------------------------------------------------------------------

OUTCOME_CLASSES = ("no_buzz", "R", "W", "WR", "WW", "WWR", "WWW")


@dataclass(frozen=True)
class ClueOutcome:
    """One resolved regular clue: fixed draws plus the race resolution."""

    attempts: tuple[bool, bool, bool]
    correct: tuple[bool, bool, bool]
    answers: tuple  # ordered (seat, right) pairs
    deltas: tuple[int, int, int]
    winner: int  # -1 when nobody answered correctly
    category: str

    def __post_init__(self):
        gains = sum(1 for d in self.deltas if d > 0)
        if gains > 1 or len(self.answers) > 3:
            raise ValueError("invalid clue resolution")


def classify_outcome(answers) -> str:
    if not answers:
        return "no_buzz"
    wrongs = sum(1 for _, r in answers if not r)
    ended_right = answers[-1][1]
    return "W" * wrongs + ("R" if ended_right else "")


def sample_regular_clue(
    profiles: list[ContestantProfile | None],
    value: int,
    rng: np.random.Generator,
    bot_attempt: float | None = None,
    bot_precision: float | None = None,
    bot_seat: int | None = None,
    bot_weight: float = 1.0,
    row: int = 3,
    round_no: int = 2,
) -> ClueOutcome:
    """Sample one regular clue among up to three modeled contestants.

    Human buzz/right draws are correlated pairwise; a bot seat (independent
    of the humans) draws from its own attempt/precision. Draws are fixed
    once; rebounds race the remaining attempters by buzz weight.
    """
    from .correlated import latent_matrix
    from scipy import stats as _st

    humans = [i for i in range(3) if i != bot_seat]
    bs = [0.0] * 3
    ps = [0.0] * 3
    for i in humans:
        bs[i], ps[i] = profiles[i].clue_params(round_no, row)
    rho_b = profiles[humans[0]].buzz_correlation
    rho_p = profiles[humans[0]].precision_correlation
    attempt = [False] * 3
    correct = [False] * 3
    rho_m_b = np.zeros((3, 3))
    rho_m_p = np.zeros((3, 3))
    rho_m_b[humans[0], humans[1]] = rho_m_b[humans[1], humans[0]] = rho_b
    rho_m_p[humans[0], humans[1]] = rho_m_p[humans[1], humans[0]] = rho_p
    means_b = [max(b, 1e-9) for b in bs]
    means_p = [max(p, 1e-9) for p in ps]
    lat_b = latent_matrix(np.array(means_b), rho_m_b)
    lat_p = latent_matrix(np.array(means_p), rho_m_p)
    zb = np.linalg.cholesky(lat_b + 1e-12 * np.eye(3)) @ rng.standard_normal(3)
    zp = np.linalg.cholesky(lat_p + 1e-12 * np.eye(3)) @ rng.standard_normal(3)
    for i in humans:
        attempt[i] = bool(zb[i] > _st.norm.isf(np.clip(bs[i], 1e-9, 1 - 1e-9)))
        correct[i] = bool(zp[i] > _st.norm.isf(np.clip(ps[i], 1e-9, 1 - 1e-9)))
    if bot_seat is not None:
        attempt[bot_seat] = bool(rng.uniform() < (bot_attempt or 0.0))
        correct[bot_seat] = bool(rng.uniform() < (bot_precision or 0.0))

    weights = [1.0] * 3
    if bot_seat is not None:
        weights[bot_seat] = bot_weight
    active = {i for i in range(3) if attempt[i]}
    deltas = [0, 0, 0]
    answers = []
    winner = -1
    while active:
        w = [(weights[i], i) for i in sorted(active)]
        total = sum(x for x, _ in w)
        u = rng.uniform() * total
        acc = 0.0
        pick = w[-1][1]
        for x, i in w:
            acc += x
            if u <= acc:
                pick = i
                break
        answers.append((pick, correct[pick]))
        if correct[pick]:
            deltas[pick] += value
            winner = pick
            break
        deltas[pick] -= value
        active.discard(pick)
    return ClueOutcome(
        attempts=tuple(attempt),
        correct=tuple(correct),
        answers=tuple(answers),
        deltas=tuple(deltas),
        winner=winner,
        category=classify_outcome(answers),
    )
