"""Final-round wagering: exact outcome evaluation, strategy regions,
rule-based bets, best response against the modeled bet distributions, and
historical-replacement scoring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .contestants import (
    ContestantProfile,
    assign_roles,
    human_fj_bet_from_uniforms,
)
from .correlated import triple_outcome_distribution

ROLE_NAMES = ("A", "B", "C")


@dataclass(frozen=True)
class FJSituation:
    """Role-sorted final-round snapshot from the strategic player's seat."""

    scores: tuple[int, int, int]  # (A, B, C), A >= B >= C
    my_role: str  # "A" | "B" | "C"
    my_confidence: float
    opp_accuracy: float = 0.5
    opp_correlation: float = 0.3

    def __post_init__(self):
        a, b, c = self.scores
        if not (a >= b >= c):
            raise ValueError("scores must be role-sorted descending")
        if self.my_role not in ROLE_NAMES:
            raise ValueError(f"bad role {self.my_role}")


@dataclass(frozen=True)
class StrategyRegion:
    two_thirds_available: bool
    b_covers_overtake: bool
    b_keepout_c: bool
    equal_spacing_side: int
    c_alive: bool
    c_reaches_2ab: bool
    c_overtakes_a: bool
    c_two_thirds_of_b: bool
    lock: bool
    lock_tie: bool

    def flags(self) -> dict:
        return dict(self.__dict__)


def classify_region(a: int, b: int, c: int) -> StrategyRegion:
    """All region flags, scale-invariant (products only, no division)."""
    if not (a >= b >= c >= 0):
        raise ValueError("scores must satisfy A >= B >= C >= 0")
    return StrategyRegion(
        two_thirds_available=3 * b >= 2 * a,
        b_covers_overtake=4 * b >= 3 * a,
        b_keepout_c=2 * c < b,
        equal_spacing_side=int(np.sign(2 * b - a - c)),
        c_alive=c >= a - b,
        c_reaches_2ab=c >= 2 * (a - b),
        c_overtakes_a=2 * c >= a,
        c_two_thirds_of_b=3 * c >= 2 * b,
        lock=2 * b < a,
        lock_tie=2 * b == a,
    )


def evaluate_fj_exact(
    scores,
    wagers,
    accuracies,
    rho_pairs,
    require_positive: bool = True,
) -> np.ndarray:
    """Exact per-player win probabilities over the eight outcome triples.

    Players barred from the final round (non-positive score under the show
    rule) wager nothing and their answer is ignored. Ties for the top
    nonnegative score all win.
    """
    scores = np.asarray(scores, dtype=float)
    wagers = np.asarray(wagers, dtype=float).copy()
    accuracies = np.asarray(accuracies, dtype=float).copy()
    barred = scores <= 0 if require_positive else scores < 0
    wagers[barred] = 0.0
    accuracies[barred] = 0.0
    for i in range(3):
        if not barred[i] and not (0 <= wagers[i] <= scores[i]):
            raise ValueError(f"wager {wagers[i]} illegal for score {scores[i]}")
    weights = triple_outcome_distribution(accuracies, np.asarray(rho_pairs, dtype=float))
    win = np.zeros(3)
    for o0 in (0, 1):
        for o1 in (0, 1):
            for o2 in (0, 1):
                w = weights[o0, o1, o2]
                if w == 0:
                    continue
                sign = np.array([o0, o1, o2]) * 2 - 1
                finals = scores + sign * wagers
                top = finals.max()
                if top >= 0:
                    win += w * (finals == top)
    return win


# --------------------------------------------------------------------------
# Rule-based bets (the fast encapsulation of the best response)
# --------------------------------------------------------------------------

ANTI_TWO_THIRDS_CONF = 0.35


def rule_based_fj_bet(sit: FJSituation, mode: str = "constrained") -> int:
    """Deterministic final-round bet for the strategic player.

    `constrained` always covers as A; `full` additionally permits the
    anti-two-thirds counter as A at unusually low confidence.
    """
    a, b, c = sit.scores
    role = sit.my_role
    if role == "A":
        if 2 * b < a:
            return max(a - 2 * b - 1, 0)
        if 2 * b == a:
            return 0
        if (
            mode == "full"
            and 3 * b >= 2 * a
            and 4 * b < 3 * a
            and sit.my_confidence < ANTI_TWO_THIRDS_CONF
        ):
            return max(3 * a - 4 * b, 0)
        return max(2 * b - a, 0)
    if role == "B":
        if 3 * b >= 2 * a:
            if b < 2 * c:
                need = 2 * c - b
                return need if need <= 3 * b - 2 * a else b
            return max(min(3 * b - 2 * a, b - 2 * c), 0)
        return b
    # C
    if c < a - b:
        return c
    if c < 2 * (a - b):
        return min(max(2 * (a - b) - c, 0), c)
    stay = c - 2 * (a - b)
    if 3 * c >= 2 * b and 4 * b >= 3 * a:
        return min(stay, max(3 * c - 2 * b, 0))
    return stay


# --------------------------------------------------------------------------
# Best response against the shipped opponent bet models
# --------------------------------------------------------------------------

@dataclass
class BetCurve:
    bets: np.ndarray
    equity: np.ndarray
    best_bet: int
    best_equity: float
    indifference_band: tuple[int, int]
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "bets": self.bets.tolist(),
            "equity": self.equity.tolist(),
            "best_bet": int(self.best_bet),
            "best_equity": float(self.best_equity),
            "indifference_band": list(self.indifference_band),
            "seed": self.seed,
        }


INDIFFERENCE_EQUITY = 0.002


def best_response_fj_bet(
    sit: FJSituation,
    n_samples: int = 10_000,
    rng: np.random.Generator | None = None,
    step: int = 100,
) -> BetCurve:
    """Sweep every legal bet against sampled opponent bets.

    Equity of a bet is the average over opponent bet pairs of the exact
    eight-outcome evaluation; ties count as wins. Returns the argmax and the
    band of bets within `INDIFFERENCE_EQUITY` of it.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    a, b, c = sit.scores
    my_idx = ROLE_NAMES.index(sit.my_role)
    opp_roles = [r for i, r in enumerate(ROLE_NAMES) if i != my_idx]
    opp_scores = [sit.scores[ROLE_NAMES.index(r)] for r in opp_roles]
    my_score = sit.scores[my_idx]

    u = rng.uniform(size=(n_samples, 2, 2))
    opp_bets = np.empty((n_samples, 2), dtype=float)
    for j, role in enumerate(opp_roles):
        for i in range(n_samples):
            opp_bets[i, j] = human_fj_bet_from_uniforms(
                role, a, b, c, u[i, j, 0], u[i, j, 1]
            )

    accs = np.array([sit.my_confidence, sit.opp_accuracy, sit.opp_accuracy])
    rho = np.zeros((3, 3))
    rho[1, 2] = rho[2, 1] = sit.opp_correlation
    weights = triple_outcome_distribution(accs, rho)

    if my_score <= 0:
        bets = np.array([0])
    else:
        bets = np.arange(0, my_score + 1, step, dtype=int)
        if bets[-1] != my_score:
            bets = np.append(bets, my_score)
    equity = np.zeros(len(bets))
    # per outcome: opponents' final-score max, sorted for fast thresholding
    for o_me in (0, 1):
        finals_me = my_score + (2 * o_me - 1) * bets
        for o1 in (0, 1):
            for o2 in (0, 1):
                w = float(weights[o_me, o1, o2])
                if w == 0:
                    continue
                f1 = opp_scores[0] + (2 * o1 - 1) * opp_bets[:, 0]
                f2 = opp_scores[1] + (2 * o2 - 1) * opp_bets[:, 1]
                if opp_scores[0] <= 0:
                    f1 = np.full(n_samples, float(opp_scores[0]))
                if opp_scores[1] <= 0:
                    f2 = np.full(n_samples, float(opp_scores[1]))
                opp_max = np.sort(np.maximum(f1, f2))
                # win iff my final >= opp_max and >= 0
                wins = np.searchsorted(opp_max, finals_me, side="right") / n_samples
                wins[finals_me < 0] = 0.0
                equity += w * wins
    best_i = int(np.argmax(equity))
    band = np.where(equity >= equity[best_i] - INDIFFERENCE_EQUITY)[0]
    return BetCurve(
        bets=bets,
        equity=equity,
        best_bet=int(bets[best_i]),
        best_equity=float(equity[best_i]),
        indifference_band=(int(bets[band.min()]), int(bets[band.max()])),
    )


# --------------------------------------------------------------------------
# Historical replacement
# --------------------------------------------------------------------------

@dataclass
class FJRecord:
    """One recorded final round: role-sorted scores, bets and outcomes."""

    scores: tuple[int, int, int]
    bets: tuple[int, int, int]
    right: tuple[bool, bool, bool]
    episode: str = ""

    @staticmethod
    def from_json_line(line: str) -> "FJRecord":
        doc = json.loads(line)
        order = assign_roles(doc["scores"])
        return FJRecord(
            scores=tuple(doc["scores"][i] for i in order),
            bets=tuple(doc["bets"][i] for i in order),
            right=tuple(bool(doc["right"][i]) for i in order),
            episode=str(doc.get("episode", "")),
        )


def record_winners(scores, bets, right) -> set[int]:
    finals = []
    for i in range(3):
        if scores[i] <= 0:
            finals.append(scores[i])
        else:
            finals.append(scores[i] + (bets[i] if right[i] else -bets[i]))
    top = max(finals)
    if top < 0:
        return set()
    return {i for i in range(3) if finals[i] == top}


def historical_replacement(
    records: list[FJRecord],
    strategy,
    role: str,
    include_locked: bool = False,
) -> dict:
    """Win rate of `role` with its recorded bets replaced by `strategy`.

    `strategy(FJSituation, record) -> bet`. Opponent bets and all right/wrong
    outcomes stay as recorded. Locked records are skipped by default;
    malformed ones are counted and skipped.
    """
    ridx = ROLE_NAMES.index(role)
    wins_raw = wins_replaced = used = skipped = 0
    for rec in records:
        a, b, c = rec.scores
        if not (a >= b >= c):
            skipped += 1
            continue
        if not include_locked and 2 * b <= a:
            skipped += 1
            continue
        sit = FJSituation(scores=rec.scores, my_role=role, my_confidence=0.5)
        try:
            new_bet = int(strategy(sit, rec))
        except Exception:
            skipped += 1
            continue
        new_bet = max(0, min(new_bet, rec.scores[ridx]))
        bets = list(rec.bets)
        wins_raw += ridx in record_winners(rec.scores, bets, rec.right)
        bets[ridx] = new_bet
        wins_replaced += ridx in record_winners(rec.scores, bets, rec.right)
        used += 1
    return {
        "role": role,
        "n": used,
        "skipped": skipped,
        "raw_win_rate": wins_raw / used if used else float("nan"),
        "replaced_win_rate": wins_replaced / used if used else float("nan"),
    }
