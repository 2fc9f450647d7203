"""Daily-Double bet selection: in-category confidence, equity-blend bet
curves with risk mitigation, endgame Monte-Carlo wagering, and the
equity-loss audit machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .game import ROUND_WAGER_LIMIT, cell_value
from .gse import GameStateEvaluator, state_features
from .rollout import RolloutConfig, RolloutState, SeatModel, rollout_equities_chunked

# row-based fallback accuracies for second-round DDs: the top two rows are
# markedly easier than the bottom row
ROW_DD_ACCURACY = {
    2: [0.72, 0.72, 0.665, 0.615, 0.57],
    1: [0.68, 0.68, 0.64, 0.60, 0.57],
}


@dataclass(frozen=True)
class InCategoryConfidenceTable:
    """(right, wrong) category evidence -> DD accuracy estimate.

    Beta-binomial posterior mean around the population DD accuracy, with
    the prior strength solved so four-for-four reaches the published
    ceiling (0.75 standard, 0.718 conservative). With no category evidence
    the row-based default accuracy applies instead.
    """

    base_rate: float = 0.64
    prior_strength: float = 9.090909090909092

    @staticmethod
    def standard() -> "InCategoryConfidenceTable":
        # (0.64 s + 4) / (s + 4) = 0.75
        return InCategoryConfidenceTable(prior_strength=1.0 / 0.11)

    @staticmethod
    def conservative() -> "InCategoryConfidenceTable":
        # (0.64 s + 4) / (s + 4) = 0.718
        return InCategoryConfidenceTable(prior_strength=1.128 / 0.078)

    def confidence(
        self, rights: int, wrongs: int, row: int = 3, round_no: int = 2,
    ) -> float:
        if rights < 0 or wrongs < 0 or rights + wrongs > 4:
            raise ValueError("category evidence counts out of range")
        if rights == 0 and wrongs == 0:
            return ROW_DD_ACCURACY[round_no][row - 1]
        s = self.prior_strength
        return float((self.base_rate * s + rights) / (s + rights + wrongs))


def in_category_confidence(
    table: InCategoryConfidenceTable, rights: int, wrongs: int,
    row: int = 3, round_no: int = 2,
) -> float:
    return table.confidence(rights, wrongs, row=row, round_no=round_no)


@dataclass(frozen=True)
class RiskParams:
    """volatility_coefficient = 0 and downside_cap = 1 recover risk-neutral
    betting exactly."""

    volatility_coefficient: float = 0.05
    downside_cap: float = 0.30

    @staticmethod
    def neutral() -> "RiskParams":
        return RiskParams(volatility_coefficient=0.0, downside_cap=1.0)


@dataclass
class BetEvaluation:
    bets: np.ndarray
    equity_right: np.ndarray
    equity_wrong: np.ndarray
    blended: np.ndarray  # p*right + (1-p)*wrong, exactly
    penalized: np.ndarray
    allowed: np.ndarray  # downside filter mask
    chosen_bet: int
    chosen_equity: float
    risk_neutral_bet: int
    p_dd: float
    method: str
    std_err: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "bets": self.bets.tolist(),
            "equity_right": self.equity_right.tolist(),
            "equity_wrong": self.equity_wrong.tolist(),
            "blended": self.blended.tolist(),
            "chosen_bet": int(self.chosen_bet),
            "chosen_equity": float(self.chosen_equity),
            "risk_neutral_bet": int(self.risk_neutral_bet),
            "p_dd": self.p_dd,
            "method": self.method,
        }


def bet_grid(lo: int, hi: int, step: int = 100) -> np.ndarray:
    grid = np.arange(0, hi + 1, step, dtype=np.int64)
    grid = grid[grid >= lo] if lo > step else grid
    if lo not in grid:
        grid = np.concatenate([[lo], grid])
    if hi not in grid:
        grid = np.concatenate([grid, [hi]])
    return np.unique(np.clip(grid, lo, hi))


def _finish_evaluation(
    bets, e_right, e_wrong, p_dd, risk: RiskParams, method: str, std_err=None
) -> BetEvaluation:
    blended = p_dd * e_right + (1 - p_dd) * e_wrong
    sigma = np.sqrt(p_dd * (1 - p_dd)) * np.abs(e_right - e_wrong)
    penalized = blended - risk.volatility_coefficient * sigma
    downside = e_wrong[0] - e_wrong  # relative to the minimum bet
    allowed = downside <= risk.downside_cap + 1e-12
    if not allowed.any():
        allowed[0] = True
    masked = np.where(allowed, penalized, -np.inf)
    idx = int(np.argmax(masked))
    return BetEvaluation(
        bets=bets,
        equity_right=e_right,
        equity_wrong=e_wrong,
        blended=blended,
        penalized=penalized,
        allowed=allowed,
        chosen_bet=int(bets[idx]),
        chosen_equity=float(blended[idx]),
        risk_neutral_bet=int(bets[int(np.argmax(blended))]),
        p_dd=p_dd,
        method=method,
        std_err=std_err,
    )


def select_dd_bet(
    evaluator: GameStateEvaluator,
    scores,
    bot_seat: int,
    p_dd: float,
    round_no: int,
    remaining_dds_after: int,
    remaining_clues_after: int,
    remaining_value_after: int,
    risk: RiskParams | None = None,
    step: int = 100,
) -> BetEvaluation:
    """Evaluate every legal bet through the trained evaluator (Eq.-1 blend
    of the right/wrong continuation values) and apply risk controls."""
    risk = risk or RiskParams()
    lo = 5
    hi = max(scores[bot_seat], ROUND_WAGER_LIMIT[round_no])
    bets = bet_grid(lo, hi, step)
    feats_right = []
    feats_wrong = []
    for bet in bets:
        for sign, acc in ((1, feats_right), (-1, feats_wrong)):
            s = list(scores)
            s[bot_seat] += sign * int(bet)
            acc.append(
                state_features(
                    s, remaining_dds_after, remaining_clues_after,
                    remaining_value_after, round_no, True, bot_seat,
                )
            )
    e_right = evaluator.value_batch(np.array(feats_right))
    e_wrong = evaluator.value_batch(np.array(feats_wrong))
    return _finish_evaluation(bets, e_right, e_wrong, p_dd, risk, "gse")


def endgame_mc_bet(
    scores,
    bot_seat: int,
    p_dd: float,
    seats: list[SeatModel],
    round_no: int,
    remaining: list[tuple[int, int]],
    n_trials: int = 100_000,
    seed: int = 0,
    risk: RiskParams | None = None,
    step: int = 100,
    cfg: RolloutConfig | None = None,
    dd_remaining: list[tuple[int, int]] | None = None,
    dd_hidden_count: int = 0,
) -> BetEvaluation:
    """Endgame wager via paired rollouts: one trial stream re-scored at
    +bet and -bet for every candidate bet (common random numbers)."""
    risk = risk or RiskParams()
    lo = 5
    hi = max(scores[bot_seat], ROUND_WAGER_LIMIT[round_no])
    bets = bet_grid(lo, hi, step)
    offsets = []
    for bet in bets:
        v = [0, 0, 0]
        v[bot_seat] = int(bet)
        offsets.append(tuple(v))
        v = [0, 0, 0]
        v[bot_seat] = -int(bet)
        offsets.append(tuple(v))
    cfg = cfg or RolloutConfig(strategic_seat=bot_seat)
    state = RolloutState(
        scores=tuple(scores),
        control=bot_seat,  # DD player keeps control either way
        round_no=round_no,
        remaining=list(remaining),
        dd_remaining=dd_remaining,
        dd_hidden_count=dd_hidden_count,
    )
    est = rollout_equities_chunked(state, seats, offsets, n_trials, seed, cfg)
    e_right = est.values[0::2]
    e_wrong = est.values[1::2]
    se = np.sqrt(est.std_err[0::2] ** 2 + est.std_err[1::2] ** 2)
    return _finish_evaluation(bets, e_right, e_wrong, p_dd, risk, "endgame_mc", se)


# --------------------------------------------------------------------------
# Audits
# --------------------------------------------------------------------------

@dataclass
class DDScenario:
    """One DD wagering decision point for audits and error bounds."""

    scores: tuple[int, int, int]
    player: int
    round_no: int
    remaining: list[tuple[int, int]]
    confidence: float
    human_bet: int | None = None
    outcome_right: bool | None = None
    row: int = 3

    @staticmethod
    def from_json_line(line: str) -> "DDScenario":
        doc = json.loads(line)
        return DDScenario(
            scores=tuple(doc["scores"]),
            player=int(doc["player"]),
            round_no=int(doc.get("round", 2)),
            remaining=[tuple(c) for c in doc["remaining"]],
            confidence=float(doc.get("confidence", 0.0)) or 0.0,
            human_bet=doc.get("bet"),
            outcome_right=doc.get("right"),
            row=int(doc.get("row", 3)),
        )


def scenario_confidence(sc: DDScenario) -> float:
    if sc.confidence:
        return sc.confidence
    return ROW_DD_ACCURACY[sc.round_no][sc.row - 1]


def equity_loss_audit(
    policy_bet_fn,
    scenarios: list[DDScenario],
    seats_fn,
    n_trials: int = 60_000,
    seed: int = 0,
) -> dict:
    """Mean equity loss of a bet policy against the exhaustive-curve oracle.

    For each scenario the oracle evaluates the full bet curve by paired
    rollouts; the loss is the oracle-best blended equity minus the blended
    equity of the policy's bet, read off the same curve.
    """
    losses = []
    for i, sc in enumerate(scenarios):
        conf = scenario_confidence(sc)
        ev = endgame_mc_bet(
            sc.scores, sc.player, conf, seats_fn(sc), sc.round_no,
            sc.remaining, n_trials=n_trials, seed=seed + i,
            risk=RiskParams.neutral(),
        )
        policy_bet = int(policy_bet_fn(sc, ev))
        j = int(np.argmin(np.abs(ev.bets - policy_bet)))
        losses.append(float(ev.blended.max() - ev.blended[j]))
    losses = np.array(losses)
    return {
        "n": len(losses),
        "mean_loss": float(losses.mean()),
        "max_loss": float(losses.max()),
        "losses": losses,
    }


def human_dd_error_bounds(
    scenarios: list[DDScenario],
    seats_fn,
    n_trials: int = 60_000,
    seed: int = 0,
) -> dict:
    """Lower/upper bounds on population average wagering error.

    Lower bound: historical replacement from the realized outcome; the
    contestant's bet is swapped for the curve-optimal bet and the realized
    right/wrong is kept. Upper bound: full equity-loss scoring of the human
    bet at row-based confidence. Segmented by leader vs trailer.
    """
    rows = []
    skipped = 0
    for i, sc in enumerate(scenarios):
        if sc.human_bet is None:
            skipped += 1
            continue
        conf = scenario_confidence(sc)
        ev = endgame_mc_bet(
            sc.scores, sc.player, conf, seats_fn(sc), sc.round_no, sc.remaining,
            n_trials=n_trials, seed=seed + i, risk=RiskParams.neutral(),
        )
        best_idx = int(np.argmax(ev.blended))
        j = int(np.argmin(np.abs(ev.bets - sc.human_bet)))
        upper = float(ev.blended[best_idx] - ev.blended[j])
        lower = None
        if sc.outcome_right is not None:
            side = ev.equity_right if sc.outcome_right else ev.equity_wrong
            lower = float(side[best_idx] - side[j])
        leader = sc.scores[sc.player] == max(sc.scores)
        rows.append(
            {
                "leader": leader,
                "upper": upper,
                "lower": lower,
                "human_bet": sc.human_bet,
                "mc_bet": int(ev.bets[best_idx]),
            }
        )
    def seg(pred):
        sel = [r for r in rows if pred(r)]
        lowers = [r["lower"] for r in sel if r["lower"] is not None]
        return {
            "n": len(sel),
            "lower": float(np.mean(lowers)) if lowers else float("nan"),
            "upper": float(np.mean([r["upper"] for r in sel])) if sel else float("nan"),
            "avg_human_bet": float(np.mean([r["human_bet"] for r in sel])) if sel else 0,
            "avg_mc_bet": float(np.mean([r["mc_bet"] for r in sel])) if sel else 0,
        }
    return {
        "all": seg(lambda r: True),
        "leader": seg(lambda r: r["leader"]),
        "trailer": seg(lambda r: not r["leader"]),
        "skipped": skipped,
    }
