"""Bayesian inference over hidden DD locations and the square-selection
policy built on it.

Round 1 tracks a marginal over cells; round 2 tracks the joint over
unordered distinct-column cell pairs, which keeps the same-column exclusion
exact under multiplicative updates. Updates are pure: each observation
returns a new belief.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .game import GameState, N_COLS, N_ROWS, cell_value
from .placement import PlacementPrior

Cell = tuple[int, int]


@dataclass(frozen=True)
class DDBeliefState:
    """Posterior over hidden DD locations for one round's board."""

    round: int
    marginal: dict[Cell, float] | None  # round 1
    joint: dict[frozenset, float] | None  # round 2
    observed: frozenset = frozenset()
    found: frozenset = frozenset()

    @staticmethod
    def fresh(prior: PlacementPrior, round_no: int) -> "DDBeliefState":
        if round_no == 1:
            return DDBeliefState(round=1, marginal=dict(prior.round1), joint=None)
        return DDBeliefState(round=2, marginal=None, joint=dict(prior.round2_joint))

    def dds_unfound(self) -> float:
        memo = getattr(self, "_unfound_memo", None)
        if memo is None:
            memo = float(sum(self.dd_probability_grid().values()))
            object.__setattr__(self, "_unfound_memo", memo)
        return memo

    def dd_probability_grid(self) -> dict[Cell, float]:
        """Per-cell probability of holding an unfound DD; sums to the
        expected number of DDs still hidden."""
        cached = getattr(self, "_grid_memo", None)
        if cached is not None:
            return cached
        if self.round == 1:
            out = dict(self.marginal)
        else:
            out = {}
            for pair, w in self.joint.items():
                for cell in pair:
                    out[cell] = out.get(cell, 0.0) + w
        object.__setattr__(self, "_grid_memo", out)
        return out

    def cell_probability(self, cell: Cell) -> float:
        return self.dd_probability_grid().get(cell, 0.0)


def observe_no_dd(belief: DDBeliefState, cell: Cell) -> DDBeliefState:
    """Condition on `cell` revealed as a regular clue."""
    if cell in belief.observed:
        raise ValueError(f"cell {cell} already observed")
    if cell in belief.found:
        raise ValueError(f"cell {cell} already known to hold a DD")
    observed = belief.observed | {cell}
    if belief.round == 1:
        p_k = belief.marginal.get(cell, 0.0)
        if p_k >= 1.0 - 1e-15:
            raise ValueError("prior claims this cell surely holds the DD")
        rest = 1.0 - p_k
        new = {
            c: (0.0 if c == cell else w / rest) for c, w in belief.marginal.items()
        }
        return replace(belief, marginal=new, observed=observed)
    mass = sum(w for pair, w in belief.joint.items() if cell not in pair)
    if mass <= 0.0 and any(w > 0 for w in belief.joint.values()):
        raise ValueError("observation inconsistent with the prior support")
    new_joint = {
        pair: (w / mass if cell not in pair else 0.0)
        for pair, w in belief.joint.items()
    } if mass > 0 else {pair: 0.0 for pair in belief.joint}
    return replace(belief, joint=new_joint, observed=observed)


def observe_dd_found(belief: DDBeliefState, cell: Cell) -> DDBeliefState:
    """Condition on `cell` revealed as a DD."""
    if cell in belief.observed:
        raise ValueError(f"cell {cell} already observed")
    observed = belief.observed | {cell}
    found = belief.found | {cell}
    if belief.round == 1:
        if belief.marginal.get(cell, 0.0) <= 0.0:
            raise ValueError("prior assigned zero probability to this DD location")
        new = {c: 0.0 for c in belief.marginal}
        return replace(belief, marginal=new, observed=observed, found=found)
    if len(belief.found) == 0:
        mass = sum(w for pair, w in belief.joint.items() if cell in pair)
        if mass <= 0.0:
            raise ValueError("prior assigned zero probability to this DD location")
        # collapse onto the partner distribution: pairs containing the found
        # cell, reindexed by the partner
        new_joint = {
            pair: (w / mass if cell in pair else 0.0)
            for pair, w in belief.joint.items()
        }
        return replace(belief, joint=new_joint, observed=observed, found=found)
    # second DD found: nothing hidden remains
    prev = next(iter(belief.found))
    key = frozenset((prev, cell))
    if belief.joint.get(key, 0.0) <= 0.0:
        raise ValueError("prior assigned zero probability to this DD pair")
    new_joint = {pair: 0.0 for pair in belief.joint}
    return replace(belief, joint=new_joint, observed=observed, found=found)


def dd_probability_grid(belief: DDBeliefState) -> dict[Cell, float]:
    memo = getattr(belief, "_public_grid_memo", None)
    if memo is not None:
        return memo
    grid = dict(belief.dd_probability_grid())
    for cell in belief.found:
        grid[cell] = 0.0
    object.__setattr__(belief, "_public_grid_memo", grid)
    return grid


# --------------------------------------------------------------------------
# Retain-control estimate
# --------------------------------------------------------------------------

from functools import lru_cache


@lru_cache(maxsize=65536)
def retain_control_prob(
    bot_attempt: float,
    bot_precision: float,
    bot_weight: float,
    opp_b: tuple[float, float],
    opp_p: tuple[float, float],
    rho_b: float = 0.2,
    rho_p: float = 0.2,
) -> float:
    """Probability the selector keeps board control if the cell is regular.

    Control is retained when the selector answers correctly at any stage or
    when the clue dies unanswered. Closed-form enumeration over opponent
    attempt/right patterns and race orders; opponent draws are fixed per
    clue, mirroring the simulation model.
    """
    from .correlated import pair_joint

    b_joint = pair_joint(opp_b[0], opp_b[1], rho_b)
    p_joint = pair_joint(opp_p[0], opp_p[1], rho_p)
    total = 0.0
    for a1 in (0, 1):
        for a2 in (0, 1):
            pa = b_joint[a1, a2]
            if pa == 0:
                continue
            for r1 in (0, 1):
                for r2 in (0, 1):
                    pr = p_joint[r1, r2]
                    if pr == 0:
                        continue
                    total += pa * pr * _retain_given(
                        bot_attempt, bot_precision, bot_weight, a1, r1, a2, r2
                    )
    return total


def _retain_given(b_w, p_w, w, a1, r1, a2, r2) -> float:
    """P(selector retains control) for fixed opponent attempts/rights."""

    def race(selector_in: bool, opp: list[tuple[int, int]]) -> float:
        # opp: list of (attempting-flag ignored; right flag) for active opps
        weights = ([w] if selector_in else []) + [1.0] * len(opp)
        total_w = sum(weights)
        if total_w == 0 or (not selector_in and not opp):
            return 1.0  # clue dies with selector in control
        val = 0.0
        if selector_in:
            p_first = w / total_w
            # selector answers: right keeps control; wrong removes selector
            val += p_first * (p_w + (1 - p_w) * race(False, opp))
        for i, (_, r) in enumerate(opp):
            p_first = 1.0 / total_w
            rest = opp[:i] + opp[i + 1 :]
            if r:
                val += p_first * 0.0
            else:
                val += p_first * race(selector_in, rest)
        return val

    opp = []
    if a1:
        opp.append((1, r1))
    if a2:
        opp.append((1, r2))
    if b_w <= 0:
        return race(False, opp)
    return b_w * race(True, opp) + (1 - b_w) * race(False, opp)


# --------------------------------------------------------------------------
# Selection policy
# --------------------------------------------------------------------------

LEARNING_ALPHA_DEFAULT = 0.1


def learning_scores(unrevealed: list[Cell], round_no: int) -> dict[Cell, float]:
    """Post-DD selection: lowest cell of the category with the greatest
    learning potential, scored as (cells - 1) x total remaining value."""
    cols: dict[int, list[int]] = {}
    for c, r in unrevealed:
        cols.setdefault(c, []).append(r)
    out: dict[Cell, float] = {}
    for c, rows in cols.items():
        rows.sort()
        potential = (len(rows) - 1) * sum(cell_value(round_no, r) for r in rows)
        for r in rows:
            out[(c, r)] = potential if r == rows[-1] else -1.0
    return out


def select_square(
    unrevealed: list[Cell],
    belief: DDBeliefState | None,
    policy: str = "bayesian",
    alpha: float = LEARNING_ALPHA_DEFAULT,
    retain_fn=None,
    row_prior: np.ndarray | None = None,
    round_no: int = 2,
) -> Cell:
    """Pick the next square for the strategic player.

    `bayesian` maximizes p_DD + alpha * p_RC while DDs remain, then the
    learning heuristic; `simple_seeking` uses the row-frequency prior;
    `lrtb` scans left-to-right, top-to-bottom. Ties break toward the lowest
    column, then the lowest row.
    """
    if not unrevealed:
        raise ValueError("no unrevealed cells to select")
    cells = sorted(unrevealed)
    if policy == "lrtb":
        return cells[0]
    if policy == "simple_seeking":
        if row_prior is None:
            raise ValueError("simple_seeking requires a row prior")
        return max(cells, key=lambda cr: (row_prior[cr[1] - 1], -cr[0], -cr[1]))
    if policy != "bayesian":
        raise ValueError(f"unknown policy {policy}")
    dds_left = belief.dds_unfound() if belief is not None else 0.0
    if belief is not None and dds_left > 1e-9:
        grid = dd_probability_grid(belief)
        scores = {}
        for cell in cells:
            p_dd = grid.get(cell, 0.0)
            p_rc = retain_fn(cell) if retain_fn else 0.0
            scores[cell] = p_dd + alpha * p_rc
        return max(cells, key=lambda cr: (scores[cr], -cr[0], -cr[1]))
    learn = learning_scores(cells, round_no)
    return max(cells, key=lambda cr: (learn[cr], -cr[0], -cr[1]))
