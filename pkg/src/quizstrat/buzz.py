"""Buzz-in decision system: end-of-clue event trees, threshold extraction,
closed-form score-delta approximations, and the lockout-preserving filter.

The strategic player decides buzz/no-buzz in four live states (initial buzz,
two single-rebound states, double rebound) given a private confidence c; the
opponents follow the stochastic clue model with buzz/right draws fixed once
per clue. End-of-clue equities E_xyz for the 20 reachable score-delta
combinations are supplied by a Monte-Carlo estimator or an exact solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlated import pair_joint

# score-delta keys: tuples (x, y, z) with entries +1 / 0 / -1; at most one +1
EOC_STATES: list[tuple[int, int, int]] = [
    (x, y, z)
    for x in (1, 0, -1)
    for y in (1, 0, -1)
    for z in (1, 0, -1)
    if (x > 0) + (y > 0) + (z > 0) <= 1
]
assert len(EOC_STATES) == 20

NEVER_BUZZ = float("inf")
# treat value gaps below this (relative) tolerance as ties: buzz/no-buzz
# branches that differ only through measure-zero bet-model windows or
# coupled-trial residue must not register as strict improvements
TIE_EPS = 1e-4


@dataclass(frozen=True)
class BuzzParams:
    """Joint opponent behavior on one clue plus buzz-race win rates.

    b_joint[i, j]: P(opp1 buzz = i, opp2 buzz = j); p_joint likewise for
    right/wrong. z1/z2: probability the strategic player wins a contested
    buzz against one / two attempting opponents.
    """

    b_joint: np.ndarray
    p_joint: np.ndarray
    z1: float
    z2: float

    @staticmethod
    def from_marginals(
        b1: float, b2: float, rho_b: float, p1: float, p2: float, rho_p: float,
        z1: float, z2: float,
    ) -> "BuzzParams":
        return BuzzParams(
            b_joint=pair_joint(b1, b2, rho_b),
            p_joint=pair_joint(p1, p2, rho_p),
            z1=z1,
            z2=z2,
        )

    @property
    def b00(self):
        return float(self.b_joint[0, 0])

    @property
    def b10(self):
        return float(self.b_joint[1, 0])

    @property
    def b01(self):
        return float(self.b_joint[0, 1])

    @property
    def b11(self):
        return float(self.b_joint[1, 1])

    @property
    def p00(self):
        return float(self.p_joint[0, 0])

    @property
    def p10(self):
        return float(self.p_joint[1, 0])

    @property
    def p01(self):
        return float(self.p_joint[0, 1])

    @property
    def p11(self):
        return float(self.p_joint[1, 1])

    @property
    def p_h1(self):
        return self.p10 + self.p11

    @property
    def p_h2(self):
        return self.p01 + self.p11

    @property
    def b_h1(self):
        return self.b10 + self.b11

    @property
    def b_h2(self):
        return self.b01 + self.b11


@dataclass
class ThresholdSet:
    """Grid-resolution buzz thresholds for the four live states.

    theta_i is the smallest grid confidence at which buzzing is at least as
    good as not buzzing; infinity means buzzing never strictly helps.
    """

    theta0: float
    theta1: float
    theta2: float
    theta3: float
    grid_step: float = 0.01
    ci: dict = field(default_factory=dict)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta0, self.theta1, self.theta2, self.theta3)

    def decision(self, state: int, c: float) -> bool:
        return c >= self.as_tuple()[state]


@dataclass
class LiveStateValues:
    """V_B / V_NB over the confidence grid for LS0..LS3 plus IS values."""

    grid: np.ndarray
    v_buzz: dict[int, np.ndarray]
    v_nobuzz: dict[int, np.ndarray]
    v_is0: float
    v_is1: float
    v_is2: float


def ineligible_values(E, params: BuzzParams) -> tuple[float, float, float]:
    """Values of the three states where the strategic player answered wrong.

    Rebound probabilities are conditioned on the already-observed buzz and
    wrong answer, never re-drawn. With no eligible rebounders the IS1/IS2
    denominators vanish and those states are unreachable (returned as nan).
    """
    b00, b01, b10, b11 = params.b00, params.b01, params.b10, params.b11
    p00, p01, p10, p11 = params.p00, params.p01, params.p10, params.p11
    p1, p2 = params.p_h1, params.p_h2

    vis0 = (
        b00 * E[-1, 0, 0]
        + b10 * (p1 * E[-1, 1, 0] + (1 - p1) * E[-1, -1, 0])
        + b01 * (p2 * E[-1, 0, 1] + (1 - p2) * E[-1, 0, -1])
        + b11 * 0.5 * (p1 * E[-1, 1, 0] + p01 * E[-1, -1, 1] + p00 * E[-1, -1, -1])
        + b11 * 0.5 * (p2 * E[-1, 0, 1] + p10 * E[-1, 1, -1] + p00 * E[-1, -1, -1])
    )
    if params.b_h1 <= 0:
        vis1 = float("nan")
    else:
        vis1 = (params.b10 / params.b_h1) * E[-1, -1, 0] + (
            params.b11 / params.b_h1
        ) * ((p01 * E[-1, -1, 1] + p00 * E[-1, -1, -1]) / (1 - p1))
    if params.b_h2 <= 0:
        vis2 = float("nan")
    else:
        vis2 = (params.b01 / params.b_h2) * E[-1, 0, -1] + (
            params.b11 / params.b_h2
        ) * ((p10 * E[-1, 1, -1] + p00 * E[-1, -1, -1]) / (1 - p2))
    return vis0, vis1, vis2


def _extract_threshold(grid, vb, vnb, scale) -> float:
    eps = TIE_EPS * max(scale, 1e-6)
    strictly_better = vb > vnb + eps
    if not strictly_better.any():
        return NEVER_BUZZ
    at_least = vb >= vnb - eps
    idx = int(np.argmax(at_least))
    return float(grid[idx])


def printed_live_values_and_thresholds(
    E,
    params: BuzzParams,
    grid_step: float = 0.01,
    posterior=None,
    params_for_c=None,
    is_params_for_c=None,
) -> tuple[LiveStateValues, ThresholdSet]:
    """Backward evaluation in the published closed-form layout.

    Kept for the coefficient audit and closed-form cross-checks. The
    published layout marginalizes rebound attempt posteriors differently
    from the race semantics of the clue model (see `live_values_and_
    thresholds` for the consistent evaluation); the two agree closely but
    not exactly.
    """
    grid = np.round(np.arange(0.0, 1.0 + 1e-12, grid_step), 10)
    n = len(grid)
    vb = {i: np.zeros(n) for i in range(4)}
    vnb = {i: np.zeros(n) for i in range(4)}

    base_is = ineligible_values(E, is_params_for_c(0.5) if is_params_for_c else params)

    for k, c in enumerate(grid):
        prm = params_for_c(c) if params_for_c else params
        isv = (
            ineligible_values(E, is_params_for_c(c))
            if is_params_for_c
            else base_is
        )
        vis0, vis1, vis2 = isv
        b00, b01, b10, b11 = prm.b00, prm.b01, prm.b10, prm.b11
        p00, p01, p10, p11 = prm.p00, prm.p01, prm.p10, prm.p11
        p1, p2 = prm.p_h1, prm.p_h2
        bh1, bh2 = prm.b_h1, prm.b_h2
        z1, z2 = prm.z1, prm.z2

        c3 = posterior(c, 3) if posterior else c
        c1 = posterior(c, 1) if posterior else c
        c2 = posterior(c, 2) if posterior else c

        # LS3: both opponents have answered wrong
        vb[3][k] = c3 * E[1, -1, -1] + (1 - c3) * E[-1, -1, -1]
        vnb[3][k] = E[0, -1, -1]
        v3 = max(vb[3][k], vnb[3][k])

        # LS1: opponent 1 wrong; opponent 2 may rebound
        if bh1 <= 0:
            vb[1][k] = vnb[1][k] = E[0, -1, 0]
            v1 = vb[1][k]
        else:
            rebound1 = (p01 * E[0, -1, 1] + p00 * v3) / (1 - p1)
            vnb[1][k] = (b10 / bh1) * E[0, -1, 0] + (b11 / bh1) * rebound1
            vb[1][k] = ((b11 * z1 + b10) / bh1) * (
                c1 * E[1, -1, 0] + (1 - c1) * (vis1 if not math.isnan(vis1) else 0.0)
            ) + (b11 * (1 - z1) / bh1) * rebound1
            v1 = max(vb[1][k], vnb[1][k])

        # LS2: opponent 2 wrong; opponent 1 may rebound
        if bh2 <= 0:
            vb[2][k] = vnb[2][k] = E[0, 0, -1]
            v2 = vb[2][k]
        else:
            rebound2 = (p10 * E[0, 1, -1] + p00 * v3) / (1 - p2)
            vnb[2][k] = (b01 / bh2) * E[0, 0, -1] + (b11 / bh2) * rebound2
            vb[2][k] = ((b11 * z1 + b01) / bh2) * (
                c2 * E[1, 0, -1] + (1 - c2) * (vis2 if not math.isnan(vis2) else 0.0)
            ) + (b11 * (1 - z1) / bh2) * rebound2
            v2 = max(vb[2][k], vnb[2][k])

        # LS0: initial buzz
        vnb[0][k] = (
            b00 * E[0, 0, 0]
            + (b10 + b11 / 2) * (p1 * E[0, 1, 0] + (1 - p1) * v1)
            + (b01 + b11 / 2) * (p2 * E[0, 0, 1] + (1 - p2) * v2)
        )
        vb[0][k] = (
            b00 * (c * E[1, 0, 0] + (1 - c) * E[-1, 0, 0])
            + ((b01 + b10) * z1 + b11 * z2) * (c * E[1, 0, 0] + (1 - c) * vis0)
            + (b10 * (1 - z1) + b11 * (1 - z2) / 2) * (p1 * E[0, 1, 0] + (1 - p1) * v1)
            + (b01 * (1 - z1) + b11 * (1 - z2) / 2) * (p2 * E[0, 0, 1] + (1 - p2) * v2)
        )

    scale = max(float(np.abs(vb[0]).max()), float(np.abs(vnb[0]).max()), 1.0)
    thresholds = ThresholdSet(
        theta0=_extract_threshold(grid, vb[0], vnb[0], scale),
        theta1=_extract_threshold(grid, vb[1], vnb[1], scale),
        theta2=_extract_threshold(grid, vb[2], vnb[2], scale),
        theta3=_extract_threshold(grid, vb[3], vnb[3], scale),
        grid_step=grid_step,
    )
    values = LiveStateValues(
        grid=grid,
        v_buzz=vb,
        v_nobuzz=vnb,
        v_is0=base_is[0],
        v_is1=base_is[1],
        v_is2=base_is[2],
    )
    return values, thresholds


# --------------------------------------------------------------------------
# Closed-form approximations (score-delta objective E_xyz = 2x - y - z)
# --------------------------------------------------------------------------

def max_delta_E() -> dict[tuple[int, int, int], float]:
    return {s: float(2 * s[0] - s[1] - s[2]) for s in EOC_STATES}


def max_delta_thresholds(b: float, p: float, z1: float, z2: float) -> ThresholdSet:
    """Closed-form thresholds for the uncorrelated score-delta objective.

    theta3 = 1/2 exactly; the rebound and initial formulas are implemented
    as published (the published initial-state value constant differs from
    the event tree's by one term's factor of two; the discrepancy is under
    one 0.01 grid step for contestant-range parameters).
    """
    vis0 = (
        -2 * (1 - b) ** 2
        - 6 * b * p * (1 - b / 2)
        - 2 * (1 - p) * b * (1 - b)
        - 4 * p * (1 - p) * b ** 2
    )
    theta1 = (2 + b * b * (1 - z1) * (1 - 2 * p) + b * (2 * p - 3) * (1 - z1)) / (
        (b * (z1 - 1) + 1) * (b * (2 * p - 1) + 4)
    )
    m = -2 * p + 2 * (1 - p) * (1 + b - 2 * b * p)
    w = b * (1 - b) * z1 + 0.5 * b * b * z2
    theta0 = (w * m + 2 * (1 - b) ** 2 - 2 * w * vis0) / (
        4 * (1 - b) ** 2 + 4 * w - 2 * w * vis0
    )
    return ThresholdSet(theta0=theta0, theta1=theta1, theta2=theta1, theta3=0.5)


def simplified_threshold(gain: float, nobuzz_drift: float) -> float:
    """theta0 = G / (2G - N): indifference of c*G + (1-c)(N-G) against N."""
    return gain / (2 * gain - nobuzz_drift)


def uncorrelated_params(b: float, p: float, z1: float, z2: float) -> BuzzParams:
    return BuzzParams.from_marginals(b, b, 0.0, p, p, 0.0, z1, z2)


# --------------------------------------------------------------------------
# Exact clue tree (race semantics identical to the simulator's resolver)
# --------------------------------------------------------------------------

def _race_win(w_mine: float, w_others: list[float]) -> float:
    total = w_mine + sum(w_others)
    return w_mine / total if total > 0 else 1.0


class _ClueTree:
    """Single-clue evaluator consistent with the stochastic clue model.

    Opponent attempts and correctness are drawn once per clue; every
    answering round races the still-active attempters by buzz weight; wrong
    answerers drop out. The strategic player joins a race per its per-state
    decision and answers correctly with its (possibly state-posterior)
    confidence. Values are exact conditional expectations, so offset states
    whose end-of-clue equities are pairwise equal produce exactly equal
    buzz/no-buzz values.
    """

    def __init__(self, E, params: BuzzParams, w_strat: float = None,
                 posterior=None, params_for_c=None, is_params_for_c=None):
        self.E = E
        self.base = params
        self.posterior = posterior
        self.params_for_c = params_for_c
        self.is_params_for_c = is_params_for_c
        # back out the strategic racing weight from z1 (opponent weight 1)
        z1 = params.z1
        self.w = w_strat if w_strat is not None else (
            z1 / (1.0 - z1) if z1 < 1 else float("inf")
        )

    def _prm(self, c):
        return self.params_for_c(c) if self.params_for_c else self.base

    def _isprm(self, c):
        return self.is_params_for_c(c) if self.is_params_for_c else self._prm(c)

    def _conf(self, c, state):
        return self.posterior(c, state) if self.posterior else c

    # conditional right-rates of the not-yet-wrong opponent
    @staticmethod
    def _p_other_given_wrong(prm, wrong_idx):
        if wrong_idx == 0:
            den = prm.p00 + prm.p01
            return prm.p01 / den if den > 0 else 0.0
        den = prm.p00 + prm.p10
        return prm.p10 / den if den > 0 else 0.0

    def _e(self, x, y, z):
        return self.E[x, y, z]

    def ls3_values(self, c):
        """Both opponents wrong; strategic may answer alone."""
        c3 = self._conf(c, 3)
        vnb = self._e(0, -1, -1)
        vb = c3 * self._e(1, -1, -1) + (1 - c3) * self._e(-1, -1, -1)
        return vb, vnb

    def rebound_values(self, c, wrong_idx, q_other):
        """Values at a single-rebound node given P(other opponent attempted).

        `wrong_idx` 0/1 selects which opponent answered wrong; conditional
        correctness comes from the joint right table.
        """
        prm = self._prm(c)
        p_oth = self._p_other_given_wrong(prm, wrong_idx)
        if wrong_idx == 0:
            e_dead = self._e(0, -1, 0)
            e_oth_right = self._e(0, -1, 1)
        else:
            e_dead = self._e(0, 0, -1)
            e_oth_right = self._e(0, 1, -1)
        # other-opponent-wrong leads to the double-rebound node
        vb3, vnb3 = self.ls3_values(c)
        v3 = max(vb3, vnb3)
        cont_other = p_oth * e_oth_right + (1 - p_oth) * v3
        vnb = (1 - q_other) * e_dead + q_other * cont_other
        # strategic buzzes: races the other opponent if it attempted
        c_ans = self._conf(c, 1 if wrong_idx == 0 else 2)
        win = (1 - q_other) + q_other * _race_win(self.w, [1.0])
        lose = q_other * (1 - _race_win(self.w, [1.0]))
        if wrong_idx == 0:
            e_right = self._e(1, -1, 0)
        else:
            e_right = self._e(1, 0, -1)
        # after a wrong strategic answer the other opponent (if any) rebounds
        q_post = 0.0
        if q_other > 0:
            zw = _race_win(self.w, [1.0])
            q_post = q_other * zw / (q_other * zw + (1 - q_other))
        is_val = self._is_after_rebound(c, wrong_idx, q_post)
        vb = win * (c_ans * e_right + (1 - c_ans) * is_val) + lose * cont_other
        return vb, vnb

    def _is_after_rebound(self, c, wrong_idx, q_other):
        """Continuation after the strategic player goes wrong on a rebound."""
        prm = self._isprm(c)
        p_oth = self._p_other_given_wrong(prm, wrong_idx)
        if wrong_idx == 0:
            e_dead = self._e(-1, -1, 0)
            e_right = self._e(-1, -1, 1)
        else:
            e_dead = self._e(-1, 0, -1)
            e_right = self._e(-1, 1, -1)
        e_both = self._e(-1, -1, -1)
        return (1 - q_other) * e_dead + q_other * (
            p_oth * e_right + (1 - p_oth) * e_both
        )

    def root_values(self, c, d1, d2, d3):
        """(V_B, V_NB) at the initial state, with rebound play following the
        supplied public-information decision functions d_i(c) -> bool."""
        prm = self._prm(c)
        b = {
            (0, 0): prm.b00, (1, 0): prm.b10, (0, 1): prm.b01, (1, 1): prm.b11,
        }
        out = []
        for strategic_buzzes in (True, False):
            total = 0.0
            for (a1, a2), w_a in b.items():
                if w_a <= 0:
                    continue
                total += w_a * self._root_combo(
                    c, prm, a1, a2, strategic_buzzes, d1, d2, d3
                )
            out.append(total)
        return out[0], out[1]

    def _root_combo(self, c, prm, a1, a2, sbuzz, d1, d2, d3):
        racers = []
        if sbuzz:
            racers.append(("s", self.w))
        if a1:
            racers.append(("h1", 1.0))
        if a2:
            racers.append(("h2", 1.0))
        if not racers:
            return self._e(0, 0, 0)
        total_w = sum(w for _, w in racers)
        val = 0.0
        for who, w_i in racers:
            p_first = w_i / total_w
            val += p_first * self._after_first(c, prm, who, a1, a2, sbuzz, d1, d2, d3)
        return val

    def _after_first(self, c, prm, who, a1, a2, sbuzz, d1, d2, d3):
        if who == "s":
            is0 = self._is0_continuation(c, a1, a2)
            return c * self._e(1, 0, 0) + (1 - c) * is0
        if who == "h1":
            p1 = prm.p_h1
            right = self._e(0, 1, 0)
            # h1 wrong: rebound node with the true attempt indicator of h2
            vb, vnb = self.rebound_values(c, 0, float(a2))
            cont = vb if d1(c) else vnb
            return p1 * right + (1 - p1) * cont
        p2 = prm.p_h2
        right = self._e(0, 0, 1)
        vb, vnb = self.rebound_values(c, 1, float(a1))
        cont = vb if d2(c) else vnb
        return p2 * right + (1 - p2) * cont

    def _is0_continuation(self, c, a1, a2):
        """Opponents play out the clue after a wrong initial strategic answer."""
        prm = self._isprm(c)
        if not a1 and not a2:
            return self._e(-1, 0, 0)
        if a1 and not a2:
            p1 = prm.p_h1
            return p1 * self._e(-1, 1, 0) + (1 - p1) * self._e(-1, -1, 0)
        if a2 and not a1:
            p2 = prm.p_h2
            return p2 * self._e(-1, 0, 1) + (1 - p2) * self._e(-1, 0, -1)
        # both active: they race each other
        p1, p2 = prm.p_h1, prm.p_h2
        p01 = prm.p01
        p10 = prm.p10
        p00 = prm.p00
        first_h1 = 0.5 * (
            p1 * self._e(-1, 1, 0)
            + p01 * self._e(-1, -1, 1)
            + p00 * self._e(-1, -1, -1)
        )
        first_h2 = 0.5 * (
            p2 * self._e(-1, 0, 1)
            + p10 * self._e(-1, 1, -1)
            + p00 * self._e(-1, -1, -1)
        )
        return first_h1 + first_h2


def live_values_and_thresholds(
    E,
    params: BuzzParams,
    grid_step: float = 0.01,
    posterior=None,
    params_for_c=None,
    is_params_for_c=None,
    w_strat: float | None = None,
) -> tuple[LiveStateValues, ThresholdSet]:
    """Exact per-state buzz/no-buzz values over the confidence grid.

    E maps (x, y, z) score-delta keys to end-of-clue equities. Rebound
    thresholds are computed at the silent-arrival information state (the
    strategic player watched the opponent answer wrong); root values follow
    those public decision functions. `posterior` optionally maps
    (c, live_state) to the effective answering confidence; `params_for_c` /
    `is_params_for_c` supply conditional opponent tables per grid
    confidence (the correlated-human extension). Thresholds are the
    smallest grid confidence where buzzing is at least as good as not
    buzzing; a state where buzzing never strictly helps reports infinity.
    """
    grid = np.round(np.arange(0.0, 1.0 + 1e-12, grid_step), 10)
    n = len(grid)
    tree = _ClueTree(E, params, w_strat=w_strat, posterior=posterior,
                     params_for_c=params_for_c, is_params_for_c=is_params_for_c)
    vb = {i: np.zeros(n) for i in range(4)}
    vnb = {i: np.zeros(n) for i in range(4)}

    # canonical (silent-arrival) rebound posteriors for reported thresholds
    for k, c in enumerate(grid):
        prm = tree._prm(c)
        q1 = 0.0
        if prm.b_h1 > 0:
            q1 = (prm.b11 / 2) / (prm.b10 + prm.b11 / 2) if (prm.b10 + prm.b11 / 2) > 0 else 0.0
        q2 = 0.0
        if prm.b_h2 > 0:
            q2 = (prm.b11 / 2) / (prm.b01 + prm.b11 / 2) if (prm.b01 + prm.b11 / 2) > 0 else 0.0
        vb[1][k], vnb[1][k] = tree.rebound_values(c, 0, q1)
        vb[2][k], vnb[2][k] = tree.rebound_values(c, 1, q2)
        vb[3][k], vnb[3][k] = tree.ls3_values(c)

    scale = max(
        max(float(np.abs(vb[i]).max()) for i in (1, 2, 3)),
        max(float(np.abs(vnb[i]).max()) for i in (1, 2, 3)),
        1.0,
    )
    eps = TIE_EPS * scale
    d1 = lambda c: _decide(grid, vb[1], vnb[1], c, eps)
    d2 = lambda c: _decide(grid, vb[2], vnb[2], c, eps)
    d3 = lambda c: _decide(grid, vb[3], vnb[3], c, eps)

    for k, c in enumerate(grid):
        vb[0][k], vnb[0][k] = tree.root_values(c, d1, d2, d3)

    isv = ineligible_values(E, tree._isprm(0.5))
    thresholds = ThresholdSet(
        theta0=_extract_threshold(grid, vb[0], vnb[0], scale),
        theta1=_extract_threshold(grid, vb[1], vnb[1], scale),
        theta2=_extract_threshold(grid, vb[2], vnb[2], scale),
        theta3=_extract_threshold(grid, vb[3], vnb[3], scale),
        grid_step=grid_step,
    )
    values = LiveStateValues(
        grid=grid, v_buzz=vb, v_nobuzz=vnb,
        v_is0=isv[0], v_is1=isv[1], v_is2=isv[2],
    )
    return values, thresholds


def _decide(grid, vb_arr, vnb_arr, c, eps) -> bool:
    k = int(round(c / (grid[1] - grid[0])))
    k = min(max(k, 0), len(grid) - 1)
    return bool(vb_arr[k] > vnb_arr[k] + eps)
