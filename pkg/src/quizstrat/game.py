"""Rules of play: board bookkeeping, wager legality, lockout tests, outcomes.

Everything here is pure value semantics: operations return new objects or read
immutably, so game states can be shared freely across simulation workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

N_COLS = 6
N_ROWS = 5

ROUND_ROW_VALUE = {1: 200, 2: 400}
ROUND_WAGER_FLOOR = 5
ROUND_WAGER_LIMIT = {1: 1000, 2: 2000}


class Phase(str, Enum):
    IN_ROUND = "in_round"
    FINAL = "final"
    FINISHED = "finished"


def cell_value(round_no: int, row: int) -> int:
    """Dollar value of the cell in 1-based row `row` for the given round."""
    return ROUND_ROW_VALUE[round_no] * row


def round_total_value(round_no: int) -> int:
    return N_COLS * sum(cell_value(round_no, r) for r in range(1, N_ROWS + 1))


@dataclass(frozen=True)
class Board:
    """One round's 6x5 grid.

    Cells are addressed as (col, row), 0-based col in 0..5 and 1-based row in
    1..5 (row value grows with row index). `revealed` flags are monotone; `dd_cells`
    stays fixed once the board is dealt.
    """

    round: int
    revealed: frozenset[tuple[int, int]] = frozenset()
    dd_cells: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.round not in (1, 2):
            raise ValueError(f"round must be 1 or 2, got {self.round}")
        expected = 1 if self.round == 1 else 2
        if len(self.dd_cells) != expected:
            raise ValueError(
                f"round {self.round} must have exactly {expected} DD cells"
            )
        cols = [c for c, _ in self.dd_cells]
        if len(set(cols)) != len(cols):
            raise ValueError("DD cells must be in distinct columns")
        for cell in self.dd_cells | self.revealed:
            if not self.is_valid_cell(cell):
                raise ValueError(f"invalid cell {cell}")

    @staticmethod
    def is_valid_cell(cell: tuple[int, int]) -> bool:
        c, r = cell
        return 0 <= c < N_COLS and 1 <= r <= N_ROWS

    @property
    def unrevealed(self) -> list[tuple[int, int]]:
        return [
            (c, r)
            for c in range(N_COLS)
            for r in range(1, N_ROWS + 1)
            if (c, r) not in self.revealed
        ]

    def value(self, cell: tuple[int, int]) -> int:
        return cell_value(self.round, cell[1])

    def remaining_value(self) -> int:
        return sum(self.value(cell) for cell in self.unrevealed)

    def dds_remaining(self) -> int:
        return sum(1 for cell in self.dd_cells if cell not in self.revealed)

    def reveal(self, cell: tuple[int, int]) -> "Board":
        if cell in self.revealed:
            raise ValueError(f"cell {cell} already revealed")
        if not self.is_valid_cell(cell):
            raise ValueError(f"invalid cell {cell}")
        return replace(self, revealed=self.revealed | {cell})


@dataclass(frozen=True)
class GameState:
    """Mid-game snapshot: board, three scores, control, phase, clue in play."""

    board: Board
    scores: tuple[int, int, int]
    control: int
    phase: Phase = Phase.IN_ROUND
    clue_in_play: tuple[int, int] | None = None

    @property
    def dds_remaining(self) -> int:
        return self.board.dds_remaining()

    def clue_value(self) -> int:
        if self.clue_in_play is None:
            raise ValueError("no clue in play")
        return self.board.value(self.clue_in_play)

    def clue_is_dd(self) -> bool:
        if self.clue_in_play is None:
            return False
        return self.clue_in_play in self.board.dd_cells

    def opponents(self, player: int) -> tuple[int, int]:
        return tuple(i for i in range(3) if i != player)  # type: ignore[return-value]

    def to_json(self, reveal_dds: bool = False) -> str:
        doc = {
            "round": self.board.round,
            "scores": list(self.scores),
            "control": self.control,
            "phase": self.phase.value,
            "revealed": sorted(self.board.revealed),
            "clue_in_play": self.clue_in_play,
        }
        if reveal_dds:
            doc["dd_cells"] = sorted(self.board.dd_cells)
        return json.dumps(doc)

    @staticmethod
    def from_json(doc: str | dict) -> "GameState":
        if isinstance(doc, str):
            doc = json.loads(doc)
        board = Board(
            round=doc["round"],
            revealed=frozenset(tuple(c) for c in doc.get("revealed", [])),
            dd_cells=frozenset(tuple(c) for c in doc["dd_cells"]),
        )
        clue = doc.get("clue_in_play")
        return GameState(
            board=board,
            scores=tuple(doc["scores"]),
            control=doc["control"],
            phase=Phase(doc.get("phase", "in_round")),
            clue_in_play=tuple(clue) if clue is not None else None,
        )


@dataclass(frozen=True)
class Placement:
    """Final ordering with tie groups; every player tied at the top wins."""

    ranks: tuple[tuple[int, ...], ...]
    winners: frozenset[int]


def final_placement(final_scores: tuple[int, int, int]) -> Placement:
    """Rank players by final score; ties share a rank group.

    Winners are the players tied for the highest nonnegative score. If every
    final score is negative, nobody wins.
    """
    order = sorted(range(3), key=lambda i: -final_scores[i])
    groups: list[tuple[int, ...]] = []
    for i in order:
        if groups and final_scores[groups[-1][0]] == final_scores[i]:
            groups[-1] = groups[-1] + (i,)
        else:
            groups.append((i,))
    top = max(final_scores)
    winners = frozenset(i for i in range(3) if final_scores[i] == top and top >= 0)
    return Placement(ranks=tuple(groups), winners=winners)


def legal_dd_wagers(state: GameState, player: int) -> tuple[int, int]:
    """Inclusive dollar range a player may wager on the Daily Double in play.

    The ceiling is the larger of the player's score and the round limit; the
    floor is $5 regardless of score sign.
    """
    if not state.clue_is_dd():
        raise ValueError("clue in play is not a Daily Double")
    if player != state.control:
        raise ValueError("only the player in control plays a Daily Double")
    limit = ROUND_WAGER_LIMIT[state.board.round]
    return (ROUND_WAGER_FLOOR, max(state.scores[player], limit))


def max_opponent_final(
    score: int, regular_value: int, dd_count: int, dd_cell_values: list[int], round_no: int
) -> int:
    """Upper bound on an opponent's pre-FJ score if every break goes their way.

    The opponent wins every remaining regular clue, and DDs land on their
    lowest-value candidate cells (keeping regular take maximal) and are played
    last at maximal wagers.
    """
    if dd_count == 0:
        return score + regular_value
    sacrificed = sum(sorted(dd_cell_values)[:dd_count])
    s = score + regular_value - sacrificed
    limit = ROUND_WAGER_LIMIT[round_no]
    for _ in range(dd_count):
        s = s + max(s, limit)
    return s


def is_lockout(state: GameState, leader: int | None = None) -> bool:
    """True iff the given (or current) leader cannot be caught.

    Assumes opponents win every remaining clue and wager maximally on any
    remaining DDs, then double through FJ; the test is strict, so an exact
    lock-tie is not a lockout.
    """
    scores = state.scores
    if leader is None:
        leader = max(range(3), key=lambda i: scores[i])
    lead = scores[leader]
    board = state.board
    if state.phase == Phase.FINAL or not board.unrevealed:
        others = [scores[i] for i in range(3) if i != leader]
        return lead > 2 * max(others)
    remaining = board.remaining_value()
    if state.clue_in_play is not None and state.clue_in_play not in board.revealed:
        # the clue being played is no longer winnable by a non-answering opponent,
        # but a caller checking mid-clue normally passes a post-outcome state
        pass
    dd_cells = [c for c in board.dd_cells if c not in board.revealed]
    dd_values = [board.value(c) for c in dd_cells]
    for opp in range(3):
        if opp == leader:
            continue
        cap = max_opponent_final(
            scores[opp], remaining, len(dd_cells), dd_values, board.round
        )
        if lead <= 2 * cap:
            return False
    return True


@dataclass(frozen=True)
class ClueResolution:
    """Score deltas from one resolved clue plus who gets control next."""

    deltas: tuple[int, int, int]
    next_control: int


def apply_outcome(state: GameState, resolution: ClueResolution) -> GameState:
    """Apply a resolved clue/DD to the state: scores, reveal flag, control."""
    if state.clue_in_play is None:
        raise ValueError("no clue in play to resolve")
    d = state.clue_value()
    is_dd = state.clue_is_dd()
    lo, hi = (None, None)
    if is_dd:
        lo, hi = legal_dd_wagers(state, state.control)
    for i, delta in enumerate(resolution.deltas):
        if delta == 0:
            continue
        if is_dd:
            if i != state.control:
                raise ValueError("only the controller's score changes on a DD")
            if not (lo <= abs(delta) <= hi):
                raise ValueError(f"DD delta {delta} outside legal range [{lo},{hi}]")
        elif abs(delta) != d:
            raise ValueError(f"delta {delta} inconsistent with clue value {d}")
    gainers = [i for i, x in enumerate(resolution.deltas) if x > 0]
    if len(gainers) > 1:
        raise ValueError("at most one player gains on a clue")
    if gainers and resolution.next_control != gainers[0]:
        raise ValueError("control must pass to the correct answerer")
    if not gainers and resolution.next_control != state.control:
        raise ValueError("control stays with the previous controller on a dead clue")
    scores = tuple(s + d_ for s, d_ in zip(state.scores, resolution.deltas))
    board = state.board.reveal(state.clue_in_play)
    phase = state.phase
    return GameState(
        board=board,
        scores=scores,  # type: ignore[arg-type]
        control=resolution.next_control,
        phase=phase,
        clue_in_play=None,
    )
