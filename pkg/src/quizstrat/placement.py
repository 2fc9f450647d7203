"""Prior model of hidden Daily-Double placement.

The same prior object drives board generation (sampling side) and the
Bayesian seeker (inference side), so inference against self-sampled games is
calibrated by construction. The shipped default grid encodes the qualitative
placement facts (rows 3-5 heavy, row 1 near zero, column 1 hottest, column 2
coldest) and is config-replaceable; correctness of the machinery is
prior-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import N_COLS, N_ROWS

Cell = tuple[int, int]

# relative weight of each row (1..5) and column (0..5) for a DD cell
DEFAULT_ROW_WEIGHTS = {1: 0.002, 2: 0.088, 3: 0.304, 4: 0.384, 5: 0.222}
DEFAULT_COL_WEIGHTS = [0.215, 0.123, 0.163, 0.169, 0.172, 0.158]


def default_cell_grid(n_cols: int = N_COLS, n_rows: int = N_ROWS) -> dict[Cell, float]:
    rows = DEFAULT_ROW_WEIGHTS
    cols = DEFAULT_COL_WEIGHTS
    grid = {}
    for c in range(n_cols):
        for r in range(1, n_rows + 1):
            grid[(c, r)] = cols[c % len(cols)] * rows[((r - 1) % N_ROWS) + 1]
    total = sum(grid.values())
    return {k: v / total for k, v in grid.items()}


@dataclass(frozen=True)
class PlacementPrior:
    """Single-cell grid for round 1 and a joint pair table for round 2.

    The round-2 joint is over unordered cell pairs in distinct columns; the
    default is independent-except-same-column-exclusion, matching the
    observed pair statistics.
    """

    round1: dict[Cell, float]
    round2_joint: dict[frozenset, float]
    n_cols: int = N_COLS
    n_rows: int = N_ROWS

    @staticmethod
    def default() -> "PlacementPrior":
        return PlacementPrior.from_cell_grids(default_cell_grid(), default_cell_grid())

    @staticmethod
    def from_cell_grids(
        grid1: dict[Cell, float],
        grid2: dict[Cell, float],
        n_cols: int = N_COLS,
        n_rows: int = N_ROWS,
    ) -> "PlacementPrior":
        """Build the round-2 pair joint from a single-cell grid.

        Joint weight of {i, j} is grid2[i]*grid2[j] for distinct-column pairs,
        renormalized: independent placement apart from the column exclusion.
        """
        t1 = sum(grid1.values())
        round1 = {k: v / t1 for k, v in grid1.items()}
        joint: dict[frozenset, float] = {}
        cells = list(grid2)
        for a in range(len(cells)):
            for b in range(a + 1, len(cells)):
                i, j = cells[a], cells[b]
                if i[0] == j[0]:
                    continue
                joint[frozenset((i, j))] = grid2[i] * grid2[j]
        t2 = sum(joint.values())
        joint = {k: v / t2 for k, v in joint.items()}
        return PlacementPrior(round1=round1, round2_joint=joint, n_cols=n_cols, n_rows=n_rows)

    def round2_marginal(self) -> dict[Cell, float]:
        """Per-cell expected-DD mass: sums to 2 over the board."""
        memo = getattr(self, "_marg_memo", None)
        if memo is not None:
            return memo
        marg: dict[Cell, float] = {}
        for pair, w in self.round2_joint.items():
            for cell in pair:
                marg[cell] = marg.get(cell, 0.0) + w
        object.__setattr__(self, "_marg_memo", marg)
        return marg

    def row_marginal(self, round_no: int) -> np.ndarray:
        """Row distribution (index 0 = row 1) of a single DD."""
        memo = getattr(self, "_row_memo", {})
        if round_no in memo:
            return memo[round_no]
        out = np.zeros(self.n_rows)
        source = self.round1 if round_no == 1 else self.round2_marginal()
        for (c, r), w in source.items():
            out[r - 1] += w
        out = out / out.sum()
        memo = dict(memo)
        memo[round_no] = out
        object.__setattr__(self, "_row_memo", memo)
        return out

    def sample_round1(self, rng: np.random.Generator) -> Cell:
        cells = list(self.round1)
        probs = np.array([self.round1[c] for c in cells])
        idx = rng.choice(len(cells), p=probs / probs.sum())
        return cells[idx]

    def sample_round2(self, rng: np.random.Generator) -> tuple[Cell, Cell]:
        """Sample the round-2 pair: first cell from the pair marginal, the
        partner from the conditional given the first column; never shares a
        column."""
        pairs = list(self.round2_joint)
        probs = np.array([self.round2_joint[p] for p in pairs])
        idx = rng.choice(len(pairs), p=probs / probs.sum())
        pair = tuple(sorted(pairs[idx]))
        return pair  # type: ignore[return-value]

    def sample(self, round_no: int, rng: np.random.Generator) -> tuple[Cell, ...]:
        if round_no == 1:
            return (self.sample_round1(rng),)
        return self.sample_round2(rng)
