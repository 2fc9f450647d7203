"""Evaluator training: Monte-Carlo return regression over self-play games.

Each simulated game contributes its visited clue-boundary states labeled
with the final win/loss outcome; the network regresses those targets under
a decaying learning rate. The bot wagers DDs through the evaluator being
trained, so wagering quality and value estimates co-evolve.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .contestants import PRESETS
from .dd import RiskParams
from .engine import BotProfile, BotStrategy, MatchConfig, play_game
from .gse import GameStateEvaluator


def train_gse(
    games: int = 200_000,
    seed: int = 0,
    hidden: int = 32,
    lr_start: float = 0.08,
    lr_end: float = 0.005,
    opponents: str = "mixed",
    bot: BotProfile | None = None,
    states_per_game: int = 10,
    batch: int = 512,
    log_every: int = 20_000,
    progress=None,
) -> GameStateEvaluator:
    """Train a fresh evaluator by simulated self-play.

    Aborts with a diagnostic if the loss turns non-finite. Deterministic for
    a fixed seed.
    """
    ev = GameStateEvaluator.fresh(hidden=hidden, seed=seed)
    bot = bot or BotProfile()
    strategy = BotStrategy(
        dd_wagering="gse", endgame_mc=False, evaluator=ev,
        risk=RiskParams.neutral(),
    )
    configs = []
    if opponents in ("average", "mixed"):
        configs.append(MatchConfig(bot=bot, humans=(PRESETS["average"],) * 2,
                                   strategy=strategy))
    if opponents in ("champion", "mixed"):
        configs.append(MatchConfig(bot=bot, humans=(PRESETS["champion"],) * 2,
                                   strategy=strategy))
    rng = np.random.default_rng(seed)
    buf_x: list[np.ndarray] = []
    buf_y: list[float] = []
    losses = []
    t0 = time.time()
    for g in range(games):
        cfg = configs[g % len(configs)]
        visited: list[np.ndarray] = []
        rec = play_game(cfg, rng.integers(2**63), collector=visited.append)
        won = 1.0 if cfg.bot_seat in rec.winners else 0.0
        if len(visited) > states_per_game:
            idx = rng.choice(len(visited), size=states_per_game, replace=False)
            visited = [visited[i] for i in idx]
        buf_x.extend(visited)
        buf_y.extend([won] * len(visited))
        if len(buf_x) >= batch:
            lr = lr_start * (lr_end / lr_start) ** (g / max(games - 1, 1))
            loss = ev.sgd_step(np.array(buf_x), np.array(buf_y), lr)
            losses.append(loss)
            buf_x.clear()
            buf_y.clear()
        if progress and (g + 1) % log_every == 0:
            progress(
                f"{g + 1}/{games} games, "
                f"loss {np.mean(losses[-50:]):.4f}, "
                f"{(time.time() - t0) / (g + 1) * 1000:.1f} ms/game"
            )
    ev.meta.update(
        {
            "games": games,
            "seed": seed,
            "opponents": opponents,
            "final_loss": float(np.mean(losses[-50:])) if losses else None,
            "lr_schedule": [lr_start, lr_end],
        }
    )
    return ev


def main():
    import argparse

    ap = argparse.ArgumentParser(description="Train the game-state evaluator")
    ap.add_argument("--games", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hidden", type=int, default=32)
    ap.add_argument("--opponents", default="mixed")
    ap.add_argument("--out", default="src/quizstrat/data/gse_weights.json")
    args = ap.parse_args()
    ev = train_gse(
        games=args.games, seed=args.seed, hidden=args.hidden,
        opponents=args.opponents, progress=print,
    )
    ev.save(args.out)
    print(f"saved to {args.out}")


if __name__ == "__main__":
    main()
