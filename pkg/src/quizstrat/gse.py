"""Game-state win-probability evaluator: a small sigmoidal network trained
by Monte-Carlo return regression over simulated games.

Features: the three scores, remaining DD count, remaining clue count,
remaining dollar value, round, and a board-control indicator, min-max
scaled by round-dependent dollar bounds. Training targets each visited
state's final 0/1 game outcome.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

N_FEATURES = 8
SCORE_SCALE = 36000.0
VALUE_SCALE = 36000.0
CLUE_SCALE = 30.0


def state_features(
    scores, remaining_dds: int, remaining_clues: int, remaining_value: int,
    round_no: int, bot_control: bool, bot_seat: int = 0,
) -> np.ndarray:
    opp = [i for i in range(3) if i != bot_seat]
    # opponents are exchangeable: sorting makes the evaluation exactly
    # invariant to their labels
    hi = max(scores[opp[0]], scores[opp[1]])
    lo = min(scores[opp[0]], scores[opp[1]])
    return np.array(
        [
            scores[bot_seat] / SCORE_SCALE,
            hi / SCORE_SCALE,
            lo / SCORE_SCALE,
            remaining_dds / 3.0,
            remaining_clues / CLUE_SCALE,
            remaining_value / VALUE_SCALE,
            1.0 if round_no == 2 else 0.0,
            1.0 if bot_control else 0.0,
        ],
        dtype=np.float64,
    )


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class GameStateEvaluator:
    """One-hidden-layer tanh network with a sigmoidal win-probability head."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    meta: dict = field(default_factory=dict)

    @staticmethod
    def fresh(hidden: int = 32, seed: int = 0) -> "GameStateEvaluator":
        rng = np.random.default_rng(seed)
        return GameStateEvaluator(
            w1=rng.normal(0, 0.5, size=(hidden, N_FEATURES)),
            b1=np.zeros(hidden),
            w2=rng.normal(0, 0.2, size=hidden),
            b2=0.0,
            meta={"hidden": hidden, "seed": seed, "games": 0},
        )

    def value(self, features: np.ndarray) -> float:
        h = np.tanh(self.w1 @ features + self.b1)
        return float(_sigmoid(self.w2 @ h + self.b2))

    def value_batch(self, features: np.ndarray) -> np.ndarray:
        h = np.tanh(features @ self.w1.T + self.b1)
        return _sigmoid(h @ self.w2 + self.b2)

    def sgd_step(self, features: np.ndarray, targets: np.ndarray, lr: float):
        """One minibatch log-loss gradient step; returns the batch loss."""
        h = np.tanh(features @ self.w1.T + self.b1)
        p = _sigmoid(h @ self.w2 + self.b2)
        err = p - targets  # d(logloss)/d(logit)
        n = len(targets)
        g_w2 = err @ h / n
        g_b2 = err.mean()
        dh = np.outer(err, self.w2) * (1 - h * h)
        g_w1 = dh.T @ features / n
        g_b1 = dh.mean(axis=0)
        self.w2 -= lr * g_w2
        self.b2 -= lr * g_b2
        self.w1 -= lr * g_w1
        self.b1 -= lr * g_b1
        eps = 1e-12
        loss = -np.mean(
            targets * np.log(p + eps) + (1 - targets) * np.log(1 - p + eps)
        )
        if not np.isfinite(loss):
            raise FloatingPointError("training diverged: non-finite loss")
        return float(loss)

    def save(self, path: str):
        doc = {
            "version": 1,
            "feature_schema": "scores3/dds/clues/value/round/control",
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2,
            "meta": self.meta,
        }
        with open(path, "w") as f:
            json.dump(doc, f)

    @staticmethod
    def load(path: str) -> "GameStateEvaluator":
        with open(path) as f:
            doc = json.load(f)
        if doc.get("feature_schema") != "scores3/dds/clues/value/round/control":
            raise ValueError("weight file has an incompatible feature schema")
        return GameStateEvaluator(
            w1=np.array(doc["w1"]),
            b1=np.array(doc["b1"]),
            w2=np.array(doc["w2"]),
            b2=float(doc["b2"]),
            meta=doc.get("meta", {}),
        )
