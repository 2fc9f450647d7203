"""Versioned configuration loading: contestant presets, refined tables,
placement prior weights and the bot profile. Unknown fields are rejected so
stale or misspelled configs fail fast.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .contestants import ContestantProfile, SelectionModel, WagerModel
from .engine import BotProfile
from .placement import PlacementPrior

SUPPORTED_VERSION = 1

_CONTESTANT_FIELDS = {
    "attempt_rate", "buzz_correlation", "precision", "precision_correlation",
    "dd_accuracy", "fj_accuracy", "fj_correlation", "wager_model",
    "selection_model",
}
_TOP_FIELDS = {"version", "contestants", "refined_tables", "placement_prior", "bot"}
_BOT_FIELDS = {
    "attempt_rate", "precision", "dd_accuracy_base", "fj_accuracy",
    "buzzability", "learning_curve", "buzz_threshold",
}


class ConfigError(ValueError):
    pass


def _check_fields(doc: dict, allowed: set, where: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown fields in {where}: {sorted(unknown)}")


def default_config_path() -> Path:
    return Path(str(resources.files("quizstrat").joinpath("data/presets.json")))


class EngineConfig:
    """Parsed configuration bundle."""

    def __init__(self, doc: dict):
        _check_fields(doc, _TOP_FIELDS, "config root")
        if doc.get("version") != SUPPORTED_VERSION:
            raise ConfigError(
                f"unsupported config version {doc.get('version')}, "
                f"expected {SUPPORTED_VERSION}"
            )
        self.contestants: dict[str, ContestantProfile] = {}
        refined = doc.get("refined_tables", {})
        for name, fields in doc["contestants"].items():
            _check_fields(fields, _CONTESTANT_FIELDS, f"contestants.{name}")
            table = None
            if name in refined:
                table = {int(k): v for k, v in refined[name].items()}
            self.contestants[name] = ContestantProfile(
                name=name,
                attempt_rate=fields["attempt_rate"],
                buzz_correlation=fields["buzz_correlation"],
                precision=fields["precision"],
                precision_correlation=fields["precision_correlation"],
                dd_accuracy=fields["dd_accuracy"],
                fj_accuracy=fields["fj_accuracy"],
                fj_correlation=fields.get("fj_correlation", 0.3),
                wager_model=WagerModel(fields["wager_model"]),
                selection_model=SelectionModel(fields["selection_model"]),
                refined_table=table,
            )
        pp = doc["placement_prior"]
        _check_fields(pp, {"row_weights", "col_weights", "cells"}, "placement_prior")
        if "cells" in pp:
            grid = {tuple(map(int, k.split(","))): v for k, v in pp["cells"].items()}
        else:
            rows = pp["row_weights"]
            cols = pp["col_weights"]
            grid = {
                (c, r): cols[c] * rows[r - 1]
                for c in range(6)
                for r in range(1, 6)
            }
        self.prior = PlacementPrior.from_cell_grids(grid, grid)
        b = doc["bot"]
        _check_fields(b, _BOT_FIELDS, "bot")
        self.bot_buzzability = dict(b.get("buzzability", {}))
        self.bot_base = dict(b)

    def bot_profile(self, opponents: str = "champion") -> BotProfile:
        b = self.bot_base
        return BotProfile(
            attempt_rate=b["attempt_rate"],
            precision=b["precision"],
            dd_accuracy_base=b["dd_accuracy_base"],
            fj_accuracy=b["fj_accuracy"],
            buzzability_vs_two=self.bot_buzzability.get(opponents, 0.73),
            learning_curve=tuple(b.get("learning_curve", (0, 0.01, 0.02, 0.03, 0.04))),
            buzz_threshold=b.get("buzz_threshold", 0.5),
        )


def load_config(path: str | Path | None = None) -> EngineConfig:
    p = Path(path) if path else default_config_path()
    with open(p) as f:
        doc = json.load(f)
    return EngineConfig(doc)
