"""Session tracking and the HTTP advisor service.

`SessionEngine` replays an event log into a game state plus DD belief and
produces recommendations through the same library calls the CLI uses; the
FastAPI app exposes it with explicit seeds and trial budgets so every piece
of advice is reproducible.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field

import numpy as np

from .buzz import NEVER_BUZZ
from .config import EngineConfig, load_config
from .dd import InCategoryConfidenceTable, RiskParams, endgame_mc_bet, select_dd_bet
from .engine import BotProfile
from .fj import FJSituation, best_response_fj_bet, classify_region, rule_based_fj_bet
from .game import Board, GameState, N_COLS, N_ROWS, cell_value, is_lockout
from .gse import GameStateEvaluator
from .placement import PlacementPrior
from .policy import ClueContext, clue_thresholds
from .rollout import RolloutConfig, RolloutState, SeatModel
from .seek import (
    DDBeliefState,
    dd_probability_grid,
    observe_dd_found,
    observe_no_dd,
    retain_control_prob,
    select_square,
)

EVENT_LOG_VERSION = 1


class SessionError(ValueError):
    pass


@dataclass
class SessionState:
    """One tracked game: event log replays to the current state exactly."""

    session_id: str
    config: EngineConfig
    opponents: str = "average"
    round_no: int = 1
    initial_round: int = 1
    scores: list = field(default_factory=lambda: [0, 0, 0])
    control: int = 0
    bot_seat: int = 0
    revealed: set = field(default_factory=set)
    clue_in_play: tuple | None = None
    belief: DDBeliefState | None = None
    events: list = field(default_factory=list)
    cat_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.belief is None:
            self.belief = DDBeliefState.fresh(self.config.prior, self.round_no)
        if not self.cat_counts:
            self.cat_counts = {c: [0, 0] for c in range(N_COLS)}


class SessionEngine:
    """In-memory session store; one engine per service process."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or load_config()
        self.sessions: dict[str, SessionState] = {}

    # -- lifecycle ----------------------------------------------------------

    def create(self, opponents: str = "average", round_no: int = 1,
               bot_seat: int = 0, control: int = 0,
               scores: list | None = None) -> SessionState:
        sid = uuid.uuid4().hex[:12]
        st = SessionState(
            session_id=sid, config=self.config, opponents=opponents,
            round_no=round_no, bot_seat=bot_seat, control=control,
        )
        st.initial_round = round_no
        st.belief = DDBeliefState.fresh(self.config.prior, round_no)
        if scores:
            st.scores = list(scores)
            st.events.append({"type": "scores", "scores": list(scores)})
        self.sessions[sid] = st
        return st

    def get(self, sid: str) -> SessionState:
        if sid not in self.sessions:
            raise SessionError(f"unknown session {sid}")
        return self.sessions[sid]

    # -- events -------------------------------------------------------------

    def apply_event(self, st: SessionState, event: dict) -> SessionState:
        self._apply(st, event)
        st.events.append(event)
        return st

    def _apply(self, st: SessionState, event: dict):
        etype = event.get("type")
        if etype == "scores":
            st.scores = list(map(int, event["scores"]))
        elif etype == "select":
            cell = tuple(event["cell"])
            if cell in st.revealed:
                raise SessionError(f"cell {cell} already revealed")
            if not Board.is_valid_cell(cell):
                raise SessionError(f"invalid cell {cell}")
            st.clue_in_play = cell
        elif etype == "regular":
            cell = st.clue_in_play
            if cell is None:
                raise SessionError("no clue in play")
            deltas = event.get("deltas", [0, 0, 0])
            st.scores = [s + int(d) for s, d in zip(st.scores, deltas)]
            gainers = [i for i, d in enumerate(deltas) if d > 0]
            if gainers:
                st.control = gainers[0]
            st.revealed.add(cell)
            st.belief = observe_no_dd(st.belief, cell)
            if "bot_right" in event:
                st.cat_counts[cell[0]][0 if event["bot_right"] else 1] += 1
            st.clue_in_play = None
        elif etype == "dd":
            cell = st.clue_in_play
            if cell is None:
                raise SessionError("no clue in play")
            bet = int(event["bet"])
            right = bool(event["right"])
            st.scores[st.control] += bet if right else -bet
            st.revealed.add(cell)
            st.belief = observe_dd_found(st.belief, cell)
            if st.control == st.bot_seat:
                st.cat_counts[cell[0]][0 if right else 1] += 1
            st.clue_in_play = None
        elif etype == "round":
            st.round_no = int(event["round"])
            st.revealed = set()
            st.clue_in_play = None
            st.belief = DDBeliefState.fresh(self.config.prior, st.round_no)
            st.cat_counts = {c: [0, 0] for c in range(N_COLS)}
            st.control = int(np.argmin(st.scores))
        elif etype == "control":
            st.control = int(event["player"])
        else:
            raise SessionError(f"unknown event type {etype}")

    def undo(self, st: SessionState) -> SessionState:
        """Rebuild the session from its truncated event log."""
        if not st.events:
            raise SessionError("nothing to undo")
        events = st.events[:-1]
        fresh = SessionState(
            session_id=st.session_id, config=self.config,
            opponents=st.opponents, round_no=st.initial_round,
            bot_seat=st.bot_seat,
        )
        fresh.initial_round = st.initial_round
        for e in events:
            self._apply(fresh, e)
            fresh.events.append(e)
        self.sessions[st.session_id] = fresh
        return fresh

    def export_log(self, st: SessionState) -> dict:
        return {
            "version": EVENT_LOG_VERSION,
            "opponents": st.opponents,
            "bot_seat": st.bot_seat,
            "initial_round": st.initial_round,
            "events": list(st.events),
        }

    def import_log(self, doc: dict) -> SessionState:
        if doc.get("version") != EVENT_LOG_VERSION:
            raise SessionError("unsupported event-log version")
        st = self.create(opponents=doc.get("opponents", "average"),
                         bot_seat=doc.get("bot_seat", 0),
                         round_no=doc.get("initial_round", 1))
        for e in doc["events"]:
            self.apply_event(st, e)
        return st

    # -- views and recommendations ------------------------------------------

    def unrevealed(self, st: SessionState) -> list:
        return [
            (c, r)
            for c in range(N_COLS)
            for r in range(1, N_ROWS + 1)
            if (c, r) not in st.revealed
        ]

    def view(self, st: SessionState) -> dict:
        grid = dd_probability_grid(st.belief)
        return {
            "session_id": st.session_id,
            "round": st.round_no,
            "scores": list(st.scores),
            "control": st.control,
            "bot_seat": st.bot_seat,
            "revealed": sorted(st.revealed),
            "clue_in_play": st.clue_in_play,
            "heatmap": {f"{c},{r}": grid.get((c, r), 0.0)
                        for c in range(N_COLS) for r in range(1, N_ROWS + 1)},
            "expected_remaining_dds": float(sum(grid.values())),
            "event_count": len(st.events),
        }

    def recommend_square(self, st: SessionState) -> dict:
        cells = self.unrevealed(st)
        if not cells:
            raise SessionError("board is empty")
        bot = self.config.bot_profile(st.opponents)
        prof = self.config.contestants[st.opponents]

        def retain(cell):
            col, row = cell
            r, w = st.cat_counts[col]
            shift = 0.04 * (r - w) / max(1, r + w)
            return retain_control_prob(
                min(max(bot.attempt_rate + shift, 0), 1),
                min(max(bot.precision + shift, 0), 1),
                bot.buzz_weight,
                (prof.clue_params(st.round_no, row)[0],) * 2,
                (prof.clue_params(st.round_no, row)[1],) * 2,
                prof.buzz_correlation, prof.precision_correlation,
            )

        cell = select_square(cells, st.belief, "bayesian", retain_fn=retain,
                             round_no=st.round_no)
        grid = dd_probability_grid(st.belief)
        return {
            "cell": list(cell),
            "p_dd": grid.get(cell, 0.0),
            "p_retain": retain(cell),
            "policy": "bayesian",
        }

    def _seats(self, st: SessionState) -> list[SeatModel]:
        prof = self.config.contestants[st.opponents]
        bot = self.config.bot_profile(st.opponents)
        cm = bot.confidence_model()
        seats = []
        for seat in range(3):
            if seat == st.bot_seat:
                seats.append(SeatModel(
                    is_bot=True,
                    b_by_row={1: [bot.attempt_rate] * 5, 2: [bot.attempt_rate] * 5},
                    p_by_row={1: [bot.precision] * 5, 2: [bot.precision] * 5},
                    dd_accuracy=bot.dd_accuracy_base,
                    fj_accuracy=bot.fj_accuracy,
                    buzz_weight=bot.buzz_weight,
                    conf_alpha=cm.beta_alpha, conf_beta=cm.beta_beta,
                ))
            else:
                seats.append(SeatModel.human(prof))
        return seats

    def dd_bet_curve(self, st: SessionState, confidence: float,
                     n_trials: int = 50_000, seed: int | None = None,
                     risk_neutral: bool = False) -> dict:
        cell = st.clue_in_play
        if cell is None:
            raise SessionError("no clue in play")
        seed = seed if seed is not None else 0
        remaining = [c for c in self.unrevealed(st) if c != cell]
        grid = dd_probability_grid(st.belief)
        hidden = float(sum(v for c, v in grid.items() if c != cell))
        risk = RiskParams.neutral() if risk_neutral else RiskParams()
        ev = endgame_mc_bet(
            tuple(st.scores), st.bot_seat, confidence, self._seats(st),
            st.round_no, remaining, n_trials=n_trials, seed=seed, risk=risk,
            dd_hidden_count=int(round(hidden)),
            cfg=RolloutConfig(
                strategic_seat=st.bot_seat,
                row_prior=self.config.prior.row_marginal(st.round_no),
            ),
        )
        doc = ev.to_dict()
        doc["seed"] = seed
        doc["n_trials"] = n_trials
        return doc

    def fj_advice(self, st: SessionState, confidence: float,
                  n_samples: int = 10_000, seed: int | None = None) -> dict:
        seed = seed if seed is not None else 0
        order = sorted(range(3), key=lambda i: -st.scores[i])
        role = "ABC"[order.index(st.bot_seat)]
        a, b, c = (st.scores[order[0]], st.scores[order[1]], st.scores[order[2]])
        prof = self.config.contestants[st.opponents]
        bot = self.config.bot_profile(st.opponents)
        sit = FJSituation(scores=(a, b, c), my_role=role, my_confidence=confidence,
                          opp_accuracy=prof.fj_accuracy,
                          opp_correlation=prof.fj_correlation)
        region = classify_region(a, b, c)
        curve = best_response_fj_bet(sit, n_samples=n_samples,
                                     rng=np.random.default_rng(seed))
        doc = curve.to_dict()
        doc.update({
            "seed": seed,
            "n_samples": n_samples,
            "role": role,
            "rule_based_constrained": rule_based_fj_bet(sit, "constrained"),
            "rule_based_full": rule_based_fj_bet(sit, "full"),
            "region": region.flags(),
        })
        return doc

    def buzz_advice(self, st: SessionState, n_trials: int = 30_000,
                    seed: int | None = None) -> dict:
        cell = st.clue_in_play
        if cell is None:
            raise SessionError("no clue in play")
        seed = seed if seed is not None else 0
        remaining = [c for c in self.unrevealed(st) if c != cell]
        grid = dd_probability_grid(st.belief)
        hidden_left = float(sum(v for c2, v in grid.items() if c2 != cell))
        if hidden_left > 1e-6:
            raise SessionError(
                "buzz threshold analysis requires no remaining DDs"
            )
        state = RolloutState(
            scores=tuple(st.scores), control=st.control, round_no=st.round_no,
            remaining=remaining,
        )
        ctx = ClueContext(rollout_state=state, seats=self._seats(st),
                          clue_row=cell[1], clue_round=st.round_no,
                          strategic_seat=st.bot_seat)
        vals, th = clue_thresholds(ctx, n=n_trials, seed=seed)
        return {
            "seed": seed,
            "n_trials": n_trials,
            "grid": vals.grid.tolist(),
            "v_buzz": {k: v.tolist() for k, v in vals.v_buzz.items()},
            "v_nobuzz": {k: v.tolist() for k, v in vals.v_nobuzz.items()},
            "thresholds": [
                None if t == NEVER_BUZZ else t for t in th.as_tuple()
            ],
        }


def create_app(config: EngineConfig | None = None):
    """FastAPI application exposing the calculators and session tracking."""
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware

    engine = SessionEngine(config)
    app = FastAPI(title="quizstrat advisor", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )

    def _wrap(fn, *a, **k):
        try:
            return fn(*a, **k)
        except (SessionError, ValueError) as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.post("/session")
    def create_session(body: dict):
        st = _wrap(
            engine.create,
            opponents=body.get("opponents", "average"),
            round_no=body.get("round", 1),
            bot_seat=body.get("bot_seat", 0),
            control=body.get("control", 0),
            scores=body.get("scores"),
        )
        return engine.view(st)

    @app.get("/session/{sid}")
    def get_session(sid: str):
        return engine.view(_wrap(engine.get, sid))

    @app.post("/session/{sid}/event")
    def post_event(sid: str, body: dict):
        st = _wrap(engine.get, sid)
        _wrap(engine.apply_event, st, body)
        return engine.view(st)

    @app.post("/session/{sid}/undo")
    def post_undo(sid: str):
        st = _wrap(engine.get, sid)
        return engine.view(_wrap(engine.undo, st))

    @app.get("/session/{sid}/export")
    def export_log(sid: str):
        return engine.export_log(_wrap(engine.get, sid))

    @app.post("/session/import")
    def import_log(body: dict):
        return engine.view(_wrap(engine.import_log, body))

    @app.get("/session/{sid}/heatmap")
    def heatmap(sid: str):
        view = engine.view(_wrap(engine.get, sid))
        return {"heatmap": view["heatmap"],
                "expected_remaining_dds": view["expected_remaining_dds"]}

    @app.get("/session/{sid}/recommend-square")
    def recommend_square(sid: str):
        return _wrap(engine.recommend_square, engine.get(sid))

    @app.post("/session/{sid}/dd-bet")
    def dd_bet(sid: str, body: dict):
        st = _wrap(engine.get, sid)
        return _wrap(
            engine.dd_bet_curve, st,
            confidence=float(body["confidence"]),
            n_trials=int(body.get("n_trials", 50_000)),
            seed=body.get("seed"),
            risk_neutral=bool(body.get("risk_neutral", False)),
        )

    @app.post("/session/{sid}/fj-bet")
    def fj_bet(sid: str, body: dict):
        st = _wrap(engine.get, sid)
        return _wrap(
            engine.fj_advice, st,
            confidence=float(body.get("confidence", 0.5)),
            n_samples=int(body.get("n_samples", 10_000)),
            seed=body.get("seed"),
        )

    @app.post("/session/{sid}/buzz")
    def buzz(sid: str, body: dict):
        st = _wrap(engine.get, sid)
        return _wrap(
            engine.buzz_advice, st,
            n_trials=int(body.get("n_trials", 30_000)),
            seed=body.get("seed"),
        )

    @app.post("/calc/region")
    def region(body: dict):
        r = _wrap(classify_region, int(body["a"]), int(body["b"]), int(body["c"]))
        return r.flags()

    return app
