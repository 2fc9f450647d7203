"""Operator surfaces: CLI golden behavior, service contract, replay
determinism, and CLI/service equality through the shared engine."""

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from quizstrat.cli import main
from quizstrat.config import ConfigError, EngineConfig, load_config
from quizstrat.service import SessionEngine, create_app


@pytest.fixture(scope="module")
def engine():
    return SessionEngine(load_config())


@pytest.fixture(scope="module")
def client():
    from fastapi.testclient import TestClient

    return TestClient(create_app(load_config()))


class TestConfig:
    def test_unknown_fields_rejected(self):
        doc = json.loads(Path(load_config_path()).read_text())
        doc["contestants"]["average"]["surprise"] = 1
        with pytest.raises(ConfigError):
            EngineConfig(doc)

    def test_version_checked(self):
        doc = json.loads(Path(load_config_path()).read_text())
        doc["version"] = 99
        with pytest.raises(ConfigError):
            EngineConfig(doc)


def load_config_path():
    from quizstrat.config import default_config_path

    return default_config_path()


class TestCLI:
    def test_simulate_zero_usage_error(self):
        r = CliRunner().invoke(main, ["simulate", "--n", "0"])
        assert r.exit_code != 0

    def test_simulate_reports_and_figures(self, tmp_path):
        out = tmp_path / "rep"
        r = CliRunner().invoke(main, [
            "simulate", "--preset", "average", "--n", "40", "--seed", "3",
            "--dd-wagering", "heuristic", "--out", str(out), "--format", "json",
        ])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert 0 <= doc["win_rate"] <= 1
        assert (out / "simulate.json").exists()
        assert (out / "simulate.csv").exists()
        assert (out / "simulate.png").exists()

    def test_simulate_same_seed_identical_files(self, tmp_path):
        outs = []
        for d in ("a", "b"):
            out = tmp_path / d
            r = CliRunner().invoke(main, [
                "simulate", "--preset", "average", "--n", "30", "--seed", "11",
                "--dd-wagering", "heuristic", "--out", str(out),
            ])
            assert r.exit_code == 0, r.output
            outs.append((out / "simulate.json").read_text())
        assert outs[0] == outs[1]

    def test_fj_bet_lock_tie(self, tmp_path):
        r = CliRunner().invoke(main, [
            "fj-bet", "--scores", "10000,5000,2000", "--role", "A",
            "--n", "600", "--format", "json", "--out", str(tmp_path / "fj"),
        ])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["best_bet"] == 0
        assert doc["region"]["lock_tie"] is True
        assert (tmp_path / "fj" / "fj_bet.png").exists()
        assert (tmp_path / "fj" / "fj_region.png").exists()

    def test_dd_bet_command(self, tmp_path):
        r = CliRunner().invoke(main, [
            "dd-bet", "--scores", "9000,11000,4000", "--confidence", "0.7",
            "--remaining", "0:1;1:2", "--n", "3000", "--step", "1000",
            "--format", "json", "--out", str(tmp_path / "dd"),
        ])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["blended"] == [
            pytest.approx(0.7 * r_ + 0.3 * w_)
            for r_, w_ in zip(doc["equity_right"], doc["equity_wrong"])
        ]
        assert (tmp_path / "dd" / "dd_bet.png").exists()

    def test_buzz_command(self):
        r = CliRunner().invoke(main, [
            "buzz", "--scores", "28000,13500,12800", "--row", "2",
            "--n", "20000", "--format", "json",
        ])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["thresholds"][0] == 0.0


class TestService:
    def test_session_lifecycle_and_heatmap(self, client):
        r = client.post("/session", json={"opponents": "average", "round": 2})
        assert r.status_code == 200
        doc = r.json()
        sid = doc["session_id"]
        assert doc["expected_remaining_dds"] == pytest.approx(2.0)
        r = client.post(f"/session/{sid}/event",
                        json={"type": "select", "cell": [0, 3]})
        assert r.status_code == 200
        r = client.post(f"/session/{sid}/event",
                        json={"type": "regular", "deltas": [1200, 0, 0]})
        doc = r.json()
        assert doc["heatmap"]["0,3"] == 0.0
        assert doc["expected_remaining_dds"] == pytest.approx(2.0)

    def test_malformed_event_is_4xx(self, client):
        sid = client.post("/session", json={}).json()["session_id"]
        r = client.post(f"/session/{sid}/event",
                        json={"type": "regular", "deltas": [1, 0, 0]})
        assert r.status_code == 422
        r = client.post(f"/session/{sid}/event", json={"type": "nope"})
        assert r.status_code == 422

    def test_unknown_session_is_4xx(self, client):
        assert client.get("/session/deadbeef").status_code == 422

    def test_region_endpoint(self, client):
        r = client.post("/calc/region", json={"a": 10000, "b": 5000, "c": 2000})
        assert r.json()["lock_tie"] is True

    def test_fj_advice_lock_tie(self, client):
        sid = client.post("/session", json={"round": 2}).json()["session_id"]
        client.post(f"/session/{sid}/event",
                    json={"type": "scores", "scores": [10000, 5000, 2000]})
        r = client.post(f"/session/{sid}/fj-bet",
                        json={"confidence": 0.5, "n_samples": 500, "seed": 4})
        doc = r.json()
        assert doc["best_bet"] == 0
        assert doc["seed"] == 4
        assert doc["region"]["lock_tie"] is True

    def test_dd_curve_matches_library_bitwise(self, client, engine):
        """The service routes through the same engine call."""
        body = {"opponents": "average", "round": 2,
                "scores": [11000, 4200, 4200]}
        sid = client.post("/session", json=body).json()["session_id"]
        client.post(f"/session/{sid}/event",
                    json={"type": "select", "cell": [2, 4]})
        r = client.post(f"/session/{sid}/dd-bet",
                        json={"confidence": 0.75, "n_trials": 4000, "seed": 9})
        doc = r.json()
        st = engine.create(opponents="average", round_no=2,
                           scores=[11000, 4200, 4200])
        engine.apply_event(st, {"type": "select", "cell": [2, 4]})
        lib = engine.dd_bet_curve(st, confidence=0.75, n_trials=4000, seed=9)
        assert doc["blended"] == lib["blended"]
        assert doc["chosen_bet"] == lib["chosen_bet"]

    def test_undo_truncates_and_replays(self, client):
        sid = client.post("/session", json={"round": 2}).json()["session_id"]
        client.post(f"/session/{sid}/event",
                    json={"type": "select", "cell": [1, 3]})
        client.post(f"/session/{sid}/event",
                    json={"type": "regular", "deltas": [800, 0, 0]})
        before = client.get(f"/session/{sid}").json()
        assert before["scores"][0] == 800
        after = client.post(f"/session/{sid}/undo").json()
        assert after["scores"][0] == 0
        assert after["clue_in_play"] == [1, 3]

    def test_export_import_round_trip(self, client):
        sid = client.post("/session", json={"round": 2}).json()["session_id"]
        client.post(f"/session/{sid}/event",
                    json={"type": "scores", "scores": [3000, 1000, 200]})
        client.post(f"/session/{sid}/event",
                    json={"type": "select", "cell": [0, 1]})
        client.post(f"/session/{sid}/event",
                    json={"type": "regular", "deltas": [0, 400, 0]})
        log = client.get(f"/session/{sid}/export").json()
        view1 = client.get(f"/session/{sid}").json()
        r = client.post("/session/import", json=log)
        view2 = r.json()
        for key in ("scores", "revealed", "heatmap", "control", "round"):
            assert view1[key] == view2[key]


class TestReplayCLI:
    def test_replay_reproduces_view(self, tmp_path, engine):
        st = engine.create(opponents="average", round_no=2)
        engine.apply_event(st, {"type": "scores", "scores": [5000, 3000, 1000]})
        engine.apply_event(st, {"type": "select", "cell": [3, 4]})
        engine.apply_event(st, {"type": "regular", "deltas": [0, 0, 1600]})
        log = engine.export_log(st)
        p = tmp_path / "log.json"
        p.write_text(json.dumps(log))
        r = CliRunner().invoke(main, ["replay", str(p)])
        assert r.exit_code == 0, r.output
        assert '"scores"' in r.output
        doc = json.loads(r.output[: r.output.index("recommended square")])
        assert doc["scores"] == [5000, 3000, 2600]
