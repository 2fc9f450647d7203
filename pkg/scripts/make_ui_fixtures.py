"""Record service responses for the UI contract tests.

Runs the advisor scenarios through the HTTP layer (in-process test client)
and freezes the literal response JSON the UI must display.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from quizstrat.config import load_config
from quizstrat.service import create_app

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app(load_config()))

    # DD bet-curve scenario: big early lead, first DD found, confidence 0.75
    r = client.post("/session", json={
        "opponents": "average", "round": 2, "scores": [11000, 4200, 4200],
    })
    sid = r.json()["session_id"]
    for c in range(6):
        for row in (1, 2, 3, 4):
            if c == 0:
                client.post(f"/session/{sid}/event",
                            json={"type": "select", "cell": [c, row]})
                client.post(f"/session/{sid}/event",
                            json={"type": "regular", "deltas": [0, 0, 0]})
    client.post(f"/session/{sid}/event", json={"type": "select", "cell": [0, 5]})
    view = client.get(f"/session/{sid}").json()
    (OUT / "dd_session.json").write_text(json.dumps(view, sort_keys=True))
    r = client.post(f"/session/{sid}/dd-bet",
                    json={"confidence": 0.75, "n_trials": 20000, "seed": 11})
    (OUT / "dd_curve.json").write_bytes(r.content)

    # lock-tie final-round scenario
    r = client.post("/session", json={
        "opponents": "average", "round": 2, "scores": [10000, 5000, 2000],
    })
    sid2 = r.json()["session_id"]
    r = client.post(f"/session/{sid2}/fj-bet",
                    json={"confidence": 0.5, "n_samples": 4000, "seed": 7})
    (OUT / "fj_locktie.json").write_bytes(r.content)

    # last-clue buzz scenario from the threshold-vs-score family: both DDs
    # already found, every other cell played, one clue remaining
    r = client.post("/session", json={
        "opponents": "average", "round": 2, "scores": [0, 0, 0],
    })
    sid3 = r.json()["session_id"]
    dd_cells = {(1, 4): True, (4, 5): False}
    for c in range(6):
        for row in range(1, 6):
            if c == 0 and row == 5:
                continue
            client.post(f"/session/{sid3}/event",
                        json={"type": "select", "cell": [c, row]})
            if (c, row) in dd_cells:
                client.post(f"/session/{sid3}/event",
                            json={"type": "dd", "bet": 1000,
                                  "right": dd_cells[(c, row)]})
            else:
                client.post(f"/session/{sid3}/event",
                            json={"type": "regular", "deltas": [0, 0, 0]})
    client.post(f"/session/{sid3}/event",
                json={"type": "scores", "scores": [25000, 13000, 6600]})
    client.post(f"/session/{sid3}/event", json={"type": "select", "cell": [0, 5]})
    r = client.post(f"/session/{sid3}/buzz",
                    json={"n_trials": 30000, "seed": 5})
    (OUT / "buzz_freeshot.json").write_bytes(r.content)

    # an event log for replay-equality checks
    log = client.get(f"/session/{sid3}/export")
    (OUT / "event_log.json").write_bytes(log.content)
    view3 = client.get(f"/session/{sid3}").json()
    (OUT / "buzz_session.json").write_text(json.dumps(view3, sort_keys=True))
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
