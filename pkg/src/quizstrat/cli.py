"""Operator CLI: simulation, benchmarking, calculators, audits, training,
and the advisor service. Report commands write delimited output and render
the matching figures next to it.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import report
from .buzz import NEVER_BUZZ
from .config import load_config
from .contestants import PRESETS
from .dd import RiskParams, endgame_mc_bet, select_dd_bet
from .engine import BotProfile, BotStrategy, MatchConfig, run_trials
from .fj import FJSituation, best_response_fj_bet, classify_region, rule_based_fj_bet
from .gse import GameStateEvaluator
from .policy import ClueContext, clue_thresholds
from .rollout import RolloutConfig, RolloutState, SeatModel
from .service import SessionEngine


def _out_dir(out) -> Path:
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _emit(doc: dict, header, rows, fmt: str, out, figure_cb=None, name="report"):
    if out:
        d = _out_dir(out)
        report.write_json(d / f"{name}.json", doc)
        report.write_csv(d / f"{name}.csv", header, rows)
        if figure_cb:
            figure_cb(d / f"{name}.png")
    if fmt == "json":
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    elif fmt == "csv":
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(str(v) for v in row))
    else:
        click.echo(report.text_table(header, rows))


@click.group()
def main():
    """Strategy engine and simulator for three-player buzzer quiz games."""


@main.command()
@click.option("--preset", default="champion",
              type=click.Choice(["average", "champion", "grand_champion"]),
              help="opponent model")
@click.option("--n", default=10_000, type=int, help="number of games")
@click.option("--seed", default=0, type=int)
@click.option("--config", "config_path", default=None, help="config JSON path")
@click.option("--out", default=None, help="output directory for reports")
@click.option("--format", "fmt", default="table",
              type=click.Choice(["json", "csv", "table"]))
@click.option("--dd-wagering", default="gse",
              type=click.Choice(["gse", "heuristic", "average"]))
@click.option("--endgame-mc/--no-endgame-mc", default=False,
              help="live endgame wagering inside simulations (slow)")
@click.option("--weights", default=None, help="evaluator weight file")
def simulate(preset, n, seed, config_path, out, fmt, dd_wagering, endgame_mc,
             weights):
    """Run full-game trials and report the validation statistics."""
    if n < 1:
        raise click.UsageError("--n must be at least 1")
    cfg = load_config(config_path)
    evaluator = _load_evaluator(weights) if dd_wagering == "gse" else None
    mc = MatchConfig(
        bot=cfg.bot_profile(preset),
        humans=(cfg.contestants[preset], cfg.contestants[preset]),
        strategy=BotStrategy(dd_wagering=dd_wagering, endgame_mc=endgame_mc,
                             evaluator=evaluator),
        prior=cfg.prior,
    )
    stats = run_trials(mc, n, seed=seed)
    s = stats.summary()
    doc = dict(s)
    doc.update({"preset": preset, "seed": seed})
    header = ["statistic", "value", "std_error"]
    rows = [
        ["win_rate", s["win_rate"], s["win_rate_se"]],
        ["lockout_rate", s["lockout_rate"], s["lockout_rate_se"]],
        ["fj_lead_rate", s["fj_lead_rate"], s["fj_lead_rate_se"]],
        ["board_control", s["board_control"], ""],
        ["dds_found", s["dds_found"], ""],
        ["bot_final_mean", s["bot_final_mean"], s["bot_final_se"]],
        ["human_final_mean", s["human_final_mean"], s["human_final_se"]],
        ["human_lockout_rate", s["human_lockout_rate"], s["human_lockout_rate_se"]],
    ]
    _emit(doc, header, rows, fmt, out,
          figure_cb=lambda p: report.sim_stats_figure(s, p), name="simulate")


def _load_evaluator(path=None) -> GameStateEvaluator:
    if path is None:
        from importlib import resources

        path = str(resources.files("quizstrat").joinpath("data/gse_weights.json"))
    return GameStateEvaluator.load(path)


@main.command("benchmark-selection")
@click.option("--policies", default="lrtb,simple_seeking,bayesian",
              help="comma-separated selection policies")
@click.option("--preset", default="grand_champion")
@click.option("--n", default=20_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None)
@click.option("--format", "fmt", default="table",
              type=click.Choice(["json", "csv", "table"]))
@click.option("--config", "config_path", default=None)
def benchmark_selection(policies, preset, n, seed, out, fmt, config_path):
    """Compare square-selection policies on win rate and DDs found."""
    cfg = load_config(config_path)
    rows = []
    doc = {"preset": preset, "n": n, "policies": {}}
    for policy in policies.split(","):
        policy = policy.strip()
        mc = MatchConfig(
            bot=cfg.bot_profile(preset),
            humans=(cfg.contestants[preset], cfg.contestants[preset]),
            strategy=BotStrategy(selection_policy=policy, dd_wagering="heuristic",
                                 endgame_mc=False),
            prior=cfg.prior,
        )
        s = run_trials(mc, n, seed=seed).summary()
        rows.append([policy, s["win_rate"], s["win_rate_se"], s["dds_found"],
                     s["board_control"]])
        doc["policies"][policy] = s
    header = ["policy", "win_rate", "win_se", "dds_found", "board_control"]

    def fig(path):
        import matplotlib.pyplot as plt

        fig_, ax = plt.subplots(figsize=(6.5, 3.8))
        names = [r[0] for r in rows]
        ax.bar(np.arange(len(rows)) - 0.2, [r[1] for r in rows], 0.4,
               label="win rate", color="#4477aa")
        ax.bar(np.arange(len(rows)) + 0.2, [r[3] for r in rows], 0.4,
               label="DDs found", color="#cc6677")
        ax.set_xticks(range(len(rows)), names)
        ax.legend()
        fig_.tight_layout()
        fig_.savefig(path, dpi=120)
        plt.close(fig_)

    _emit(doc, header, rows, fmt, out, figure_cb=fig, name="benchmark_selection")


@main.command("dd-bet")
@click.option("--scores", required=True, help="three scores, e.g. 19800,13000,14300")
@click.option("--seat", default=0, type=int, help="wagering seat")
@click.option("--confidence", required=True, type=float)
@click.option("--round", "round_no", default=2, type=int)
@click.option("--remaining", default="", help="cells col:row;col:row after this clue")
@click.option("--preset", default="champion")
@click.option("--n", default=100_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--risk-neutral", is_flag=True)
@click.option("--step", default=100, type=int, help="bet grid granularity")
@click.option("--out", default=None)
@click.option("--format", "fmt", default="table",
              type=click.Choice(["json", "csv", "table"]))
@click.option("--config", "config_path", default=None)
def dd_bet(scores, seat, confidence, round_no, remaining, preset, n, seed,
           risk_neutral, step, out, fmt, config_path):
    """Endgame Monte-Carlo wager analysis for a DD in play."""
    cfg = load_config(config_path)
    sc = tuple(int(x) for x in scores.split(","))
    cells = _parse_cells(remaining)
    seats = _seats_for(cfg, preset, seat)
    risk = RiskParams.neutral() if risk_neutral else RiskParams()
    ev = endgame_mc_bet(sc, seat, confidence, seats, round_no, cells,
                        n_trials=n, seed=seed, risk=risk, step=step)
    doc = ev.to_dict()
    doc.update({"seed": seed, "n_trials": n})
    header = ["bet", "equity_right", "equity_wrong", "blended"]
    rows = [
        [int(b), float(r), float(w), float(bl)]
        for b, r, w, bl in zip(ev.bets, ev.equity_right, ev.equity_wrong, ev.blended)
    ]
    _emit(doc, header, rows, fmt, out,
          figure_cb=lambda p: report.bet_curve_figure(ev, p), name="dd_bet")


def _parse_cells(text: str):
    cells = []
    if text:
        for part in text.split(";"):
            c, r = part.split(":")
            cells.append((int(c), int(r)))
    return cells


def _seats_for(cfg, preset, bot_seat, bot=None):
    prof = cfg.contestants[preset]
    bot = bot or cfg.bot_profile(preset)
    cm = bot.confidence_model()
    seats = []
    for s in range(3):
        if s == bot_seat:
            seats.append(SeatModel(
                is_bot=True,
                b_by_row={1: [bot.attempt_rate] * 5, 2: [bot.attempt_rate] * 5},
                p_by_row={1: [bot.precision] * 5, 2: [bot.precision] * 5},
                dd_accuracy=bot.dd_accuracy_base, fj_accuracy=bot.fj_accuracy,
                buzz_weight=bot.buzz_weight,
                conf_alpha=cm.beta_alpha, conf_beta=cm.beta_beta,
            ))
        else:
            seats.append(SeatModel.human(prof))
    return seats


@main.command("fj-bet")
@click.option("--scores", required=True, help="role-sorted A,B,C scores")
@click.option("--role", required=True, type=click.Choice(["A", "B", "C"]))
@click.option("--confidence", default=0.5, type=float)
@click.option("--preset", default="average")
@click.option("--n", default=10_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None)
@click.option("--format", "fmt", default="table",
              type=click.Choice(["json", "csv", "table"]))
@click.option("--config", "config_path", default=None)
def fj_bet(scores, role, confidence, preset, n, seed, out, fmt, config_path):
    """Best-response final-round wager against the modeled bet distributions."""
    cfg = load_config(config_path)
    a, b, c = (int(x) for x in scores.split(","))
    prof = cfg.contestants[preset]
    sit = FJSituation(scores=(a, b, c), my_role=role, my_confidence=confidence,
                      opp_accuracy=prof.fj_accuracy,
                      opp_correlation=prof.fj_correlation)
    curve = best_response_fj_bet(sit, n_samples=n, rng=np.random.default_rng(seed))
    region = classify_region(a, b, c)
    doc = curve.to_dict()
    doc.update({
        "seed": seed,
        "rule_based_constrained": rule_based_fj_bet(sit, "constrained"),
        "rule_based_full": rule_based_fj_bet(sit, "full"),
        "region": region.flags(),
    })
    header = ["bet", "equity"]
    rows = [[int(b_), float(e)] for b_, e in zip(curve.bets, curve.equity)]

    def fig(p):
        report.fj_curve_figure(curve, p)
        report.region_map_figure(a, b, c, p.with_name("fj_region.png"))

    _emit(doc, header, rows, fmt, out, figure_cb=fig, name="fj_bet")


@main.command()
@click.option("--scores", required=True)
@click.option("--seat", default=0, type=int)
@click.option("--row", required=True, type=int, help="row of the clue in play")
@click.option("--round", "round_no", default=2, type=int)
@click.option("--remaining", default="", help="cells col:row;... after this clue")
@click.option("--preset", default="champion")
@click.option("--n", default=100_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None)
@click.option("--format", "fmt", default="table",
              type=click.Choice(["json", "csv", "table"]))
@click.option("--config", "config_path", default=None)
def buzz(scores, seat, row, round_no, remaining, preset, n, seed, out, fmt,
         config_path):
    """Buzz thresholds for the clue in play (no remaining DDs)."""
    cfg = load_config(config_path)
    sc = tuple(int(x) for x in scores.split(","))
    cells = _parse_cells(remaining)
    state = RolloutState(scores=sc, control=seat, round_no=round_no,
                         remaining=cells)
    ctx = ClueContext(rollout_state=state, seats=_seats_for(cfg, preset, seat),
                      clue_row=row, clue_round=round_no, strategic_seat=seat)
    vals, th = clue_thresholds(ctx, n=n, seed=seed)
    doc = {
        "seed": seed, "n_trials": n,
        "thresholds": [None if t == NEVER_BUZZ else t for t in th.as_tuple()],
    }
    header = ["state", "threshold"]
    rows = [[i, "never" if t == NEVER_BUZZ else t]
            for i, t in enumerate(th.as_tuple())]
    _emit(doc, header, rows, fmt, out,
          figure_cb=lambda p: report.buzz_curve_figure(vals, th, p), name="buzz")


@main.command("fig8-sweep")
@click.option("--opponents", default="13000,6600")
@click.option("--value", default=2000, type=int)
@click.option("--lo", default=2000, type=int)
@click.option("--hi", default=30000, type=int)
@click.option("--step", default=400, type=int)
@click.option("--preset", default="average")
@click.option("--n", default=60_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", default="fig8")
@click.option("--config", "config_path", default=None)
def fig8_sweep(opponents, value, lo, hi, step, preset, n, seed, out, config_path):
    """Sweep the strategic score on a last-clue family and plot thresholds."""
    cfg = load_config(config_path)
    o1, o2 = (int(x) for x in opponents.split(","))
    row = value // 400
    sweep = list(range(lo, hi + 1, step))
    thetas = []
    for s in sweep:
        state = RolloutState(scores=(s, o1, o2), control=0, round_no=2,
                             remaining=[])
        ctx = ClueContext(rollout_state=state,
                          seats=_seats_for(cfg, preset, 0),
                          clue_row=row, clue_round=2)
        _, th = clue_thresholds(ctx, n=n, seed=seed)
        thetas.append(th.theta0)
        click.echo(f"score {s}: theta0 = "
                   f"{'never' if th.theta0 == NEVER_BUZZ else th.theta0}")
    d = _out_dir(out)
    report.write_csv(d / "fig8.csv", ["score", "theta0"],
                     [[s, t if np.isfinite(t) else ""] for s, t in zip(sweep, thetas)])
    report.threshold_sweep_figure(sweep, thetas, d / "fig8.png")
    click.echo(f"wrote {d}/fig8.csv and {d}/fig8.png")


@main.command("train-gse")
@click.option("--games", default=200_000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--hidden", default=32, type=int)
@click.option("--opponents", default="mixed")
@click.option("--out", default="gse_weights.json")
def train_gse_cmd(games, seed, hidden, opponents, out):
    """Train the game-state evaluator by self-play."""
    from .train import train_gse

    ev = train_gse(games=games, seed=seed, hidden=hidden, opponents=opponents,
                   progress=click.echo)
    ev.save(out)
    click.echo(f"saved evaluator to {out}")


@main.command("fit-bot")
@click.option("--preset", default="champion")
@click.option("--target-win", default=0.709, type=float)
@click.option("--n", default=8000, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--weights", default=None)
@click.option("--config", "config_path", default=None)
def fit_bot(preset, target_win, n, seed, weights, config_path):
    """Grid-search the bot profile's free parameters to a target win rate."""
    cfg = load_config(config_path)
    evaluator = _load_evaluator(weights)
    best = None
    for b in (0.68, 0.72, 0.76):
        for p in (0.84, 0.86, 0.88):
            for fj in (0.55, 0.615, 0.68):
                bot = BotProfile(attempt_rate=b, precision=p, fj_accuracy=fj,
                                 buzzability_vs_two=cfg.bot_buzzability.get(preset, 0.73))
                mc = MatchConfig(
                    bot=bot, humans=(cfg.contestants[preset],) * 2,
                    strategy=BotStrategy(evaluator=evaluator, endgame_mc=False),
                    prior=cfg.prior,
                )
                s = run_trials(mc, n, seed=seed).summary()
                gap = abs(s["win_rate"] - target_win)
                click.echo(f"b={b} p={p} fj={fj}: win {s['win_rate']:.3f} "
                           f"lock {s['lockout_rate']:.3f} bc {s['board_control']:.3f}")
                if best is None or gap < best[0]:
                    best = (gap, b, p, fj, s)
    _, b, p, fj, s = best
    click.echo(f"best: attempt={b} precision={p} fj={fj} -> {s['win_rate']:.3f}")


@main.command()
@click.argument("log_file", type=click.Path(exists=True))
@click.option("--confidence", default=0.5, type=float)
@click.option("--config", "config_path", default=None)
def replay(log_file, confidence, config_path):
    """Replay an exported event log and print the final recommendations."""
    engine = SessionEngine(load_config(config_path))
    with open(log_file) as f:
        doc = json.load(f)
    st = engine.import_log(doc)
    view = engine.view(st)
    click.echo(json.dumps(view, indent=2, sort_keys=True))
    if engine.unrevealed(st):
        rec = engine.recommend_square(st)
        click.echo("recommended square: " + json.dumps(rec, sort_keys=True))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8040, type=int)
@click.option("--config", "config_path", default=None)
def serve(host, port, config_path):
    """Run the advisor HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(load_config(config_path))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
