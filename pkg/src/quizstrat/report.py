"""Report rendering: delimited tables plus matplotlib figures.

Every CLI report command writes its numbers as CSV/JSON and, when an output
directory is given, renders the matching figure alongside them.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def write_csv(path: Path, header: list[str], rows: list[list]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def text_table(header: list[str], rows: list[list]) -> str:
    widths = [len(h) for h in header]
    srows = [[_fmt(v) for v in row] for row in rows]
    for row in srows:
        widths = [max(w, len(s)) for w, s in zip(widths, row)]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    out.append("  ".join("-" * w for w in widths))
    for row in srows:
        out.append("  ".join(s.ljust(w) for s, w in zip(row, widths)))
    return "\n".join(out)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def sim_stats_figure(summary: dict, path: Path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    names = ["win", "lockout", "FJ lead", "board ctl", "DDs found"]
    keys = ["win_rate", "lockout_rate", "fj_lead_rate", "board_control", "dds_found"]
    vals = [summary[k] for k in keys]
    errs = [summary.get(k + "_se", 0.0) for k in keys]
    ax1.bar(names, vals, yerr=errs, color="#4477aa")
    ax1.set_ylim(0, 1)
    ax1.set_ylabel("rate")
    ax1.set_title(f"simulation rates (n={summary['n']})")
    ax1.tick_params(axis="x", rotation=30)
    ax2.bar(["bot", "humans"],
            [summary["bot_final_mean"], summary["human_final_mean"]],
            yerr=[summary["bot_final_se"], summary["human_final_se"]],
            color=["#4477aa", "#cc6677"])
    ax2.set_ylabel("mean final score ($)")
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def bet_curve_figure(ev, path: Path, title: str = "DD bet analysis"):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.5, 3.8))
    ax1.plot(ev.bets, ev.equity_right, color="#228833", label="if right")
    ax1.plot(ev.bets, ev.equity_wrong, color="#cc3311", label="if wrong")
    ax1.set_xlabel("bet ($)")
    ax1.set_ylabel("equity")
    ax1.legend()
    ax1.set_title("right/wrong continuation")
    ax2.plot(ev.bets, ev.blended, color="#4477aa",
             label=f"blend @ {ev.p_dd:.0%}")
    ax2.axvline(ev.chosen_bet, color="#ee7733", ls="--",
                label=f"chosen {ev.chosen_bet}")
    ax2.axvline(ev.risk_neutral_bet, color="#999933", ls=":",
                label=f"risk-neutral {ev.risk_neutral_bet}")
    ax2.set_xlabel("bet ($)")
    ax2.legend()
    ax2.set_title(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fj_curve_figure(curve, path: Path, title: str = "final-round bet equity"):
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    ax.plot(curve.bets, curve.equity, color="#4477aa")
    ax.axvline(curve.best_bet, color="#ee7733", ls="--",
               label=f"best {curve.best_bet}")
    lo, hi = curve.indifference_band
    ax.axvspan(lo, hi, color="#ee7733", alpha=0.15, label="indifference band")
    ax.set_xlabel("bet ($)")
    ax.set_ylabel("equity")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def buzz_curve_figure(values, thresholds, path: Path, state: int = 0):
    fig, ax = plt.subplots(figsize=(6.5, 3.8))
    ax.plot(values.grid, values.v_buzz[state], color="#228833", label="buzz")
    ax.plot(values.grid, values.v_nobuzz[state], color="#cc3311", label="pass")
    th = thresholds.as_tuple()[state]
    if np.isfinite(th):
        ax.axvline(th, color="#4477aa", ls="--", label=f"threshold {th:.2f}")
    ax.set_xlabel("confidence")
    ax.set_ylabel("equity")
    ax.set_title(f"live state {state}")
    ax.legend()
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def threshold_sweep_figure(scores, thetas, path: Path,
                           title: str = "initial buzz threshold vs score"):
    fig, ax = plt.subplots(figsize=(7.5, 3.8))
    plot_t = [t if np.isfinite(t) else 1.05 for t in thetas]
    ax.step(scores, plot_t, where="mid", color="#4477aa")
    ax.axhline(1.0, color="#aaaaaa", lw=0.8)
    ax.set_ylim(-0.05, 1.1)
    ax.set_xlabel("strategic player's score ($)")
    ax.set_ylabel("initial threshold (1.05 = never)")
    ax.set_title(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def heatmap_figure(grid: dict, path: Path, title: str = "DD probability"):
    m = np.zeros((5, 6))
    for (c, r), v in grid.items():
        m[r - 1, c] = v
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    im = ax.imshow(m, cmap="coolwarm", aspect="auto")
    for r in range(5):
        for c in range(6):
            ax.text(c, r, f"{m[r, c]:.3f}", ha="center", va="center",
                    fontsize=8)
    ax.set_xticks(range(6), [f"cat {c + 1}" for c in range(6)])
    ax.set_yticks(range(5), [f"row {r + 1}" for r in range(5)])
    ax.set_title(f"{title} (total {m.sum():.2f})")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)


def region_map_figure(a: int, b: int, c: int, path: Path):
    """The B/A vs C/B strategy plane with the entered scores marked."""
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    x = np.linspace(0.5, 1.0, 200)
    ax.axvline(2 / 3, color="red", label="B = 2A/3")
    ax.axvline(3 / 4, color="darkorange", label="B = 3A/4")
    ax.axhline(0.5, color="green", label="C = B/2")
    ax.plot(x, np.clip(2 - 1 / x, 0, 1), color="magenta", label="2B = A + C")
    ax.plot(x, np.clip((1 - x) / x, 0, 1), color="#bb5500", label="C = A - B")
    ax.plot(x, np.clip(2 * (1 - x) / x, 0, 1), color="gray", label="C = 2(A - B)")
    ax.plot(x, np.clip(1 / (2 * x), 0, 1), color="black", ls=":", label="C = A/2")
    ax.axhline(2 / 3, color="blue", ls="--", label="C = 2B/3")
    if a > 0 and b > 0:
        ax.plot([b / a], [min(c / b, 1.0)], marker="*", ms=16, color="#4477aa")
    ax.set_xlim(0.5, 1.0)
    ax.set_ylim(0, 1.0)
    ax.set_xlabel("B / A")
    ax.set_ylabel("C / B")
    ax.set_title("final-round strategy regions")
    ax.legend(fontsize=7, loc="upper left")
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
