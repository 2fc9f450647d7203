/** Board view rendering: 6x5 grid with DD-probability shading, score panel,
 * control indicator and phase banner. Pure functions from served data to
 * markup so the contract tests can assert displayed numbers verbatim. */

import type { SessionView } from "./types.js";
import { served } from "./types.js";

const ROW_VALUES: Record<number, number[]> = {
  1: [200, 400, 600, 800, 1000],
  2: [400, 800, 1200, 1600, 2000],
};

/** Monotone shade: white at zero through warm red at the board max. */
export function heatShade(p: number, pMax: number): string {
  const t = pMax > 0 ? Math.min(p / pMax, 1) : 0;
  const g = Math.round(235 - 150 * t);
  const b = Math.round(235 - 195 * t);
  return `rgb(245,${g},${b})`;
}

export function renderBoard(view: SessionView): string {
  const revealed = new Set(view.revealed.map(([c, r]) => `${c},${r}`));
  const values = ROW_VALUES[view.round] ?? ROW_VALUES[2];
  const pMax = Math.max(...Object.values(view.heatmap), 1e-9);
  const rows: string[] = [];
  for (let r = 1; r <= 5; r++) {
    const cells: string[] = [];
    for (let c = 0; c < 6; c++) {
      const key = `${c},${r}`;
      const p = view.heatmap[key] ?? 0;
      const inPlay =
        view.clue_in_play && view.clue_in_play[0] === c && view.clue_in_play[1] === r;
      if (revealed.has(key)) {
        cells.push(`<td class="cell revealed" data-cell="${key}"></td>`);
      } else {
        cells.push(
          `<td class="cell${inPlay ? " in-play" : ""}" data-cell="${key}" ` +
            `style="background:${heatShade(p, pMax)}" ` +
            `title="p_DD = ${served(p)}">$${values[r - 1]}<span class="pdd">${served(p)}</span></td>`,
        );
      }
    }
    rows.push(`<tr>${cells.join("")}</tr>`);
  }
  return `<table class="board">${rows.join("")}</table>`;
}

export function renderScores(view: SessionView): string {
  const parts = view.scores.map((s, i) => {
    const tags: string[] = [];
    if (i === view.bot_seat) tags.push("bot");
    if (i === view.control) tags.push("control");
    return (
      `<div class="score${i === view.control ? " has-control" : ""}">` +
      `<span class="who">P${i + 1}${tags.length ? " (" + tags.join(", ") + ")" : ""}</span>` +
      `<span class="amount">${served(s)}</span></div>`
    );
  });
  return `<div class="scores">${parts.join("")}</div>`;
}

export function renderBanner(view: SessionView): string {
  const remaining = 30 - view.revealed.length;
  const phase = remaining === 0 ? "final round" : `round ${view.round}`;
  return (
    `<div class="banner">${phase} &middot; ` +
    `expected hidden DDs <b data-role="dd-total">${served(view.expected_remaining_dds)}</b></div>`
  );
}
