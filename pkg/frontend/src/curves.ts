/** Dependency-free SVG curve rendering for served point arrays. The service
 * sends complete curves; the UI only scales and draws them. */

import type { BuzzAdvice, DDBetCurve, FJAdvice } from "./types.js";
import { served } from "./types.js";

const W = 560;
const H = 260;
const PAD = 36;

function polyline(xs: number[], ys: number[], color: string, xr: [number, number], yr: [number, number]): string {
  const sx = (x: number) => PAD + ((x - xr[0]) / (xr[1] - xr[0] || 1)) * (W - 2 * PAD);
  const sy = (y: number) => H - PAD - ((y - yr[0]) / (yr[1] - yr[0] || 1)) * (H - 2 * PAD);
  const pts = xs.map((x, i) => `${sx(x).toFixed(1)},${sy(ys[i]).toFixed(1)}`).join(" ");
  return `<polyline fill="none" stroke="${color}" stroke-width="1.6" points="${pts}"/>`;
}

function vline(x: number, color: string, xr: [number, number], dash = false): string {
  const sx = PAD + ((x - xr[0]) / (xr[1] - xr[0] || 1)) * (W - 2 * PAD);
  return `<line x1="${sx.toFixed(1)}" y1="${PAD}" x2="${sx.toFixed(1)}" y2="${H - PAD}" stroke="${color}"${dash ? ' stroke-dasharray="5,3"' : ""}/>`;
}

export function renderDDCurve(curve: DDBetCurve): string {
  const xr: [number, number] = [curve.bets[0], curve.bets[curve.bets.length - 1]];
  const all = [...curve.equity_right, ...curve.equity_wrong, ...curve.blended];
  const yr: [number, number] = [Math.min(...all), Math.max(...all)];
  return (
    `<figure class="curve" data-kind="dd">` +
    `<svg viewBox="0 0 ${W} ${H}">` +
    polyline(curve.bets, curve.equity_right, "#228833", xr, yr) +
    polyline(curve.bets, curve.equity_wrong, "#cc3311", xr, yr) +
    polyline(curve.bets, curve.blended, "#4477aa", xr, yr) +
    vline(curve.chosen_bet, "#ee7733", xr, true) +
    `</svg>` +
    `<figcaption>recommended bet <b data-role="chosen-bet">${served(curve.chosen_bet)}</b>` +
    ` (equity <span data-role="chosen-equity">${served(curve.chosen_equity)}</span>,` +
    ` risk-neutral ${served(curve.risk_neutral_bet)},` +
    ` ${curve.n_trials} trials, seed ${curve.seed})</figcaption></figure>`
  );
}

export function renderFJCurve(advice: FJAdvice): string {
  const xr: [number, number] = [advice.bets[0], advice.bets[advice.bets.length - 1]];
  const yr: [number, number] = [Math.min(...advice.equity), Math.max(...advice.equity)];
  const regionFlags = Object.entries(advice.region)
    .filter(([, v]) => v === true)
    .map(([k]) => k)
    .join(", ");
  return (
    `<figure class="curve" data-kind="fj">` +
    `<svg viewBox="0 0 ${W} ${H}">` +
    polyline(advice.bets, advice.equity, "#4477aa", xr, yr) +
    vline(advice.best_bet, "#ee7733", xr, true) +
    `</svg>` +
    `<figcaption>role ${advice.role}: best bet <b data-role="best-bet">${served(advice.best_bet)}</b>` +
    ` (equity <span data-role="best-equity">${served(advice.best_equity)}</span>),` +
    ` band ${served(advice.indifference_band[0])}&ndash;${served(advice.indifference_band[1])},` +
    ` rules: cover ${served(advice.rule_based_constrained)} / full ${served(advice.rule_based_full)}` +
    `<span class="region" data-role="region">${regionFlags}</span></figcaption></figure>`
  );
}

export function renderBuzzCurves(advice: BuzzAdvice, state = 0): string {
  const grid = advice.grid;
  const vb = advice.v_buzz[String(state)];
  const vnb = advice.v_nobuzz[String(state)];
  const all = [...vb, ...vnb];
  const xr: [number, number] = [0, 1];
  const yr: [number, number] = [Math.min(...all), Math.max(...all)];
  const th = advice.thresholds[state];
  return (
    `<figure class="curve" data-kind="buzz">` +
    `<svg viewBox="0 0 ${W} ${H}">` +
    polyline(grid, vb, "#228833", xr, yr) +
    polyline(grid, vnb, "#cc3311", xr, yr) +
    (th !== null ? vline(th, "#4477aa", xr, true) : "") +
    `</svg>` +
    `<figcaption>thresholds: ` +
    advice.thresholds
      .map((t, i) => `&theta;<sub>${i}</sub> = <span data-role="theta${i}">${served(t)}</span>`)
      .join(", ") +
    ` (${advice.n_trials} trials, seed ${advice.seed})</figcaption></figure>`
  );
}
