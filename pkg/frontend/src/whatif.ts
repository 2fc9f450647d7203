/** What-if panel: hypothetical edits evaluated against the service without
 * committing them to the tracked session. Each sweep creates throwaway
 * sessions so the live session's event log stays clean. */

import { AdvisorClient } from "./api.js";
import type { BuzzAdvice, FJAdvice, SessionView } from "./types.js";
import { served } from "./types.js";

export interface WhatIfResult {
  label: string;
  html: string;
}

/** Re-run the recommendations for hypothetical scores; identity edits must
 * return identical advice (same seeds, same engine). */
export async function whatIfScores(
  client: AdvisorClient,
  base: SessionView,
  scores: number[],
  confidence: number,
  seed = 0,
): Promise<FJAdvice> {
  const session = await client.createSession({
    opponents: "average",
    round: base.round,
    scores,
  });
  return client.fjBet(session.session_id, confidence, { seed, n_samples: 4000 });
}

/** Sweep the strategic score across a last-clue family and collect the
 * initial buzz threshold at each point (the threshold-vs-score study). */
export async function thresholdSweep(
  client: AdvisorClient,
  opponents: [number, number],
  clueRow: number,
  scores: number[],
  seed = 0,
  nTrials = 20000,
): Promise<{ score: number; theta0: number | null }[]> {
  const out: { score: number; theta0: number | null }[] = [];
  for (const score of scores) {
    const session = await client.createSession({
      opponents: "average",
      round: 2,
      scores: [score, opponents[0], opponents[1]],
    });
    // reveal everything except the clue in play
    const events: Record<string, unknown>[] = [];
    for (let c = 0; c < 6; c++) {
      for (let r = 1; r <= 5; r++) {
        if (!(c === 0 && r === clueRow)) {
          events.push({ type: "select", cell: [c, r] });
          events.push({ type: "regular", deltas: [0, 0, 0] });
        }
      }
    }
    events.push({ type: "select", cell: [0, clueRow] });
    for (const e of events) {
      await client.postEvent(session.session_id, e);
    }
    const advice: BuzzAdvice = await client.buzz(session.session_id, {
      seed,
      n_trials: nTrials,
    });
    out.push({ score, theta0: advice.thresholds[0] });
  }
  return out;
}

export function renderSweep(
  rows: { score: number; theta0: number | null }[],
): string {
  const cells = rows
    .map(
      (r) =>
        `<tr><td>${r.score}</td><td data-role="sweep-theta">${served(r.theta0)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="sweep"><thead><tr><th>score</th><th>&theta;<sub>0</sub></th></tr></thead>` +
    `<tbody>${cells}</tbody></table>`
  );
}

/** Position marker on the final-round region plane (B/A vs C/B). */
export function regionPoint(a: number, b: number, c: number): { x: number; y: number } {
  return { x: a > 0 ? b / a : 0, y: b > 0 ? Math.min(c / b, 1) : 0 };
}
