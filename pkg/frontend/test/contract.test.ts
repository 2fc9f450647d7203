/** Contract tests against recorded service responses: every number the UI
 * displays must equal the served JSON value exactly; the UI never computes
 * strategy locally. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { renderBoard } from "../src/board.js";
import { renderBuzzCurves, renderDDCurve, renderFJCurve } from "../src/curves.js";
import type { BuzzAdvice, DDBetCurve, FJAdvice, SessionView } from "../src/types.js";
import { served } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

describe("DD curve contract", () => {
  const curve = fixture<DDBetCurve>("dd_curve.json");

  it("displays the served recommendation byte-for-byte", () => {
    const html = renderDDCurve(curve);
    expect(html).toContain(
      `data-role="chosen-bet">${JSON.stringify(curve.chosen_bet)}</b>`,
    );
    expect(html).toContain(
      `data-role="chosen-equity">${JSON.stringify(curve.chosen_equity)}</span>`,
    );
    expect(html).toContain(`seed ${curve.seed}`);
  });

  it("draws exactly the served points, no local re-derivation", () => {
    const html = renderDDCurve(curve);
    const polylines = html.match(/<polyline[^>]*>/g) ?? [];
    expect(polylines.length).toBe(3);
    for (const line of polylines) {
      const pts = (line.match(/points="([^"]*)"/) ?? [])[1].split(" ");
      expect(pts.length).toBe(curve.bets.length);
    }
  });

  it("blend identity holds on the served curve", () => {
    for (let i = 0; i < curve.bets.length; i++) {
      const blend =
        curve.p_dd * curve.equity_right[i] + (1 - curve.p_dd) * curve.equity_wrong[i];
      expect(Math.abs(blend - curve.blended[i])).toBeLessThan(1e-12);
    }
  });
});

describe("final-round advice contract", () => {
  const advice = fixture<FJAdvice>("fj_locktie.json");

  it("lock-tie leader is told to stand pat", () => {
    expect(advice.best_bet).toBe(0);
    expect(advice.region["lock_tie"]).toBe(true);
  });

  it("renders the served numbers verbatim", () => {
    const html = renderFJCurve(advice);
    expect(html).toContain(`data-role="best-bet">${JSON.stringify(advice.best_bet)}</b>`);
    expect(html).toContain(
      `data-role="best-equity">${JSON.stringify(advice.best_equity)}</span>`,
    );
    expect(html).toContain("lock_tie");
  });
});

describe("buzz advice contract", () => {
  const advice = fixture<BuzzAdvice>("buzz_freeshot.json");

  it("free-shot state: zero initial threshold served and displayed", () => {
    expect(advice.thresholds[0]).toBe(0.0);
    const html = renderBuzzCurves(advice);
    expect(html).toContain(`data-role="theta0">${served(advice.thresholds[0])}</span>`);
  });

  it("never-buzz thresholds render as 'never'", () => {
    const gone = { ...advice, thresholds: [0.2, null, 0.3, null] };
    const html = renderBuzzCurves(gone as BuzzAdvice);
    expect(html).toContain(`data-role="theta1">never</span>`);
  });

  it("curves use the served grid", () => {
    const html = renderBuzzCurves(advice);
    const pts = (html.match(/points="([^"]*)"/) ?? [])[1].split(" ");
    expect(pts.length).toBe(advice.grid.length);
  });
});

describe("board heatmap contract", () => {
  const view = fixture<SessionView>("dd_session.json");

  it("every unrevealed cell shows its served probability", () => {
    const html = renderBoard(view);
    const revealed = new Set(view.revealed.map(([c, r]) => `${c},${r}`));
    for (const [key, p] of Object.entries(view.heatmap)) {
      if (!revealed.has(key)) {
        expect(html).toContain(`${JSON.stringify(p)}</span>`);
      }
    }
  });

  it("revealed cells carry no probability shade", () => {
    const html = renderBoard(view);
    for (const [c, r] of view.revealed) {
      expect(html).toContain(`class="cell revealed" data-cell="${c},${r}"`);
    }
  });
});
