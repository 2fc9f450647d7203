import { describe, expect, it } from "vitest";

import { heatShade, renderBanner, renderBoard, renderScores } from "../src/board.js";
import type { SessionView } from "../src/types.js";

function view(overrides: Partial<SessionView> = {}): SessionView {
  const heatmap: Record<string, number> = {};
  for (let c = 0; c < 6; c++) {
    for (let r = 1; r <= 5; r++) {
      heatmap[`${c},${r}`] = r >= 3 ? 0.09 : 0.004;
    }
  }
  return {
    session_id: "t",
    round: 2,
    scores: [1200, -400, 800],
    control: 0,
    bot_seat: 0,
    revealed: [],
    clue_in_play: null,
    heatmap,
    expected_remaining_dds: 2.0,
    event_count: 0,
    ...overrides,
  };
}

describe("heat shading", () => {
  it("is monotone in probability", () => {
    const shades = [0, 0.02, 0.05, 0.09].map((p) => heatShade(p, 0.09));
    const greens = shades.map((s) => parseInt(s.split(",")[1], 10));
    for (let i = 1; i < greens.length; i++) {
      expect(greens[i]).toBeLessThanOrEqual(greens[i - 1]);
    }
  });
});

describe("board rendering", () => {
  it("shows served probabilities verbatim", () => {
    const v = view();
    const html = renderBoard(v);
    expect(html).toContain(JSON.stringify(v.heatmap["0,3"]));
    expect(html).toContain(JSON.stringify(v.heatmap["0,1"]));
  });

  it("marks revealed cells and the clue in play", () => {
    const v = view({ revealed: [[0, 1]], clue_in_play: [2, 4] });
    const html = renderBoard(v);
    expect(html).toContain('class="cell revealed" data-cell="0,1"');
    expect(html).toContain('class="cell in-play" data-cell="2,4"');
  });

  it("renders scores and control verbatim", () => {
    const html = renderScores(view());
    expect(html).toContain("1200");
    expect(html).toContain("-400");
    expect(html).toContain("control");
  });

  it("banner carries the served DD total", () => {
    const html = renderBanner(view());
    expect(html).toContain('data-role="dd-total">2');
  });
});
