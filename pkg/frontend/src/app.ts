/** Advisor application shell: one active session per tab, optimistic
 * renders rolled back on service rejection, undo via event-log truncation,
 * and event-log export/import compatible with the CLI replay command. */

import { AdvisorClient } from "./api.js";
import { renderBanner, renderBoard, renderScores } from "./board.js";
import { renderBuzzCurves, renderDDCurve, renderFJCurve } from "./curves.js";
import type { SessionView } from "./types.js";
import { served } from "./types.js";

export class AdvisorApp {
  private view: SessionView | null = null;

  constructor(
    private client: AdvisorClient,
    private root: HTMLElement,
  ) {}

  async start(opponents: string, round: number): Promise<void> {
    this.view = await this.client.createSession({ opponents, round });
    await this.renderAll();
  }

  current(): SessionView {
    if (!this.view) throw new Error("no active session");
    return this.view;
  }

  /** Send an operator event; on rejection re-render the last good view so
   * entered data never silently corrupts the tracked state. */
  async record(event: Record<string, unknown>): Promise<void> {
    const sid = this.current().session_id;
    try {
      this.view = await this.client.postEvent(sid, event);
    } catch (err) {
      await this.renderAll();
      this.flash(String(err));
      return;
    }
    await this.renderAll();
  }

  async undo(): Promise<void> {
    const sid = this.current().session_id;
    this.view = await this.client.undo(sid);
    await this.renderAll();
  }

  async exportLog(): Promise<string> {
    const log = await this.client.exportLog(this.current().session_id);
    return JSON.stringify(log, null, 2);
  }

  async showDDCurve(confidence: number, seed = 0): Promise<void> {
    const curve = await this.client.ddBet(this.current().session_id, confidence, {
      seed,
    });
    this.panel("dd-panel", renderDDCurve(curve));
  }

  async showFJ(confidence: number, seed = 0): Promise<void> {
    const advice = await this.client.fjBet(this.current().session_id, confidence, {
      seed,
    });
    this.panel("fj-panel", renderFJCurve(advice));
  }

  async showBuzz(seed = 0): Promise<void> {
    const advice = await this.client.buzz(this.current().session_id, { seed });
    this.panel("buzz-panel", renderBuzzCurves(advice));
  }

  private async renderAll(): Promise<void> {
    const view = this.current();
    this.panel("banner", renderBanner(view));
    this.panel("scores", renderScores(view));
    this.panel("board", renderBoard(view));
    try {
      const rec = await this.client.recommendSquare(view.session_id);
      this.panel(
        "recommend",
        `<div class="recommend">pick <b>${rec.cell[0] + 1}-${rec.cell[1]}</b> ` +
          `(p<sub>DD</sub> ${served(rec.p_dd)}, retain ${served(rec.p_retain)})</div>`,
      );
    } catch {
      this.panel("recommend", "");
    }
  }

  private panel(id: string, html: string): void {
    let el = this.root.querySelector(`#${id}`);
    if (!el) {
      el = document.createElement("div");
      el.id = id;
      this.root.appendChild(el);
    }
    el.innerHTML = html;
  }

  private flash(message: string): void {
    this.panel("flash", `<div class="error">${message}</div>`);
  }
}
