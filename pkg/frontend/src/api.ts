/** Typed client for the advisor service. Every strategic number the UI
 * shows comes from these calls; nothing is recomputed locally. */

import type {
  BuzzAdvice,
  DDBetCurve,
  EventLog,
  FJAdvice,
  SessionView,
  SquareRecommendation,
} from "./types.js";

export class AdvisorClient {
  constructor(private base: string = "") {}

  private async call<T>(path: string, method = "GET", body?: unknown): Promise<T> {
    const res = await fetch(this.base + path, {
      method,
      headers: body ? { "Content-Type": "application/json" } : undefined,
      body: body ? JSON.stringify(body) : undefined,
    });
    if (!res.ok) {
      const detail = await res.text();
      throw new Error(`service ${res.status}: ${detail}`);
    }
    return (await res.json()) as T;
  }

  createSession(opts: {
    opponents?: string;
    round?: number;
    scores?: number[];
  }): Promise<SessionView> {
    return this.call("/session", "POST", opts);
  }

  getSession(sid: string): Promise<SessionView> {
    return this.call(`/session/${sid}`);
  }

  postEvent(sid: string, event: Record<string, unknown>): Promise<SessionView> {
    return this.call(`/session/${sid}/event`, "POST", event);
  }

  undo(sid: string): Promise<SessionView> {
    return this.call(`/session/${sid}/undo`, "POST");
  }

  exportLog(sid: string): Promise<EventLog> {
    return this.call(`/session/${sid}/export`);
  }

  importLog(log: EventLog): Promise<SessionView> {
    return this.call("/session/import", "POST", log);
  }

  recommendSquare(sid: string): Promise<SquareRecommendation> {
    return this.call(`/session/${sid}/recommend-square`);
  }

  ddBet(
    sid: string,
    confidence: number,
    opts: { n_trials?: number; seed?: number } = {},
  ): Promise<DDBetCurve> {
    return this.call(`/session/${sid}/dd-bet`, "POST", { confidence, ...opts });
  }

  fjBet(
    sid: string,
    confidence: number,
    opts: { n_samples?: number; seed?: number } = {},
  ): Promise<FJAdvice> {
    return this.call(`/session/${sid}/fj-bet`, "POST", { confidence, ...opts });
  }

  buzz(sid: string, opts: { n_trials?: number; seed?: number } = {}): Promise<BuzzAdvice> {
    return this.call(`/session/${sid}/buzz`, "POST", opts);
  }

  region(a: number, b: number, c: number): Promise<Record<string, boolean | number>> {
    return this.call("/calc/region", "POST", { a, b, c });
  }
}
