/** Response schemas of the advisor service (version 1). */

export interface SessionView {
  session_id: string;
  round: number;
  scores: number[];
  control: number;
  bot_seat: number;
  revealed: [number, number][];
  clue_in_play: [number, number] | null;
  heatmap: Record<string, number>;
  expected_remaining_dds: number;
  event_count: number;
}

export interface SquareRecommendation {
  cell: [number, number];
  p_dd: number;
  p_retain: number;
  policy: string;
}

export interface DDBetCurve {
  bets: number[];
  equity_right: number[];
  equity_wrong: number[];
  blended: number[];
  chosen_bet: number;
  chosen_equity: number;
  risk_neutral_bet: number;
  p_dd: number;
  method: string;
  seed: number;
  n_trials: number;
}

export interface FJAdvice {
  bets: number[];
  equity: number[];
  best_bet: number;
  best_equity: number;
  indifference_band: [number, number];
  seed: number;
  n_samples: number;
  role: string;
  rule_based_constrained: number;
  rule_based_full: number;
  region: Record<string, boolean | number>;
}

export interface BuzzAdvice {
  seed: number;
  n_trials: number;
  grid: number[];
  v_buzz: Record<string, number[]>;
  v_nobuzz: Record<string, number[]>;
  thresholds: (number | null)[];
}

export interface EventLog {
  version: number;
  opponents: string;
  bot_seat: number;
  initial_round: number;
  events: Record<string, unknown>[];
}

/** Render a served number exactly as its JSON value prints. */
export function served(value: number | null): string {
  if (value === null) return "never";
  return JSON.stringify(value);
}
