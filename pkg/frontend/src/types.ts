/** Wire types for the play-service HTTP API. The client never invents
 * values: everything rendered comes verbatim from these payloads. */

export interface InstanceDoc {
  version: number;
  directed: boolean;
  vertices: number;
  labels?: string[];
  edges: [number, number][];
  customers: number[];
  starts_i: number[];
  starts_ii: number[];
  passing_allowed: boolean;
  draw_rank: string;
}

export type MoveDoc =
  | { piece: number; target: number }
  | { pass: true }
  | { null: true };

export interface HistoryEntry {
  player: "I" | "II";
  move: MoveDoc;
  delta: number;
}

export interface GameView {
  session: string;
  mode: string;
  human_role: "I" | "II" | null;
  instance: InstanceDoc;
  state: {
    turn: "I" | "II";
    pieces_i: number[];
    pieces_ii: number[];
    remaining: number[];
  };
  scores: { i: number; ii: number };
  legal_moves: MoveDoc[];
  finished: boolean;
  outcome: string | null;
  reason: string | null;
  history: HistoryEntry[];
  engine: { exact: boolean; heuristic_moves: number };
}

export interface AnalysisMove {
  move: MoveDoc;
  value: string;
}

export interface Analysis {
  available: boolean;
  exact?: boolean;
  state_value?: string;
  moves?: AnalysisMove[];
}

export interface CatalogEntry {
  name: string;
  params: Record<string, unknown>;
  certificate: string;
  provenance: string;
  vertices: number;
  customers: number;
}

export function isStep(m: MoveDoc): m is { piece: number; target: number } {
  return (m as { piece?: number }).piece !== undefined;
}
