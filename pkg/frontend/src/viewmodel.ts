/** Pure derivation of everything the board shows from the latest server
 * view (plus the latest analysis payload for hover values).
 *
 * No rule logic lives here: legality comes from the server's legal-move
 * list and rejections, and hover values are the analysis strings
 * verbatim — if analysis is unavailable the overlay says so instead of
 * showing any number. */

import type { Analysis, GameView, MoveDoc } from "./types.js";
import { isStep } from "./types.js";

export type CustomerBadge = "remaining" | "captured-I" | "captured-II";

export interface VertexView {
  id: number;
  label: string;
  customer: CustomerBadge | null;
  pieceI: boolean;
  pieceII: boolean;
  start: boolean;
  clickable: boolean;
}

export interface BoardViewModel {
  vertices: VertexView[];
  turnText: string;
  scoreText: string;
  statusText: string;
  humanToMove: boolean;
  canPass: boolean;
  engineNote: string;
}

/** Who captured each vertex, replayed from the view's move history. */
export function captureOwners(view: GameView): Map<number, "I" | "II"> {
  const owners = new Map<number, "I" | "II">();
  for (const h of view.history) {
    if (h.delta === 1 && isStep(h.move)) owners.set(h.move.target, h.player);
  }
  return owners;
}

/** Targets the human may step to right now, with the piece that goes
 * there (the lowest piece index when several could). */
export function clickTargets(view: GameView): Map<number, number> {
  const targets = new Map<number, number>();
  if (view.finished) return targets;
  for (const m of view.legal_moves) {
    if (isStep(m) && !targets.has(m.target)) targets.set(m.target, m.piece);
  }
  return targets;
}

export function humanToMove(view: GameView): boolean {
  if (view.finished) return false;
  if (view.mode === "human_vs_human") return true;
  if (view.mode === "engine_vs_engine") return false;
  return view.state.turn === view.human_role;
}

export function deriveBoard(view: GameView): BoardViewModel {
  const remaining = new Set(view.state.remaining);
  const customers = new Set(view.instance.customers);
  const owners = captureOwners(view);
  const piecesI = new Set(view.state.pieces_i);
  const piecesII = new Set(view.state.pieces_ii);
  const starts = new Set([...view.instance.starts_i, ...view.instance.starts_ii]);
  const mine = humanToMove(view);
  const targets = clickTargets(view);

  const vertices: VertexView[] = [];
  for (let v = 0; v < view.instance.vertices; v++) {
    let badge: CustomerBadge | null = null;
    if (customers.has(v)) {
      if (remaining.has(v)) badge = "remaining";
      else badge = owners.get(v) === "II" ? "captured-II" : "captured-I";
    }
    vertices.push({
      id: v,
      label: view.instance.labels?.[v] ?? String(v),
      customer: badge,
      pieceI: piecesI.has(v),
      pieceII: piecesII.has(v),
      start: starts.has(v),
      clickable: mine && targets.has(v),
    });
  }

  let statusText: string;
  if (view.finished) {
    statusText = view.reason === "repetition_draw"
      ? `${view.outcome} — position repeated`
      : `game over: ${view.outcome}`;
  } else if (mine) {
    statusText = "your move";
  } else if (view.mode === "engine_vs_engine") {
    statusText = "engine vs engine";
  } else {
    statusText = `waiting for ${view.state.turn}`;
  }

  const engineNote = view.engine.exact
    ? "engine: exact"
    : `engine: heuristic (${view.engine.heuristic_moves} greedy moves)`;

  return {
    vertices,
    turnText: view.finished ? "—" : `turn: ${view.state.turn}`,
    scoreText: `I ${view.scores.i} : ${view.scores.ii} II`,
    statusText,
    humanToMove: mine,
    canPass: mine && view.legal_moves.some((m) => (m as { pass?: true }).pass === true),
    engineNote,
  };
}

export const ANALYSIS_UNAVAILABLE = "exact analysis unavailable";

export interface HoverOverlay {
  /** target vertex -> value string, verbatim from /analysis */
  valuesByTarget: Map<number, string>;
  passValue: string | null;
  stateValue: string | null;
  note: string | null;
}

/** Hover overlay from an analysis payload. Every value string is passed
 * through untouched so what the user sees is byte-for-byte what the
 * service computed. */
export function deriveOverlay(analysis: Analysis | null): HoverOverlay {
  if (!analysis || !analysis.available) {
    return { valuesByTarget: new Map(), passValue: null, stateValue: null,
             note: ANALYSIS_UNAVAILABLE };
  }
  const valuesByTarget = new Map<number, string>();
  let passValue: string | null = null;
  for (const m of analysis.moves ?? []) {
    if (isStep(m.move)) {
      if (!valuesByTarget.has(m.move.target)) {
        valuesByTarget.set(m.move.target, m.value);
      }
    } else if ((m.move as { pass?: true }).pass) {
      passValue = m.value;
    }
  }
  return { valuesByTarget, passValue,
           stateValue: analysis.state_value ?? null, note: null };
}

/** The move to submit for a clicked vertex, or null when the click is a
 * no-op (not a legal target right now). */
export function moveForClick(view: GameView, vertex: number): MoveDoc | null {
  if (!humanToMove(view)) return null;
  const piece = clickTargets(view).get(vertex);
  if (piece === undefined) return null;
  return { piece, target: vertex };
}
