import { describe, expect, it } from "vitest";

import type { Analysis, GameView } from "../src/types.js";
import {
  ANALYSIS_UNAVAILABLE,
  captureOwners,
  clickTargets,
  deriveBoard,
  deriveOverlay,
  humanToMove,
  moveForClick,
} from "../src/viewmodel.js";

function wheelView(overrides: Partial<GameView> = {}): GameView {
  return {
    session: "s1",
    mode: "human_vs_engine",
    human_role: "I",
    instance: {
      version: 1,
      directed: true,
      vertices: 6,
      edges: [[0, 1], [0, 2], [0, 3], [0, 4], [0, 5],
              [1, 3], [2, 4], [3, 5], [4, 1], [5, 2]],
      customers: [1, 2, 3, 4, 5],
      starts_i: [0],
      starts_ii: [0],
      passing_allowed: false,
      draw_rank: "below_tie",
    },
    state: { turn: "I", pieces_i: [0], pieces_ii: [0],
             remaining: [1, 2, 3, 4, 5] },
    scores: { i: 0, ii: 0 },
    legal_moves: [{ piece: 0, target: 1 }, { piece: 0, target: 2 },
                  { piece: 0, target: 3 }, { piece: 0, target: 4 },
                  { piece: 0, target: 5 }],
    finished: false,
    outcome: null,
    reason: null,
    history: [],
    engine: { exact: true, heuristic_moves: 0 },
    ...overrides,
  };
}

describe("captureOwners", () => {
  it("attributes captures from the history", () => {
    const view = wheelView({
      history: [
        { player: "I", move: { piece: 0, target: 1 }, delta: 1 },
        { player: "II", move: { piece: 0, target: 3 }, delta: 1 },
        { player: "I", move: { piece: 0, target: 3 }, delta: 0 },
      ],
    });
    const owners = captureOwners(view);
    expect(owners.get(1)).toBe("I");
    expect(owners.get(3)).toBe("II");
    expect(owners.has(0)).toBe(false);
  });
});

describe("deriveBoard", () => {
  it("badges come solely from the server view", () => {
    const view = wheelView({
      state: { turn: "I", pieces_i: [1], pieces_ii: [3],
               remaining: [2, 4, 5] },
      scores: { i: 1, ii: 1 },
      history: [
        { player: "I", move: { piece: 0, target: 1 }, delta: 1 },
        { player: "II", move: { piece: 0, target: 3 }, delta: 1 },
      ],
      legal_moves: [{ piece: 0, target: 3 }],
    });
    const vm = deriveBoard(view);
    const v = vm.vertices;
    expect(v[0].customer).toBeNull();
    expect(v[0].start).toBe(true);
    expect(v[1].customer).toBe("captured-I");
    expect(v[3].customer).toBe("captured-II");
    expect(v[2].customer).toBe("remaining");
    expect(v[1].pieceI).toBe(true);
    expect(v[3].pieceII).toBe(true);
    expect(vm.scoreText).toBe("I 1 : 1 II");
    expect(v[3].clickable).toBe(true);
    expect(v[2].clickable).toBe(false);
  });

  it("turn and status react to mode and finish", () => {
    expect(deriveBoard(wheelView()).statusText).toBe("your move");
    expect(deriveBoard(wheelView({ mode: "engine_vs_engine" })).statusText)
      .toBe("engine vs engine");
    const done = wheelView({ finished: true, outcome: "Draw",
                             reason: "repetition_draw", legal_moves: [] });
    expect(deriveBoard(done).statusText).toContain("position repeated");
    expect(deriveBoard(done).humanToMove).toBe(false);
  });

  it("reports the heuristic engine", () => {
    const vm = deriveBoard(wheelView({
      engine: { exact: false, heuristic_moves: 3 },
    }));
    expect(vm.engineNote).toContain("heuristic");
  });
});

describe("humanToMove / clickTargets / moveForClick", () => {
  it("hotseat humans always move; engine-vs-engine never", () => {
    expect(humanToMove(wheelView({ mode: "human_vs_human" }))).toBe(true);
    expect(humanToMove(wheelView({ mode: "engine_vs_engine" }))).toBe(false);
  });

  it("maps a click to the lowest capable piece", () => {
    const view = wheelView({
      legal_moves: [{ piece: 1, target: 4 }, { piece: 0, target: 4 }],
    });
    expect(clickTargets(view).get(4)).toBe(1);
    expect(moveForClick(view, 4)).toEqual({ piece: 1, target: 4 });
  });

  it("clicking a non-target is a no-op", () => {
    const view = wheelView();
    expect(moveForClick(view, 0)).toBeNull();   // own current vertex
    expect(moveForClick(wheelView({ state: { ...view.state, turn: "II" } }), 1))
      .toBeNull();   // not the human's turn
  });
});

describe("deriveOverlay", () => {
  it("passes analysis values through byte-for-byte", () => {
    const analysis: Analysis = {
      available: true,
      exact: true,
      state_value: "Ended(-1)",
      moves: [
        { move: { piece: 0, target: 1 }, value: "Ended(-1)" },
        { move: { piece: 0, target: 2 }, value: "Ended(-3)" },
        { move: { pass: true }, value: "Draw" },
      ],
    };
    const overlay = deriveOverlay(analysis);
    expect(overlay.valuesByTarget.get(1)).toBe("Ended(-1)");
    expect(overlay.valuesByTarget.get(2)).toBe("Ended(-3)");
    expect(overlay.passValue).toBe("Draw");
    expect(overlay.stateValue).toBe("Ended(-1)");
    expect(overlay.note).toBeNull();
  });

  it("unavailable analysis shows the note and no numbers", () => {
    for (const analysis of [null, { available: false } as Analysis]) {
      const overlay = deriveOverlay(analysis);
      expect(overlay.note).toBe(ANALYSIS_UNAVAILABLE);
      expect(overlay.valuesByTarget.size).toBe(0);
      expect(overlay.stateValue).toBeNull();
    }
  });
});
