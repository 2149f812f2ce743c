import { describe, expect, it } from "vitest";

import { forceLayout, rng } from "../src/layout.js";

const SQUARE = { width: 400, height: 400, seed: 11 };

describe("rng", () => {
  it("is deterministic per seed", () => {
    const a = rng(5), b = rng(5), c = rng(6);
    const seqA = [a(), a(), a()];
    const seqB = [b(), b(), b()];
    expect(seqA).toEqual(seqB);
    expect(seqA).not.toEqual([c(), c(), c()]);
  });

  it("stays in [0, 1)", () => {
    const r = rng(1);
    for (let i = 0; i < 500; i++) {
      const x = r();
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThan(1);
    }
  });
});

describe("forceLayout", () => {
  const cycle: [number, number][] = [[0, 1], [1, 2], [2, 3], [3, 0]];

  it("is deterministic for fixed inputs", () => {
    expect(forceLayout(4, cycle, SQUARE)).toEqual(forceLayout(4, cycle, SQUARE));
  });

  it("keeps every vertex inside the canvas", () => {
    const pts = forceLayout(9, [[0, 1], [0, 2], [0, 3], [4, 5], [6, 7]],
                            SQUARE);
    for (const p of pts) {
      expect(Number.isFinite(p.x) && Number.isFinite(p.y)).toBe(true);
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(400);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(400);
    }
  });

  it("separates vertices", () => {
    const pts = forceLayout(6, cycle.concat([[3, 4], [4, 5]]), SQUARE);
    for (let i = 0; i < pts.length; i++) {
      for (let j = i + 1; j < pts.length; j++) {
        const d = Math.hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        expect(d).toBeGreaterThan(10);
      }
    }
  });

  it("centers a single vertex", () => {
    expect(forceLayout(1, [], SQUARE)).toEqual([{ x: 200, y: 200 }]);
  });

  it("pulls neighbors closer than strangers on a path", () => {
    const path: [number, number][] = [[0, 1], [1, 2], [2, 3], [3, 4]];
    const pts = forceLayout(5, path, { ...SQUARE, iterations: 500 });
    const d = (i: number, j: number) =>
      Math.hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    expect(d(0, 1)).toBeLessThan(d(0, 4));
  });
});
