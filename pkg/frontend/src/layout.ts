/** Force-directed board layout, computed client-side.
 *
 * Layout is cosmetic: vertex ids anchor identity and nothing the server
 * says depends on positions. The embedding is deterministic for a given
 * (graph, seed, size) so boards do not jump between renders. */

export interface Point {
  x: number;
  y: number;
}

/** Small deterministic PRNG (mulberry32). */
export function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width: number;
  height: number;
  seed?: number;
  iterations?: number;
}

export function forceLayout(vertexCount: number, edges: [number, number][],
                            opts: LayoutOptions): Point[] {
  const { width, height } = opts;
  const iterations = opts.iterations ?? 300;
  const rand = rng(opts.seed ?? 42);
  const margin = 0.08 * Math.min(width, height);
  const pts: Point[] = [];
  for (let i = 0; i < vertexCount; i++) {
    pts.push({ x: margin + rand() * (width - 2 * margin),
               y: margin + rand() * (height - 2 * margin) });
  }
  if (vertexCount <= 1) {
    if (vertexCount === 1) pts[0] = { x: width / 2, y: height / 2 };
    return pts;
  }

  const k = Math.sqrt((width * height) / vertexCount) * 0.6;
  const und = new Set<string>();
  for (const [u, v] of edges) und.add(`${Math.min(u, v)},${Math.max(u, v)}`);
  const links = [...und].map((s) => s.split(",").map(Number) as [number, number]);

  let temp = Math.min(width, height) / 8;
  const cool = Math.pow(0.02, 1 / iterations);
  for (let it = 0; it < iterations; it++) {
    const disp = pts.map(() => ({ x: 0, y: 0 }));
    for (let i = 0; i < vertexCount; i++) {
      for (let j = i + 1; j < vertexCount; j++) {
        let dx = pts[i].x - pts[j].x;
        let dy = pts[i].y - pts[j].y;
        let d = Math.hypot(dx, dy);
        if (d < 1e-6) {
          dx = rand() - 0.5;
          dy = rand() - 0.5;
          d = Math.hypot(dx, dy);
        }
        const f = (k * k) / d;
        disp[i].x += (dx / d) * f;
        disp[i].y += (dy / d) * f;
        disp[j].x -= (dx / d) * f;
        disp[j].y -= (dy / d) * f;
      }
    }
    for (const [u, v] of links) {
      let dx = pts[u].x - pts[v].x;
      let dy = pts[u].y - pts[v].y;
      const d = Math.hypot(dx, dy) || 1e-6;
      const f = (d * d) / k;
      disp[u].x -= (dx / d) * f;
      disp[u].y -= (dy / d) * f;
      disp[v].x += (dx / d) * f;
      disp[v].y += (dy / d) * f;
    }
    // gentle pull toward the center keeps disconnected pieces on screen
    for (let i = 0; i < vertexCount; i++) {
      disp[i].x += (width / 2 - pts[i].x) * 0.02;
      disp[i].y += (height / 2 - pts[i].y) * 0.02;
    }
    for (let i = 0; i < vertexCount; i++) {
      const d = Math.hypot(disp[i].x, disp[i].y);
      if (d > 1e-9) {
        const step = Math.min(d, temp);
        pts[i].x += (disp[i].x / d) * step;
        pts[i].y += (disp[i].y / d) * step;
      }
      pts[i].x = Math.min(width - margin, Math.max(margin, pts[i].x));
      pts[i].y = Math.min(height - margin, Math.max(margin, pts[i].y));
    }
    temp *= cool;
  }
  return pts;
}
