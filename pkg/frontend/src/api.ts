/** Thin typed client over the play-service endpoints. Server errors are
 * surfaced with their literal message so banners can show them verbatim. */

import type { Analysis, CatalogEntry, GameView, InstanceDoc, MoveDoc } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let message = `HTTP ${res.status}`;
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body; keep the status message */
  }
  return new ApiError(res.status, message);
}

export class ArenaClient {
  constructor(readonly base: string = "", private fetcher: typeof fetch = fetch) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetcher(this.base + path, init);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  catalog(): Promise<CatalogEntry[]> {
    return this.request("/catalog");
  }

  createGame(instance: string | InstanceDoc, mode: string,
             humanRole: "I" | "II"): Promise<GameView> {
    const body: Record<string, unknown> = { instance, mode };
    if (mode === "human_vs_engine") body.human_role = humanRole;
    return this.request("/games", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  view(session: string): Promise<GameView> {
    return this.request(`/games/${session}`);
  }

  move(session: string, move: MoveDoc): Promise<GameView> {
    return this.request(`/games/${session}/moves`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(move),
    });
  }

  /** Analysis is special-cased: HTTP 413 is the documented
   * exact-analysis-unavailable answer, not an error. */
  async analysis(session: string): Promise<Analysis> {
    const res = await this.fetcher(`${this.base}/games/${session}/analysis`);
    if (res.status === 413) return { available: false };
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as Analysis;
  }
}
