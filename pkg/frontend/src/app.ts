/** Browser arena: pick an instance, play a seat against the engine (or
 * watch engine vs engine), and hover any legal target to see its exact
 * value before committing. All truth comes from the play service; this
 * file only renders views and forwards clicks. */

import { ApiError, ArenaClient } from "./api.js";
import { forceLayout, Point } from "./layout.js";
import type { Analysis, GameView, InstanceDoc, MoveDoc } from "./types.js";
import {
  ANALYSIS_UNAVAILABLE,
  deriveBoard,
  deriveOverlay,
  moveForClick,
} from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 760;
const HEIGHT = 560;

interface ArenaState {
  view: GameView | null;
  layout: Point[];
  analysis: Analysis | null;
  analysisForPly: number;
  overlayOn: boolean;
  busy: boolean;
}

const state: ArenaState = {
  view: null,
  layout: [],
  analysis: null,
  analysisForPly: -1,
  overlayOn: true,
  busy: false,
};

const client = new ArenaClient("");

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function banner(message: string, kind: "error" | "hint" | "" = "error") {
  const b = byId<HTMLDivElement>("banner");
  b.textContent = message;
  b.className = message ? `banner ${kind}` : "banner hidden";
  if (!message) b.classList.add("hidden");
}

async function loadCatalog() {
  try {
    const entries = await client.catalog();
    const select = byId<HTMLSelectElement>("catalog-select");
    select.innerHTML = "";
    for (const e of entries) {
      const opt = document.createElement("option");
      opt.value = e.name;
      opt.textContent = `${e.name} (${e.vertices}v, ${e.customers} customers)`;
      opt.title = `${e.provenance}\n${e.certificate}`;
      select.appendChild(opt);
    }
  } catch (err) {
    banner(`service unreachable: ${(err as Error).message}`);
  }
}

let uploaded: InstanceDoc | null = null;

function wireSetup() {
  byId<HTMLInputElement>("upload").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      uploaded = JSON.parse(await file.text()) as InstanceDoc;
      byId<HTMLSpanElement>("upload-name").textContent = file.name;
    } catch {
      uploaded = null;
      banner("could not parse the uploaded file as JSON");
    }
  });
  byId<HTMLButtonElement>("start").addEventListener("click", startGame);
  byId<HTMLButtonElement>("pass").addEventListener("click", () => {
    void submit({ pass: true });
  });
  byId<HTMLInputElement>("overlay-toggle").addEventListener("change", (ev) => {
    state.overlayOn = (ev.target as HTMLInputElement).checked;
    render();
  });
}

async function startGame() {
  const useUpload = byId<HTMLInputElement>("use-upload").checked;
  const instance = useUpload && uploaded ? uploaded
    : byId<HTMLSelectElement>("catalog-select").value;
  const mode = byId<HTMLSelectElement>("mode-select").value;
  const role = byId<HTMLSelectElement>("role-select").value as "I" | "II";
  banner("");
  try {
    const view = await client.createGame(instance, mode, role);
    state.view = view;
    state.layout = forceLayout(view.instance.vertices, view.instance.edges,
                               { width: WIDTH, height: HEIGHT, seed: 7 });
    state.analysis = null;
    state.analysisForPly = -1;
    render();
    void refreshAnalysis();
  } catch (err) {
    banner((err as Error).message);   // server reasons shown verbatim
  }
}

async function refreshAnalysis() {
  const view = state.view;
  if (!view || !state.overlayOn) return;
  const ply = view.history.length;
  if (state.analysisForPly === ply) return;
  try {
    const analysis = await client.analysis(view.session);
    if (state.view === view || state.view?.history.length === ply) {
      state.analysis = analysis;
      state.analysisForPly = ply;
      render();
    }
  } catch (err) {
    banner((err as Error).message);
  }
}

async function submit(move: MoveDoc) {
  const view = state.view;
  if (!view || state.busy) return;
  state.busy = true;
  try {
    const next = await client.move(view.session, move);
    const captured = next.scores.i + next.scores.ii >
      view.scores.i + view.scores.ii;
    state.view = next;
    state.analysis = null;
    render();
    if (captured) {
      byId<HTMLDivElement>("scores").classList.add("flash");
      setTimeout(() => byId<HTMLDivElement>("scores").classList.remove("flash"), 400);
    }
    void refreshAnalysis();
  } catch (err) {
    if (err instanceof ApiError && err.status === 422) {
      banner("illegal move", "hint");
      shakeBoard();
    } else {
      banner((err as Error).message);
    }
  } finally {
    state.busy = false;
  }
}

function shakeBoard() {
  const svg = byId<HTMLElement>("board");
  svg.classList.add("shake");
  setTimeout(() => svg.classList.remove("shake"), 300);
}

function onVertexClick(vertex: number) {
  const view = state.view;
  if (!view) return;
  const move = moveForClick(view, vertex);
  if (!move) {
    banner(view.finished ? "the game is over"
      : "not a legal target right now", "hint");
    shakeBoard();
    return;
  }
  const circle = document.querySelector(`[data-vertex="${vertex}"]`);
  circle?.classList.add("pending");
  void submit(move);
}

function svgEl(tag: string): SVGElement {
  return document.createElementNS(SVG_NS, tag);
}

function render() {
  const view = state.view;
  const svg = byId<HTMLElement>("board");
  svg.innerHTML = "";
  if (!view) return;
  const vm = deriveBoard(view);
  const overlay = state.overlayOn ? deriveOverlay(
    state.analysisForPly === view.history.length ? state.analysis : null)
    : null;

  byId<HTMLDivElement>("scores").textContent = vm.scoreText;
  byId<HTMLDivElement>("turn").textContent = vm.turnText;
  byId<HTMLDivElement>("status").textContent = vm.statusText;
  byId<HTMLDivElement>("engine-note").textContent = vm.engineNote;
  byId<HTMLButtonElement>("pass").disabled = !vm.canPass;
  const valueLine = byId<HTMLDivElement>("state-value");
  if (!state.overlayOn) {
    valueLine.textContent = "";
  } else if (overlay && overlay.note) {
    valueLine.textContent = overlay.note;   // never a number when unavailable
  } else if (overlay && overlay.stateValue !== null) {
    valueLine.textContent = `state value: ${overlay.stateValue}`;
  } else {
    valueLine.textContent = "";
  }

  // edges under vertices; a small arrowhead marks direction on digraphs
  const defs = svgEl("defs");
  defs.innerHTML =
    `<marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" ` +
    `markerWidth="6" markerHeight="6" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z" fill="#9aa3ad"/></marker>`;
  svg.appendChild(defs);
  for (const [u, v] of view.instance.edges) {
    const line = svgEl("line");
    line.setAttribute("x1", String(state.layout[u].x));
    line.setAttribute("y1", String(state.layout[u].y));
    line.setAttribute("x2", String(state.layout[v].x));
    line.setAttribute("y2", String(state.layout[v].y));
    line.setAttribute("class", "edge");
    if (view.instance.directed) line.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(line);
  }

  for (const vv of vm.vertices) {
    const g = svgEl("g");
    g.setAttribute("transform",
      `translate(${state.layout[vv.id].x},${state.layout[vv.id].y})`);
    g.setAttribute("data-vertex", String(vv.id));
    const classes = ["vertex"];
    if (vv.customer) classes.push(vv.customer);
    if (vv.clickable) classes.push("clickable");
    g.setAttribute("class", classes.join(" "));

    if (vv.start) {
      const hex = svgEl("polygon");
      const r = 17;
      const pts = Array.from({ length: 6 }, (_, i) => {
        const a = (Math.PI / 3) * i + Math.PI / 6;
        return `${r * Math.cos(a)},${r * Math.sin(a)}`;
      }).join(" ");
      hex.setAttribute("points", pts);
      hex.setAttribute("class", "start-marker");
      g.appendChild(hex);
    }
    const c = svgEl("circle");
    c.setAttribute("r", "12");
    g.appendChild(c);
    if (vv.customer) {
      const ring = svgEl("circle");
      ring.setAttribute("r", "15.5");
      ring.setAttribute("class", "customer-ring");
      g.appendChild(ring);
    }
    const label = svgEl("text");
    label.setAttribute("class", "vertex-label");
    label.setAttribute("dy", "4");
    label.textContent = vv.label;
    g.appendChild(label);
    if (vv.pieceI || vv.pieceII) {
      const badge = svgEl("text");
      badge.setAttribute("class", "piece-badge");
      badge.setAttribute("dy", "-18");
      badge.textContent = vv.pieceI && vv.pieceII ? "I+II" : vv.pieceI ? "I" : "II";
      g.appendChild(badge);
    }
    // hover what-if value, straight from /analysis
    if (overlay && vv.clickable) {
      const hover = svgEl("text");
      hover.setAttribute("class", "hover-value");
      hover.setAttribute("dy", "30");
      hover.textContent = overlay.note !== null
        ? ANALYSIS_UNAVAILABLE
        : overlay.valuesByTarget.get(vv.id) ?? "";
      g.appendChild(hover);
    }
    g.addEventListener("click", () => onVertexClick(vv.id));
    svg.appendChild(g);
  }
}

export function boot() {
  wireSetup();
  void loadCatalog();
}

if (typeof document !== "undefined" && document.getElementById("board")) {
  boot();
}
