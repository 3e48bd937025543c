// Browser wiring for the operator console.  All state lives in
// ViewState; this file only moves it in and out of the DOM.

import { ApiError, ServiceClient } from "./api.js";
import { cssColor, tagColor } from "./legend.js";
import { parsePgm } from "./pgm.js";
import { startPolling } from "./poll.js";
import {
  drawPrediction,
  drawTracks,
  outlineZones,
  rasterFromFrame,
  type Raster,
} from "./render.js";
import { ViewState, type Notice } from "./state.js";
import { buildTreeView, formatNode, type TreeView } from "./tree.js";

const SCALE = 6;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
  className?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (className) node.className = className;
  return node;
}

function banner(holder: { notices: Notice[] }, container: HTMLElement): void {
  container.innerHTML = "";
  for (const notice of holder.notices.slice(-3)) {
    const div = el("div", notice.text, `notice ${notice.kind}`);
    container.appendChild(div);
  }
}

async function drawFromBytes(
  state: ViewState,
  bytes: Uint8Array,
  canvas: HTMLCanvasElement,
): Promise<void> {
  const frame = parsePgm(bytes);
  const raster = rasterFromFrame(frame, SCALE);
  const layers = await state.overlays();
  outlineZones(raster, layers.zones);
  drawTracks(raster, layers.tracks);
  if (layers.prediction) drawPrediction(raster, layers.prediction.states);
  blit(raster, canvas);
}

async function redrawFrame(state: ViewState, canvas: HTMLCanvasElement): Promise<void> {
  await drawFromBytes(state, await state.frame(), canvas);
}

function blit(raster: Raster, canvas: HTMLCanvasElement): void {
  canvas.width = raster.width;
  canvas.height = raster.height;
  const ctx = canvas.getContext("2d")!;
  ctx.putImageData(new ImageData(raster.data, raster.width, raster.height), 0, 0);
}

function renderHistory(state: ViewState, panel: HTMLElement): void {
  panel.innerHTML = "";
  panel.appendChild(el("h3", "corrections"));
  for (const entry of state.corrections) {
    const last = entry.path[entry.path.length - 1];
    const target = `(${last[0]},${last[1]} ${last[2]})`;
    const factor = entry.action === "boost" ? ` x${entry.factor}` : "";
    const noop = entry.noop ? " [no-op]" : "";
    panel.appendChild(el("div", `#${entry.serial} ${entry.action}${factor} ${target}${noop}`));
  }
}

function renderTree(
  state: ViewState,
  panel: HTMLElement,
  onCorrection: (nodeId: number, action: "prune" | "boost", factor: number) => void,
): void {
  panel.innerHTML = "";
  if (!state.tree) {
    panel.appendChild(el("p", "click a cell on the frame to expand a walk"));
    return;
  }
  const view: TreeView = buildTreeView(state.tree);
  panel.appendChild(
    el("p", `${state.tree.nodes.length} nodes, threshold ${state.tree.requested_threshold}, ${state.tree.mode} mode`),
  );
  for (let depth = 0; depth <= view.maxDepth; depth++) {
    const details = el("details") as HTMLDetailsElement;
    details.open = depth <= 2;
    const summary = el("summary", `depth ${depth} (${view.byDepth[depth].length})`);
    details.appendChild(summary);
    for (const node of view.byDepth[depth]) {
      const row = el("div", "", "tree-row");
      const label = el("span", formatNode(node));
      label.style.color = cssColor(tagColor(node.tag));
      row.appendChild(label);
      if (node.parent !== null) {
        const prune = el("button", "prune");
        prune.addEventListener("click", () => onCorrection(node.id, "prune", 0));
        const boost = el("button", "boost");
        boost.addEventListener("click", () => {
          const factor = parseFloat(
            (document.getElementById("boost-factor") as HTMLInputElement).value,
          );
          onCorrection(node.id, "boost", factor);
        });
        row.appendChild(prune);
        row.appendChild(boost);
      }
      details.appendChild(row);
    }
    panel.appendChild(details);
  }
}

export function boot(): void {
  const root = document.getElementById("app")!;
  const noticeBox = el("div", "", "notices");
  const controls = el("div", "", "controls");
  const canvas = el("canvas");
  const treePanel = el("div", "", "tree-panel");
  const historyPanel = el("div", "", "history-panel");

  const baseInput = el("input") as HTMLInputElement;
  baseInput.value = "http://127.0.0.1:8714";
  const openButton = el("button", "open session");
  const frameInput = el("input") as HTMLInputElement;
  frameInput.type = "number";
  frameInput.value = "0";
  const variantButton = el("button", "variant: regular");
  const modeSelect = el("select") as HTMLSelectElement;
  for (const mode of ["user", "system"]) {
    const option = el("option", mode) as HTMLOptionElement;
    option.value = mode;
    modeSelect.appendChild(option);
  }
  const depthInput = el("input") as HTMLInputElement;
  depthInput.type = "number";
  depthInput.value = "4";
  const thresholdInput = el("input") as HTMLInputElement;
  thresholdInput.value = "0.001";
  const boostInput = el("input") as HTMLInputElement;
  boostInput.id = "boost-factor";
  boostInput.value = "2";

  controls.append(
    baseInput, openButton,
    el("span", "frame"), frameInput, variantButton,
    el("span", "mode"), modeSelect,
    el("span", "depth"), depthInput,
    el("span", "threshold"), thresholdInput,
    el("span", "boost factor"), boostInput,
  );
  root.append(noticeBox, controls, canvas, treePanel, historyPanel);

  let state: ViewState | null = null;

  const refreshAll = async () => {
    if (!state) return;
    await redrawFrame(state, canvas);
    renderTree(state, treePanel, correct);
    renderHistory(state, historyPanel);
    banner(state, noticeBox);
  };

  const guard = (work: () => Promise<void>) => {
    work().catch((error) => {
      const text = error instanceof ApiError
        ? `${error.code}: ${error.detail}`
        : `service unreachable: ${error}`;
      if (state) state.notify("error", text);
      banner(state ?? { notices: [{ kind: "error", text }] }, noticeBox);
    });
  };

  const correct = (nodeId: number, action: "prune" | "boost", factor: number) => {
    guard(async () => {
      if (!state) return;
      await state.applyCorrection(nodeId, action, action === "boost" ? factor : 2.0);
      await refreshAll();
    });
  };

  openButton.addEventListener("click", () => {
    guard(async () => {
      const client = new ServiceClient(baseInput.value.replace(/\/$/, ""));
      state = new ViewState(client);
      await state.open();
      state.notify("info", `session ${state.sessionId}: ${state.frames} frames`);
      await refreshAll();
      startPolling(async () => {
        if (state) {
          await state.refresh();
          renderHistory(state, historyPanel);
        }
      });
    });
  });

  frameInput.addEventListener("change", () => {
    guard(async () => {
      if (!state) return;
      await state.setFrame(parseInt(frameInput.value, 10));
      await refreshAll();
    });
  });

  variantButton.addEventListener("click", () => {
    guard(async () => {
      if (!state) return;
      const bytes = await state.toggleVariant();
      variantButton.textContent = `variant: ${state.variant}`;
      await drawFromBytes(state, bytes, canvas);
    });
  });

  modeSelect.addEventListener("change", () => {
    if (state) state.walkMode = modeSelect.value as "user" | "system";
  });
  depthInput.addEventListener("change", () => {
    if (state) state.walkDepth = parseInt(depthInput.value, 10);
  });
  thresholdInput.addEventListener("change", () => {
    if (state) state.walkThreshold = parseFloat(thresholdInput.value);
  });

  canvas.addEventListener("click", (event) => {
    guard(async () => {
      if (!state) return;
      const bounds = canvas.getBoundingClientRect();
      const x = Math.floor((event.clientX - bounds.left) / SCALE);
      const y = Math.floor((event.clientY - bounds.top) / SCALE);
      await state.requestWalk(x, y);
      renderTree(state, treePanel, correct);
    });
  });
}

boot();
