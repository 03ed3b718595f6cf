/** path-studio: draw a path through the Mandelbrot parameter plane, watch
 * the Julia-set frames it would produce, and submit the mesh job. */

import { ApiClient, ApiError } from "./api.js";
import { formatC, formatEndpoints } from "./format.js";
import { DebouncedRunner } from "./debounce.js";
import { JobTracker, type JobView } from "./jobs.js";
import { TileLoader, tileViewport } from "./mandelview.js";
import { EditablePath } from "./path.js";
import { FLOWER_PRESET } from "./presets.js";
import { stackSilhouette, type MaskLike } from "./silhouette.js";
import { loadEditorState, saveEditorState } from "./storage.js";
import type { JobConfigJson, PathKind, PreviewFrame } from "./types.js";
import { Viewport } from "./viewport.js";

const api = new ApiClient("");
const viewport = new Viewport();
const path = new EditablePath();

let frameCount = 41;
let level = 128;
let resolution = 256;
let lastPreview: PreviewFrame[] = [];

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("plane");
const ctx = canvas.getContext("2d")!;
const backdrop = document.createElement("canvas");
const backdropCtx = backdrop.getContext("2d")!;
const strip = $<HTMLDivElement>("preview-strip");
const silhouetteCanvas = $<HTMLCanvasElement>("silhouette");
const banner = $<HTMLDivElement>("banner");
const previewError = $<HTMLDivElement>("preview-error");
const jobsPanel = $<HTMLDivElement>("jobs");

viewport.widthPx = canvas.width;
viewport.heightPx = canvas.height;
backdrop.width = canvas.width;
backdrop.height = canvas.height;

// ------------------------------------------------------------ banner

let bannerTimer: number | null = null;
function showBanner(text: string): void {
  banner.textContent = text;
  banner.style.display = "block";
  if (bannerTimer !== null) clearTimeout(bannerTimer);
  bannerTimer = window.setTimeout(() => (banner.style.display = "none"), 5000);
}

// ------------------------------------------------------------ backdrop

const tiles = new TileLoader(api, 6);
let tileGeneration = 0;

function refreshBackdrop(): void {
  const generation = ++tileGeneration;
  const ts = tileViewport(viewport.window, backdrop.width, backdrop.height);
  void tiles.loadAll(
    ts,
    (tile, blob) => {
      if (generation !== tileGeneration) return; // viewport moved on
      void createImageBitmap(blob).then((bmp) => {
        if (generation !== tileGeneration) return;
        backdropCtx.drawImage(bmp, tile.dest.x, tile.dest.y, tile.dest.w, tile.dest.h);
        redraw();
      });
    },
    () => showBanner("server unreachable; showing stale tiles"),
  );
}

// ------------------------------------------------------------ drawing

function redraw(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(backdrop, 0, 0);

  // sampled path positions as the server reported them
  ctx.strokeStyle = "#ff9500";
  ctx.fillStyle = "#ff9500";
  ctx.lineWidth = 1.5;
  if (lastPreview.length) {
    ctx.beginPath();
    lastPreview.forEach((f, i) => {
      const p = viewport.toPixel({ re: f.c_re, im: f.c_im });
      if (i === 0) ctx.moveTo(p.x, p.y);
      else ctx.lineTo(p.x, p.y);
    });
    ctx.stroke();
  }
  if (path.mode === "polyline") {
    ctx.strokeStyle = "#00c2ff";
    ctx.beginPath();
    path.points.forEach((c, i) => {
      const p = viewport.toPixel(c);
      if (i === 0) ctx.moveTo(p.x, p.y);
      else ctx.lineTo(p.x, p.y);
    });
    ctx.stroke();
    for (const c of path.points) {
      const p = viewport.toPixel(c);
      ctx.beginPath();
      ctx.arc(p.x, p.y, 5, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

// ------------------------------------------------------------ preview

function maskFromImage(img: HTMLImageElement): MaskLike {
  const c = document.createElement("canvas");
  c.width = img.naturalWidth;
  c.height = img.naturalHeight;
  const cx = c.getContext("2d")!;
  cx.drawImage(img, 0, 0);
  const data = cx.getImageData(0, 0, c.width, c.height);
  return { width: data.width, height: data.height, data: data.data };
}

function renderSilhouette(masks: MaskLike[]): void {
  const sctx = silhouetteCanvas.getContext("2d")!;
  sctx.clearRect(0, 0, silhouetteCanvas.width, silhouetteCanvas.height);
  sctx.fillStyle = "#d0d0d0";
  const slabs = stackSilhouette(masks, level);
  const slabH = silhouetteCanvas.height / Math.max(slabs.length, 1);
  const scale = masks.length ? silhouetteCanvas.width / masks[0].width : 1;
  slabs.forEach((slab, i) => {
    if (!slab.span) return;
    const [x0, x1] = slab.span;
    const y = silhouetteCanvas.height - (i + 1) * slabH; // frame 0 at the bottom
    sctx.fillRect(x0 * scale, y, Math.max((x1 - x0 + 1) * scale, 1), slabH + 0.5);
  });
}

function renderStrip(frames: PreviewFrame[]): void {
  strip.replaceChildren();
  const masks: MaskLike[] = [];
  let decoded = 0;
  frames.forEach((f) => {
    const cell = document.createElement("figure");
    cell.className = "frame";
    const img = new Image();
    img.src = `data:image/png;base64,${f.png_base64}`;
    img.addEventListener("load", () => {
      masks[frames.indexOf(f)] = maskFromImage(img);
      if (++decoded === frames.length) renderSilhouette(masks);
    });
    const caption = document.createElement("figcaption");
    caption.textContent = formatC(f.c_re, f.c_im);
    cell.append(img, caption);
    strip.append(cell);
  });
  $("endpoint-labels").textContent = formatEndpoints(frames);
}

const previewRunner = new DebouncedRunner<void>(async () => {
  if (!path.isValid()) {
    previewError.textContent = path.validationMessage() ?? "";
    return;
  }
  previewError.textContent = "";
  try {
    const res = await api.previewPath(path.toPathSpec(), path.sampleCount, {
      resolution: 128,
      max_iter: 200,
    });
    lastPreview = res.frames;
    renderStrip(res.frames);
    redraw();
  } catch (err) {
    if (err instanceof ApiError) previewError.textContent = err.message;
    else showBanner("preview failed; server unreachable?");
  }
}, 300);

function edited(): void {
  saveEditorState(
    { path: path.state(), frameCount, level, resolution },
    window.localStorage,
  );
  redraw();
  previewRunner.schedule(undefined);
}

// ------------------------------------------------------------ input

let dragIndex = -1;
let panning = false;
let lastMouse = { x: 0, y: 0 };
let mouseMoved = false;

canvas.addEventListener("mousedown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const x = ev.clientX - rect.left;
  const y = ev.clientY - rect.top;
  lastMouse = { x, y };
  mouseMoved = false;
  const c = viewport.toComplex(x, y);
  const hitRadius = (8 / canvas.width) * (viewport.xMax - viewport.xMin);
  dragIndex = path.mode === "polyline" ? path.hitTest(c, hitRadius) : -1;
  panning = dragIndex < 0;
});

canvas.addEventListener("mousemove", (ev) => {
  if (dragIndex < 0 && !panning) return;
  const rect = canvas.getBoundingClientRect();
  const x = ev.clientX - rect.left;
  const y = ev.clientY - rect.top;
  const dx = x - lastMouse.x;
  const dy = y - lastMouse.y;
  if (Math.abs(dx) + Math.abs(dy) > 2) mouseMoved = true;
  if (!ev.buttons) return;
  if (dragIndex >= 0) {
    const c = viewport.toComplex(x, y);
    path.movePoint(dragIndex, c);
    viewport.ensureVisible(c); // auto-pan when dragging beyond the edge
    lastMouse = { x, y };
    edited();
    refreshBackdrop();
  } else if (mouseMoved) {
    viewport.panByPixels(dx, dy);
    lastMouse = { x, y };
    redraw();
  }
});

canvas.addEventListener("mouseup", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const x = ev.clientX - rect.left;
  const y = ev.clientY - rect.top;
  if (panning && mouseMoved) {
    refreshBackdrop();
  } else if (dragIndex < 0 && path.mode === "polyline" && !mouseMoved) {
    path.addPoint(viewport.toComplex(x, y));
    edited();
  }
  dragIndex = -1;
  panning = false;
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const rect = canvas.getBoundingClientRect();
  viewport.zoomAt(ev.clientX - rect.left, ev.clientY - rect.top, ev.deltaY < 0 ? 2 : 0.5);
  redraw();
  refreshBackdrop();
});

// ------------------------------------------------------------ controls

const modeSelect = $<HTMLSelectElement>("mode");
const trimInput = $<HTMLInputElement>("trim");
const samplesInput = $<HTMLInputElement>("samples");
const framesInput = $<HTMLInputElement>("frames");
const levelInput = $<HTMLInputElement>("level");
const resolutionSelect = $<HTMLSelectElement>("resolution");

modeSelect.addEventListener("change", () => {
  path.setMode(modeSelect.value as PathKind);
  $("polyline-help").style.display = path.mode === "polyline" ? "block" : "none";
  $("trim-row").style.display = path.mode === "polyline" ? "none" : "flex";
  edited();
});

trimInput.addEventListener("input", () => {
  path.trimEpsilon = Number(trimInput.value);
  edited();
});
samplesInput.addEventListener("input", () => {
  path.sampleCount = Math.min(Math.max(Number(samplesInput.value), 2), 64);
  edited();
});
framesInput.addEventListener("input", () => {
  frameCount = Math.max(Number(framesInput.value), 2);
  edited();
});
levelInput.addEventListener("input", () => {
  level = Math.min(Math.max(Number(levelInput.value), 0), 255);
  edited();
});
resolutionSelect.addEventListener("change", () => {
  resolution = Number(resolutionSelect.value);
  edited();
});

$("clear").addEventListener("click", () => {
  path.points = [];
  lastPreview = [];
  strip.replaceChildren();
  edited();
});

$("export").addEventListener("click", () => {
  if (!path.isValid()) {
    previewError.textContent = path.validationMessage() ?? "";
    return;
  }
  const blob = new Blob([JSON.stringify(path.toPathSpec(), null, 2)], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "path.json";
  a.click();
  URL.revokeObjectURL(a.href);
});

// ------------------------------------------------------------ jobs

function jobConfig(): JobConfigJson {
  const spec = path.toPathSpec();
  return {
    family: "julia-path",
    param: { t_min: spec.t_min, t_max: spec.t_max, frames: frameCount },
    path: spec,
    raster: { resolution, supersample: 4 },
    mesh: { level, step: 1 },
    output: { basename: "path-studio" },
  };
}

const tracker = new JobTracker(api, (view) => renderJob(view));
const jobRows = new Map<string, HTMLDivElement>();

function renderJob(view: JobView): void {
  let row = jobRows.get(view.jobId);
  if (!row) {
    row = document.createElement("div");
    row.className = "job";
    jobRows.set(view.jobId, row);
    jobsPanel.prepend(row);
  }
  const pct = Math.round(view.progress * 100);
  row.replaceChildren();
  const label = document.createElement("span");
  label.textContent = `job ${view.jobId}: ${view.status} (${pct}%)`;
  row.append(label);
  if (view.status === "failed" && view.error) {
    const detail = document.createElement("span");
    detail.className = "error";
    detail.textContent = ` ${view.error}`;
    row.append(detail);
  }
  if (view.status === "done" && view.stlUrl) {
    const a = document.createElement("a");
    a.href = view.stlUrl;
    a.textContent = " download model.stl";
    a.download = "model.stl";
    row.append(a);
  }
}

$("submit").addEventListener("click", () => {
  if (!path.isValid()) {
    previewError.textContent = path.validationMessage() ?? "";
    return;
  }
  void tracker.submit(jobConfig()).catch((err) => {
    previewError.textContent = err instanceof Error ? err.message : String(err);
  });
});

$("submit-flower").addEventListener("click", () => {
  void tracker.submit(FLOWER_PRESET).catch((err) => showBanner(String(err)));
});

// ------------------------------------------------------------ startup

const restored = loadEditorState(window.localStorage);
if (restored) {
  const p = EditablePath.fromState(restored.path);
  path.mode = p.mode;
  path.points = p.points;
  path.trimEpsilon = p.trimEpsilon;
  path.sampleCount = p.sampleCount;
  frameCount = restored.frameCount;
  level = restored.level;
  resolution = restored.resolution;
  modeSelect.value = path.mode;
  trimInput.value = String(path.trimEpsilon);
  samplesInput.value = String(path.sampleCount);
  framesInput.value = String(frameCount);
  levelInput.value = String(level);
  resolutionSelect.value = String(resolution);
}
$("polyline-help").style.display = path.mode === "polyline" ? "block" : "none";
$("trim-row").style.display = path.mode === "polyline" ? "none" : "flex";

refreshBackdrop();
redraw();
if (path.isValid()) previewRunner.schedule(undefined);
