import { ApiClient, b64ToBytes, type Pair, type PreviewPayload } from "./api.js";
import { PairStore, type ArrowHit } from "./arrows.js";
import { buildCaseZip } from "./caseExport.js";
import { MaskLayer, type Point } from "./maskLayer.js";
import { drawArrow, gridOverlay, maskTint } from "./overlay.js";
import { Debouncer, SingleFlight } from "./scheduler.js";

type Tool = "brush" | "eraser" | "arrow";

const MASK_DEBOUNCE_MS = 50;

interface Elements {
  file: HTMLInputElement;
  canvas: HTMLCanvasElement;
  tools: Record<Tool, HTMLButtonElement>;
  brushRadius: HTMLInputElement;
  refineR1: HTMLInputElement;
  refineBtn: HTMLButtonElement;
  backendSelect: HTMLSelectElement;
  inpaintBtn: HTMLButtonElement;
  commitBtn: HTMLButtonElement;
  exportBtn: HTMLButtonElement;
  clearMaskBtn: HTMLButtonElement;
  clearArrowsBtn: HTMLButtonElement;
  status: HTMLElement;
  round: HTMLElement;
  timing: HTMLElement;
  overlayToggles: { mask: HTMLInputElement; grid: HTMLInputElement; arrows: HTMLInputElement };
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function decodePng(bytes: Uint8Array): Promise<ImageBitmap> {
  return createImageBitmap(new Blob([bytes as BufferSource], { type: "image/png" }));
}

function bitmapToImageData(bitmap: ImageBitmap): ImageData {
  const scratch = document.createElement("canvas");
  scratch.width = bitmap.width;
  scratch.height = bitmap.height;
  const ctx = scratch.getContext("2d");
  if (!ctx) throw new Error("no 2d context");
  ctx.drawImage(bitmap, 0, 0);
  return ctx.getImageData(0, 0, bitmap.width, bitmap.height);
}

class App {
  private api = new ApiClient("");
  private sessionId: string | null = null;
  private width = 0;
  private height = 0;
  private baseBitmap: ImageBitmap | null = null;
  private previewBitmap: ImageBitmap | null = null;
  private inpaintMaskBits: Uint8Array | null = null;
  private mask!: MaskLayer;
  private lastUploadedMaskPng: Uint8Array | null = null;
  private pairs = new PairStore();
  private rejected: Pair[] = [];
  private tool: Tool = "brush";
  private stroke: Point[] | null = null;
  private draggingArrow: ArrowHit | null = null;
  private pendingEdit = false;
  private round = 0;

  private previewLoop = new SingleFlight<PreviewPayload>(
    () => this.fetchPreview(),
    (payload) => void this.applyPreview(payload),
    (err) => this.setStatus(`preview failed: ${String(err)}`, true),
  );
  private maskSync = new Debouncer(MASK_DEBOUNCE_MS, () => void this.pushMask());

  constructor(private readonly ui: Elements) {
    ui.file.addEventListener("change", () => void this.onFile());
    for (const [name, btn] of Object.entries(ui.tools)) {
      btn.addEventListener("click", () => this.setTool(name as Tool));
    }
    ui.refineBtn.addEventListener("click", () => void this.onRefine());
    ui.inpaintBtn.addEventListener("click", () => void this.onInpaint());
    ui.commitBtn.addEventListener("click", () => void this.onCommit());
    ui.exportBtn.addEventListener("click", () => void this.onExport());
    ui.clearMaskBtn.addEventListener("click", () => {
      this.mask?.clear();
      this.afterMaskEdit();
    });
    ui.clearArrowsBtn.addEventListener("click", () => {
      this.pairs.clear();
      void this.pushPoints();
      this.redraw();
    });
    for (const toggle of Object.values(ui.overlayToggles)) {
      toggle.addEventListener("change", () => this.redraw());
    }
    const canvas = ui.canvas;
    canvas.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    canvas.addEventListener("pointermove", (e) => this.onPointerMove(e));
    canvas.addEventListener("pointerup", (e) => this.onPointerUp(e));
    canvas.addEventListener("pointerleave", (e) => this.onPointerUp(e));
    void this.loadBackends();
    this.setTool("brush");
  }

  private setStatus(text: string, isError = false): void {
    this.ui.status.textContent = text;
    this.ui.status.classList.toggle("error", isError);
  }

  private setTool(tool: Tool): void {
    this.tool = tool;
    for (const [name, btn] of Object.entries(this.ui.tools)) {
      btn.classList.toggle("active", name === tool);
    }
  }

  private canvasPoint(e: PointerEvent): Point {
    const rect = this.ui.canvas.getBoundingClientRect();
    return {
      x: ((e.clientX - rect.left) / rect.width) * this.width,
      y: ((e.clientY - rect.top) / rect.height) * this.height,
    };
  }

  private async loadBackends(): Promise<void> {
    try {
      const backends = await this.api.backends();
      this.ui.backendSelect.innerHTML = "";
      for (const b of backends) {
        const opt = document.createElement("option");
        opt.value = b.name;
        opt.textContent = `${b.name} (${b.kind})`;
        this.ui.backendSelect.appendChild(opt);
      }
    } catch (err) {
      this.setStatus(`could not list backends: ${String(err)}`, true);
    }
  }

  private async onFile(): Promise<void> {
    const file = this.ui.file.files?.[0];
    if (!file) return;
    try {
      const bytes = new Uint8Array(await file.arrayBuffer());
      const info = await this.api.createSession(bytes);
      this.sessionId = info.id;
      this.width = info.width;
      this.height = info.height;
      const serverImage = await this.api.baseImage(info.id);
      this.baseBitmap = await decodePng(serverImage);
      this.mask = new MaskLayer(this.width, this.height);
      this.lastUploadedMaskPng = null;
      this.pairs.clear();
      this.rejected = [];
      this.previewBitmap = null;
      this.inpaintMaskBits = null;
      this.pendingEdit = false;
      this.round = 0;
      this.ui.canvas.width = this.width;
      this.ui.canvas.height = this.height;
      this.ui.round.textContent = "round 0";
      this.setStatus(`session ready (${this.width}x${this.height})`);
      this.redraw();
    } catch (err) {
      this.setStatus(`upload failed: ${String(err)}`, true);
    }
  }

  private onPointerDown(e: PointerEvent): void {
    if (!this.sessionId) return;
    this.ui.canvas.setPointerCapture(e.pointerId);
    const p = this.canvasPoint(e);
    if (this.tool === "arrow") {
      const hit = this.pairs.hitTest([p.x, p.y], 8);
      if (hit) {
        this.draggingArrow = hit;
      } else {
        const index = this.pairs.add([p.x, p.y], [p.x, p.y]);
        this.draggingArrow = { index, endpoint: "target" };
      }
      this.redraw();
      return;
    }
    this.stroke = [p];
    this.mask.stampDisc(p.x, p.y, this.brushRadius(), this.tool === "brush");
    this.afterMaskEdit();
  }

  private onPointerMove(e: PointerEvent): void {
    if (!this.sessionId) return;
    const p = this.canvasPoint(e);
    if (this.draggingArrow) {
      this.pairs.updateEndpoint(this.draggingArrow.index, this.draggingArrow.endpoint, [p.x, p.y]);
      this.redraw();
      return;
    }
    if (this.stroke) {
      const last = this.stroke[this.stroke.length - 1];
      this.mask.stampPath([last, p], this.brushRadius(), this.tool === "brush");
      this.stroke.push(p);
      this.afterMaskEdit();
    }
  }

  private onPointerUp(e: PointerEvent): void {
    if (this.draggingArrow) {
      this.draggingArrow = null;
      void this.pushPoints(); // arrows sync immediately
    }
    if (this.stroke) {
      this.stroke = null;
      this.maskSync.flush();
    }
  }

  private brushRadius(): number {
    return Number(this.ui.brushRadius.value);
  }

  private afterMaskEdit(): void {
    this.redraw();
    this.maskSync.schedule();
  }

  private async pushMask(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const png = this.mask.toPng();
      await this.api.setMask(this.sessionId, png);
      this.lastUploadedMaskPng = png;
      this.pendingEdit = false;
      this.previewLoop.request();
    } catch (err) {
      this.setStatus(`mask upload failed: ${String(err)}`, true);
    }
  }

  private async pushPoints(): Promise<void> {
    if (!this.sessionId) return;
    try {
      this.rejected = await this.api.setPoints(this.sessionId, this.pairs.pairs);
      this.pendingEdit = false;
      this.previewLoop.request();
      this.redraw();
    } catch (err) {
      this.setStatus(`points rejected: ${String(err)}`, true);
    }
  }

  private async fetchPreview(): Promise<PreviewPayload> {
    if (!this.sessionId) throw new Error("no session");
    return this.api.preview(this.sessionId);
  }

  private async applyPreview(payload: PreviewPayload): Promise<void> {
    this.previewBitmap = await decodePng(b64ToBytes(payload.warped));
    const maskData = bitmapToImageData(await decodePng(b64ToBytes(payload.inpaint_mask)));
    const bits = new Uint8Array(this.width * this.height);
    for (let i = 0; i < bits.length; i++) bits[i] = maskData.data[i * 4] > 127 ? 1 : 0;
    this.inpaintMaskBits = bits;
    this.rejected = payload.rejected_pairs;
    this.ui.timing.textContent = `warp ${payload.timing_ms.toFixed(1)} ms`;
    this.redraw();
  }

  private async onRefine(): Promise<void> {
    if (!this.sessionId) return;
    this.maskSync.flush();
    try {
      const r1 = Number(this.ui.refineR1.value);
      const { mask, warning } = await this.api.refine(this.sessionId, r1);
      const bitmap = await decodePng(mask);
      this.mask.loadFromRgba(bitmapToImageData(bitmap).data);
      this.lastUploadedMaskPng = this.mask.toPng();
      this.setStatus(warning ? `refine: ${warning}` : "mask refined", Boolean(warning));
      this.previewLoop.request();
      this.redraw();
    } catch (err) {
      this.setStatus(`refine failed: ${String(err)}`, true);
    }
  }

  private async onInpaint(): Promise<void> {
    if (!this.sessionId) return;
    try {
      this.setStatus("inpainting…");
      const result = await this.api.inpaint(this.sessionId, this.ui.backendSelect.value);
      this.previewBitmap = await decodePng(b64ToBytes(result.image));
      this.inpaintMaskBits = null;
      this.pendingEdit = true;
      this.setStatus(
        result.fallback
          ? `backend unavailable; used ${result.backend_used} instead`
          : `inpainted with ${result.backend_used}`,
        result.fallback,
      );
      this.redraw();
    } catch (err) {
      this.setStatus(`inpaint failed: ${String(err)}`, true);
    }
  }

  private async onCommit(): Promise<void> {
    if (!this.sessionId || !this.pendingEdit) {
      this.setStatus("nothing to commit; run inpaint first", true);
      return;
    }
    try {
      this.round = await this.api.commit(this.sessionId);
      const serverImage = await this.api.baseImage(this.sessionId);
      this.baseBitmap = await decodePng(serverImage);
      this.mask.clear();
      this.pairs.clear();
      this.rejected = [];
      this.previewBitmap = null;
      this.inpaintMaskBits = null;
      this.pendingEdit = false;
      this.lastUploadedMaskPng = null;
      this.ui.round.textContent = `round ${this.round}`;
      this.setStatus(`round ${this.round} committed; tools reset`);
      this.redraw();
    } catch (err) {
      this.setStatus(`commit failed: ${String(err)}`, true);
    }
  }

  private async onExport(): Promise<void> {
    if (!this.sessionId) return;
    this.maskSync.flush();
    try {
      const image = await this.api.baseImage(this.sessionId);
      const maskPng = this.lastUploadedMaskPng ?? this.mask.toPng();
      const zip = buildCaseZip("exported", image, maskPng, this.pairs.pairs);
      const url = URL.createObjectURL(new Blob([zip as BufferSource], { type: "application/zip" }));
      const a = document.createElement("a");
      a.href = url;
      a.download = "dragwarp_case.zip";
      a.click();
      URL.revokeObjectURL(url);
      this.setStatus("case exported");
    } catch (err) {
      this.setStatus(`export failed: ${String(err)}`, true);
    }
  }

  private redraw(): void {
    const ctx = this.ui.canvas.getContext("2d");
    if (!ctx || !this.baseBitmap) return;
    ctx.clearRect(0, 0, this.width, this.height);
    ctx.drawImage(this.previewBitmap ?? this.baseBitmap, 0, 0);
    if (this.ui.overlayToggles.mask.checked && this.mask && this.mask.count() > 0) {
      const tint = maskTint(this.mask.data, this.width, this.height);
      void this.blitOverlay(ctx, tint);
    }
    if (this.ui.overlayToggles.grid.checked && this.inpaintMaskBits) {
      const grid = gridOverlay(this.inpaintMaskBits, this.width, this.height);
      void this.blitOverlay(ctx, grid);
    }
    if (this.ui.overlayToggles.arrows.checked) {
      const rejectedKeys = new Set(this.rejected.map((p) => JSON.stringify(p.handle)));
      for (const pair of this.pairs.pairs) {
        drawArrow(ctx, pair, { rejected: rejectedKeys.has(JSON.stringify(pair.handle)) });
      }
    }
  }

  private async blitOverlay(ctx: CanvasRenderingContext2D, rgba: Uint8ClampedArray<ArrayBuffer>): Promise<void> {
    const bitmap = await createImageBitmap(new ImageData(rgba, this.width, this.height));
    ctx.drawImage(bitmap, 0, 0);
  }
}

export function boot(): void {
  const tools: Record<Tool, HTMLButtonElement> = {
    brush: el("tool-brush"),
    eraser: el("tool-eraser"),
    arrow: el("tool-arrow"),
  };
  new App({
    file: el("file"),
    canvas: el("canvas"),
    tools,
    brushRadius: el("brush-radius"),
    refineR1: el("refine-r1"),
    refineBtn: el("refine"),
    backendSelect: el("backend"),
    inpaintBtn: el("inpaint"),
    commitBtn: el("commit"),
    exportBtn: el("export"),
    clearMaskBtn: el("clear-mask"),
    clearArrowsBtn: el("clear-arrows"),
    status: el("status"),
    round: el("round"),
    timing: el("timing"),
    overlayToggles: {
      mask: el("toggle-mask"),
      grid: el("toggle-grid"),
      arrows: el("toggle-arrows"),
    },
  });
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  boot();
}
