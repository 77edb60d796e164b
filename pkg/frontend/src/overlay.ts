import type { Pair } from "./api.js";

/**
 * Pure pixel helpers for the canvas overlays; the DOM glue in main.ts just
 * blits their output.
 */

/** Red tint over the deformable region (straight alpha RGBA out). */
export function maskTint(
  mask: Uint8Array,
  width: number,
  height: number,
  rgba: [number, number, number, number] = [255, 40, 40, 90],
): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(width * height * 4);
  for (let i = 0; i < mask.length; i++) {
    if (mask[i]) {
      out[i * 4] = rgba[0];
      out[i * 4 + 1] = rgba[1];
      out[i * 4 + 2] = rgba[2];
      out[i * 4 + 3] = rgba[3];
    }
  }
  return out;
}

/** Grid hatch over the pixels the inpainting backend will synthesize,
 * mirroring the preview convention of the editing tool. */
export function gridOverlay(
  inpaintMask: Uint8Array,
  width: number,
  height: number,
  cell = 8,
  rgba: [number, number, number, number] = [30, 30, 30, 150],
): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(width * height * 4);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = y * width + x;
      if (!inpaintMask[i]) continue;
      if (x % cell === 0 || y % cell === 0) {
        out[i * 4] = rgba[0];
        out[i * 4 + 1] = rgba[1];
        out[i * 4 + 2] = rgba[2];
        out[i * 4 + 3] = rgba[3];
      } else {
        out[i * 4 + 3] = 40; // light veil so the area reads as "to generate"
      }
    }
  }
  return out;
}

export interface ArrowStyle {
  rejected: boolean;
}

/** Draw one drag arrow: red handle dot, blue target dot, connecting line
 * with an arrowhead; rejected pairs render dashed. */
export function drawArrow(
  ctx: CanvasRenderingContext2D,
  pair: Pair,
  style: ArrowStyle = { rejected: false },
): void {
  const [hx, hy] = pair.handle;
  const [tx, ty] = pair.target;
  ctx.save();
  ctx.lineWidth = 2;
  ctx.strokeStyle = style.rejected ? "rgba(120,120,120,0.9)" : "rgba(255,255,255,0.9)";
  if (style.rejected) ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(hx, hy);
  ctx.lineTo(tx, ty);
  ctx.stroke();
  const angle = Math.atan2(ty - hy, tx - hx);
  ctx.beginPath();
  ctx.moveTo(tx, ty);
  ctx.lineTo(tx - 8 * Math.cos(angle - 0.4), ty - 8 * Math.sin(angle - 0.4));
  ctx.lineTo(tx - 8 * Math.cos(angle + 0.4), ty - 8 * Math.sin(angle + 0.4));
  ctx.closePath();
  ctx.fillStyle = style.rejected ? "rgba(120,120,120,0.9)" : "#4477ff";
  ctx.fill();
  ctx.setLineDash([]);
  ctx.fillStyle = "#ff3333";
  ctx.beginPath();
  ctx.arc(hx, hy, 4, 0, Math.PI * 2);
  ctx.fill();
  ctx.fillStyle = "#4477ff";
  ctx.beginPath();
  ctx.arc(tx, ty, 4, 0, Math.PI * 2);
  ctx.fill();
  ctx.restore();
}
