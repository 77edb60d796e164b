import { encodeGrayPng } from "./png.js";

export interface Point {
  x: number;
  y: number;
}

/**
 * Client-side mask raster the brush paints into.
 *
 * Bits use the same disc stamp the engine's morphology uses (integer
 * offsets with i^2 + j^2 <= r^2), so a brushed region matches what the
 * server operates on after the PNG round trip.
 */
export class MaskLayer {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number) {
    if (width < 1 || height < 1) throw new Error("mask must be at least 1x1");
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height);
  }

  get(x: number, y: number): boolean {
    return this.data[y * this.width + x] !== 0;
  }

  count(): number {
    let n = 0;
    for (const v of this.data) n += v;
    return n;
  }

  clear(): void {
    this.data.fill(0);
  }

  stampDisc(cx: number, cy: number, radius: number, value: boolean): void {
    const v = value ? 1 : 0;
    const icx = Math.round(cx);
    const icy = Math.round(cy);
    const r = Math.floor(radius);
    const r2 = radius * radius;
    for (let dy = -r; dy <= r; dy++) {
      const y = icy + dy;
      if (y < 0 || y >= this.height) continue;
      for (let dx = -r; dx <= r; dx++) {
        const x = icx + dx;
        if (x < 0 || x >= this.width) continue;
        if (dx * dx + dy * dy <= r2) this.data[y * this.width + x] = v;
      }
    }
  }

  /** Stamp discs along a polyline at sub-pixel spacing so fast strokes
   * leave no scalloped gaps. */
  stampPath(path: Point[], radius: number, value: boolean): void {
    if (path.length === 0) return;
    this.stampDisc(path[0].x, path[0].y, radius, value);
    for (let i = 1; i < path.length; i++) {
      const a = path[i - 1];
      const b = path[i];
      const steps = Math.max(1, Math.ceil(Math.hypot(b.x - a.x, b.y - a.y)));
      for (let s = 1; s <= steps; s++) {
        const t = s / steps;
        this.stampDisc(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), radius, value);
      }
    }
  }

  /** Load from a decoded RGBA buffer (alpha/first channel > 127 = inside). */
  loadFromRgba(rgba: Uint8ClampedArray | Uint8Array): void {
    if (rgba.length !== this.width * this.height * 4) {
      throw new Error("rgba buffer does not match mask dimensions");
    }
    for (let i = 0; i < this.data.length; i++) {
      this.data[i] = rgba[i * 4] > 127 ? 1 : 0;
    }
  }

  /** Deterministic single-channel PNG (255 = inside). */
  toPng(): Uint8Array {
    const gray = new Uint8Array(this.data.length);
    for (let i = 0; i < gray.length; i++) gray[i] = this.data[i] ? 255 : 0;
    return encodeGrayPng(this.width, this.height, gray);
  }
}
