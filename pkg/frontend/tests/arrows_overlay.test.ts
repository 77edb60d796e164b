import { describe, expect, it } from "vitest";
import { PairStore } from "../src/arrows.js";
import { gridOverlay, maskTint } from "../src/overlay.js";

describe("PairStore", () => {
  it("adds and edits exactly one pair", () => {
    const store = new PairStore();
    const idx = store.add([5, 5], [5, 5]);
    store.add([20, 20], [30, 20]);
    store.updateEndpoint(idx, "target", [9, 5]);
    expect(store.pairs[0]).toEqual({ handle: [5, 5], target: [9, 5] });
    expect(store.pairs[1]).toEqual({ handle: [20, 20], target: [30, 20] });
  });

  it("hit-tests endpoints with tolerance, later arrows on top", () => {
    const store = new PairStore();
    store.add([10, 10], [40, 10]);
    store.add([10, 10], [40, 40]); // same handle, drawn later
    expect(store.hitTest([11, 10], 5)).toEqual({ index: 1, endpoint: "handle" });
    expect(store.hitTest([40, 39], 5)).toEqual({ index: 1, endpoint: "target" });
    expect(store.hitTest([200, 200], 5)).toBeNull();
  });

  it("returned pairs are copies, not live references", () => {
    const store = new PairStore();
    store.add([1, 2], [3, 4]);
    const snapshot = store.pairs;
    snapshot[0].handle[0] = 99;
    expect(store.pairs[0].handle[0]).toBe(1);
  });

  it("remove validates the index", () => {
    const store = new PairStore();
    store.add([1, 1], [2, 2]);
    store.remove(0);
    expect(store.length).toBe(0);
    expect(() => store.remove(0)).toThrow();
  });
});

describe("overlays", () => {
  it("maskTint colors exactly the masked pixels", () => {
    const mask = new Uint8Array(4 * 3);
    mask[5] = 1;
    const rgba = maskTint(mask, 4, 3);
    expect(rgba[5 * 4 + 3]).toBeGreaterThan(0);
    expect(rgba[0 * 4 + 3]).toBe(0);
  });

  it("gridOverlay hatches grid lines inside the inpaint mask only", () => {
    const w = 20;
    const h = 20;
    const mask = new Uint8Array(w * h).fill(1);
    const rgba = gridOverlay(mask, w, h, 8);
    const alphaAt = (x: number, y: number) => rgba[(y * w + x) * 4 + 3];
    expect(alphaAt(8, 3)).toBe(150); // on a grid column
    expect(alphaAt(3, 8)).toBe(150); // on a grid row
    expect(alphaAt(3, 3)).toBe(40); // interior veil
    const empty = gridOverlay(new Uint8Array(w * h), w, h, 8);
    expect(empty.every((v) => v === 0)).toBe(true);
  });
});
