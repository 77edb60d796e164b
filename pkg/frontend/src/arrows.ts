import type { Pair } from "./api.js";

export type Endpoint = "handle" | "target";

export interface ArrowHit {
  index: number;
  endpoint: Endpoint;
}

/** The drag gestures being edited, with endpoint hit-testing. */
export class PairStore {
  private items: Pair[] = [];

  get pairs(): Pair[] {
    return this.items.map((p) => ({
      handle: [...p.handle] as [number, number],
      target: [...p.target] as [number, number],
    }));
  }

  get length(): number {
    return this.items.length;
  }

  add(handle: [number, number], target: [number, number]): number {
    this.items.push({ handle: [...handle], target: [...target] });
    return this.items.length - 1;
  }

  updateEndpoint(index: number, endpoint: Endpoint, point: [number, number]): void {
    const pair = this.items[index];
    if (!pair) throw new Error(`no pair at index ${index}`);
    pair[endpoint] = [...point];
  }

  remove(index: number): void {
    if (index < 0 || index >= this.items.length) throw new Error(`no pair at index ${index}`);
    this.items.splice(index, 1);
  }

  clear(): void {
    this.items = [];
  }

  /** Nearest endpoint within tolerance; handles win ties over targets,
   * later arrows win over earlier ones (they render on top). */
  hitTest(point: [number, number], tolerance: number): ArrowHit | null {
    let best: ArrowHit | null = null;
    let bestDist = tolerance;
    for (let i = 0; i < this.items.length; i++) {
      for (const endpoint of ["target", "handle"] as const) {
        const [x, y] = this.items[i][endpoint];
        const d = Math.hypot(x - point[0], y - point[1]);
        if (d <= bestDist) {
          bestDist = d;
          best = { index: i, endpoint };
        }
      }
    }
    return best;
  }
}
