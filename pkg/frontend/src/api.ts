export interface Pair {
  handle: [number, number];
  target: [number, number];
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
}

export interface PreviewPayload {
  warped: string; // base64 PNG
  inpaint_mask: string; // base64 PNG
  rejected_pairs: Pair[];
  timing_ms: number;
}

export interface InpaintPayload {
  image: string; // base64 PNG
  backend_used: string;
  fallback: boolean;
}

export interface BackendInfo {
  name: string;
  kind: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the editing session HTTP API. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async call(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return resp;
  }

  async createSession(png: Uint8Array | Blob, resizeLongEdge?: number): Promise<SessionInfo> {
    const query = resizeLongEdge === undefined ? "" : `?resize_long_edge=${resizeLongEdge}`;
    const resp = await this.call(`/sessions${query}`, {
      method: "POST",
      headers: { "content-type": "image/png" },
      body: png instanceof Blob ? png : new Blob([png as BufferSource]),
    });
    return (await resp.json()) as SessionInfo;
  }

  async baseImage(id: string): Promise<Uint8Array> {
    const resp = await this.call(`/sessions/${id}/image`);
    return new Uint8Array(await resp.arrayBuffer());
  }

  async setMask(id: string, png: Uint8Array): Promise<void> {
    await this.call(`/sessions/${id}/mask`, {
      method: "PUT",
      headers: { "content-type": "image/png" },
      body: new Blob([png as BufferSource]),
    });
  }

  async setPoints(id: string, pairs: Pair[]): Promise<Pair[]> {
    const resp = await this.call(`/sessions/${id}/points`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pairs }),
    });
    const body = (await resp.json()) as { rejected: Pair[] };
    return body.rejected;
  }

  async refine(id: string, r1?: number): Promise<{ mask: Uint8Array; warning: string | null }> {
    const resp = await this.call(`/sessions/${id}/refine`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(r1 === undefined ? {} : { r1 }),
    });
    return {
      mask: new Uint8Array(await resp.arrayBuffer()),
      warning: resp.headers.get("X-Refine-Warning"),
    };
  }

  async preview(id: string): Promise<PreviewPayload> {
    const resp = await this.call(`/sessions/${id}/preview`);
    return (await resp.json()) as PreviewPayload;
  }

  async inpaint(id: string, backend?: string): Promise<InpaintPayload> {
    const resp = await this.call(`/sessions/${id}/inpaint`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(backend ? { backend } : {}),
    });
    return (await resp.json()) as InpaintPayload;
  }

  async commit(id: string): Promise<number> {
    const resp = await this.call(`/sessions/${id}/commit`, { method: "POST" });
    const body = (await resp.json()) as { round: number };
    return body.round;
  }

  async backends(): Promise<BackendInfo[]> {
    const resp = await this.call("/backends");
    return (await resp.json()) as BackendInfo[];
  }
}

export function b64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  return new Uint8Array(Buffer.from(b64, "base64"));
}
