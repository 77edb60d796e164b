/**
 * Round-trip tests against a live service plus the batch CLI, exercising
 * the same modules the browser UI uses (mask brush, pair store, API
 * client, case export). Skipped unless DRAGWARP_SERVICE_URL points at a
 * running service and the dragwarp CLI is on PATH; `npm run
 * test:integration` arranges both.
 */
import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ApiClient, b64ToBytes } from "../src/api.js";
import { PairStore } from "../src/arrows.js";
import { buildCaseZip, pointsJson } from "../src/caseExport.js";
import { MaskLayer } from "../src/maskLayer.js";
import { encodeRgbaPng } from "../src/png.js";
import { readZipEntries } from "./caseExport.test.js";

const serviceUrl = process.env.DRAGWARP_SERVICE_URL;

function cliAvailable(): boolean {
  try {
    execFileSync("dragwarp", ["--help"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

const enabled = Boolean(serviceUrl) && cliAvailable();

function testImagePng(width = 96, height = 72): Uint8Array {
  const rgba = new Uint8Array(width * height * 4);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = (y * width + x) * 4;
      rgba[i] = (x * 255 / (width - 1)) | 0;
      rgba[i + 1] = (y * 255 / (height - 1)) | 0;
      rgba[i + 2] = ((x ^ y) * 11) & 0xff;
      rgba[i + 3] = 255;
    }
  }
  return encodeRgbaPng(width, height, rgba);
}

function brushMask(width: number, height: number, cx: number, cy: number): MaskLayer {
  const layer = new MaskLayer(width, height);
  layer.stampPath(
    [
      { x: cx - 8, y: cy },
      { x: cx + 8, y: cy },
      { x: cx + 8, y: cy + 6 },
      { x: cx - 8, y: cy + 6 },
    ],
    7,
    true,
  );
  return layer;
}

function runCli(args: string[]): void {
  execFileSync("dragwarp", args, { stdio: "pipe" });
}

describe.skipIf(!enabled)("live service round trips", () => {
  it("UI-drawn case replays byte-identically through the CLI", { timeout: 60000 }, async () => {
    const api = new ApiClient(serviceUrl!);
    const imagePng = testImagePng();
    const info = await api.createSession(imagePng, 0);

    // Draw through the same brush code the UI uses, place one drag arrow.
    const mask = brushMask(info.width, info.height, 40, 30);
    const maskPng = mask.toPng();
    await api.setMask(info.id, maskPng);
    const pairs = new PairStore();
    pairs.add([40, 32], [70, 28]);
    const rejected = await api.setPoints(info.id, pairs.pairs);
    expect(rejected).toEqual([]);

    const preview = await api.preview(info.id);
    const previewPng = b64ToBytes(preview.warped);
    expect(preview.timing_ms).toBeGreaterThanOrEqual(0);

    // Export the case exactly as the UI's export button would.
    const serverImage = await api.baseImage(info.id);
    const zip = buildCaseZip("exported", serverImage, maskPng, pairs.pairs);
    const entries = readZipEntries(zip);

    const dir = mkdtempSync(join(tmpdir(), "dragwarp-case-"));
    for (const [name, data] of entries) writeFileSync(join(dir, name), data);
    runCli([
      "warp",
      "--image", join(dir, "exported_image.png"),
      "--mask", join(dir, "exported_mask.png"),
      "--points", join(dir, "exported_points.json"),
      "--out-dir", join(dir, "out"),
      "--resize", "0",
    ]);
    const cliWarped = readFileSync(join(dir, "out", "warped.png"));
    expect(Buffer.from(previewPng).equals(cliWarped)).toBe(true);
  });

  it("five scripted rounds end on the CLI pipeline's replay result", { timeout: 120000 }, async () => {
    const api = new ApiClient(serviceUrl!);
    const imagePng = testImagePng();
    const info = await api.createSession(imagePng, 0);

    const dir = mkdtempSync(join(tmpdir(), "dragwarp-rounds-"));
    let replayImage = join(dir, "round0.png");
    writeFileSync(replayImage, imagePng);

    for (let round = 0; round < 5; round++) {
      const cx = 20 + round * 12;
      const mask = brushMask(info.width, info.height, cx, 28);
      const pairs = new PairStore();
      pairs.add([cx, 30], [cx + 9, 38 + round]);

      await api.setMask(info.id, mask.toPng());
      await api.setPoints(info.id, pairs.pairs);
      const result = await api.inpaint(info.id, "harmonic");
      expect(result.fallback).toBe(false);
      const committed = await api.commit(info.id);
      expect(committed).toBe(round + 1);

      // CLI replay of the same round, feeding the edit forward.
      const maskPath = join(dir, `mask${round}.png`);
      const pointsPath = join(dir, `points${round}.json`);
      writeFileSync(maskPath, mask.toPng());
      writeFileSync(pointsPath, pointsJson(pairs.pairs));
      const outDir = join(dir, `out${round}`);
      runCli([
        "edit",
        "--image", replayImage,
        "--mask", maskPath,
        "--points", pointsPath,
        "--out-dir", outDir,
        "--resize", "0",
        "--backend", "harmonic",
      ]);
      replayImage = join(outDir, "edited.png");
    }

    const finalBase = await api.baseImage(info.id);
    const cliFinal = readFileSync(replayImage);
    expect(Buffer.from(finalBase).equals(cliFinal)).toBe(true);
  });
});

describe.skipIf(enabled)("live service round trips (environment gate)", () => {
  it.skip("requires DRAGWARP_SERVICE_URL and the dragwarp CLI", () => {});
});
