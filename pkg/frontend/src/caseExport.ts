import type { Pair } from "./api.js";
import { crc32 } from "./png.js";

/**
 * Export the current session as a batch-CLI case: image.png (server bytes,
 * verbatim), mask.png (the exact bytes last uploaded), points.json and a
 * <name>.case.json descriptor, packed into one stored (uncompressed) zip.
 */

export function pointsJson(pairs: Pair[]): string {
  return JSON.stringify(
    { pairs: pairs.map((p) => ({ handle: p.handle, target: p.target })) },
    null,
    2,
  );
}

export function caseDescriptorJson(name: string): string {
  return JSON.stringify(
    { image: `${name}_image.png`, mask: `${name}_mask.png`, points: `${name}_points.json` },
    null,
    2,
  );
}

interface ZipEntry {
  name: string;
  data: Uint8Array;
}

function le16(v: number): number[] {
  return [v & 0xff, (v >>> 8) & 0xff];
}

function le32(v: number): number[] {
  return [v & 0xff, (v >>> 8) & 0xff, (v >>> 16) & 0xff, (v >>> 24) & 0xff];
}

/** Minimal zip writer, store method only. */
export function buildZip(entries: ZipEntry[]): Uint8Array {
  const chunks: number[] = [];
  const central: number[] = [];
  const encoder = new TextEncoder();
  for (const entry of entries) {
    const nameBytes = encoder.encode(entry.name);
    const crc = crc32(entry.data);
    const offset = chunks.length;
    chunks.push(
      ...le32(0x04034b50),
      ...le16(20), // version needed
      ...le16(0), // flags
      ...le16(0), // store
      ...le16(0), // mod time
      ...le16(0), // mod date
      ...le32(crc),
      ...le32(entry.data.length),
      ...le32(entry.data.length),
      ...le16(nameBytes.length),
      ...le16(0), // extra length
    );
    chunks.push(...nameBytes, ...entry.data);
    central.push(
      ...le32(0x02014b50),
      ...le16(20),
      ...le16(20),
      ...le16(0),
      ...le16(0),
      ...le16(0),
      ...le16(0),
      ...le32(crc),
      ...le32(entry.data.length),
      ...le32(entry.data.length),
      ...le16(nameBytes.length),
      ...le16(0),
      ...le16(0),
      ...le16(0),
      ...le16(0),
      ...le32(0),
      ...le32(offset),
      ...nameBytes,
    );
  }
  const centralOffset = chunks.length;
  chunks.push(...central);
  chunks.push(
    ...le32(0x06054b50),
    ...le16(0),
    ...le16(0),
    ...le16(entries.length),
    ...le16(entries.length),
    ...le32(central.length),
    ...le32(centralOffset),
    ...le16(0),
  );
  return new Uint8Array(chunks);
}

export function buildCaseZip(
  name: string,
  imagePng: Uint8Array,
  maskPng: Uint8Array,
  pairs: Pair[],
): Uint8Array {
  const encoder = new TextEncoder();
  return buildZip([
    { name: `${name}_image.png`, data: imagePng },
    { name: `${name}_mask.png`, data: maskPng },
    { name: `${name}_points.json`, data: encoder.encode(pointsJson(pairs)) },
    { name: `${name}.case.json`, data: encoder.encode(caseDescriptorJson(name)) },
  ]);
}
