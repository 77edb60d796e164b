/**
 * Minimal deterministic PNG encoder (stored deflate blocks, no compression).
 *
 * The mask uploads must be byte-reproducible so an exported case replays
 * identically through the batch CLI; canvas.toBlob() makes no such promise
 * across browsers, so the few dozen lines of PNG plumbing live here.
 */

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(data: Uint8Array, seed = 0xffffffff): number {
  let c = seed;
  for (let i = 0; i < data.length; i++) {
    c = CRC_TABLE[(c ^ data[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

export function adler32(data: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < data.length; i++) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32(value: number): Uint8Array {
  return new Uint8Array([
    (value >>> 24) & 0xff,
    (value >>> 16) & 0xff,
    (value >>> 8) & 0xff,
    value & 0xff,
  ]);
}

function concat(parts: Uint8Array[]): Uint8Array {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let at = 0;
  for (const p of parts) {
    out.set(p, at);
    at += p.length;
  }
  return out;
}

function chunk(type: string, body: Uint8Array): Uint8Array {
  const tag = new Uint8Array([...type].map((ch) => ch.charCodeAt(0)));
  const payload = concat([tag, body]);
  return concat([u32(body.length), payload, u32(crc32(payload))]);
}

/** zlib stream with stored (uncompressed) deflate blocks. */
export function zlibStore(data: Uint8Array): Uint8Array {
  const parts: Uint8Array[] = [new Uint8Array([0x78, 0x01])];
  const max = 65535;
  for (let at = 0; at < data.length || at === 0; at += max) {
    const slice = data.subarray(at, Math.min(at + max, data.length));
    const final = at + max >= data.length ? 1 : 0;
    const len = slice.length;
    parts.push(
      new Uint8Array([final, len & 0xff, (len >>> 8) & 0xff, ~len & 0xff, (~len >>> 8) & 0xff]),
    );
    parts.push(slice);
    if (final) break;
  }
  parts.push(u32(adler32(data)));
  return concat(parts);
}

const SIGNATURE = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

function encode(width: number, height: number, colorType: 0 | 6, raw: Uint8Array): Uint8Array {
  const channels = colorType === 0 ? 1 : 4;
  if (raw.length !== width * height * channels) {
    throw new Error(`raw buffer is ${raw.length}, expected ${width * height * channels}`);
  }
  const stride = width * channels;
  const filtered = new Uint8Array((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    filtered[y * (stride + 1)] = 0; // filter: none
    filtered.set(raw.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const ihdr = concat([u32(width), u32(height), new Uint8Array([8, colorType, 0, 0, 0])]);
  return concat([
    SIGNATURE,
    chunk("IHDR", ihdr),
    chunk("IDAT", zlibStore(filtered)),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

/** 8-bit grayscale PNG; input is one byte per pixel, row-major. */
export function encodeGrayPng(width: number, height: number, gray: Uint8Array): Uint8Array {
  return encode(width, height, 0, gray);
}

/** 8-bit RGBA PNG; input matches canvas ImageData layout. */
export function encodeRgbaPng(width: number, height: number, rgba: Uint8Array): Uint8Array {
  return encode(width, height, 6, rgba);
}
