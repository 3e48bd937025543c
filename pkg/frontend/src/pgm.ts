// Parser for the binary PGM (P5) frames the service serves.

export interface PgmImage {
  width: number;
  height: number;
  maxval: number;
  pixels: Uint8Array;
}

const WHITESPACE = new Set([0x20, 0x09, 0x0a, 0x0d, 0x0b, 0x0c]);

export function parsePgm(bytes: Uint8Array): PgmImage {
  if (bytes.length < 2 || bytes[0] !== 0x50 || bytes[1] !== 0x35) {
    throw new Error("not a binary PGM: missing P5 magic");
  }
  let pos = 2;

  // Read one whitespace-delimited token, skipping '#' comment lines.
  function token(): string {
    while (pos < bytes.length) {
      if (WHITESPACE.has(bytes[pos])) {
        pos++;
      } else if (bytes[pos] === 0x23) {
        while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      } else {
        break;
      }
    }
    const start = pos;
    while (pos < bytes.length && !WHITESPACE.has(bytes[pos])) pos++;
    if (start === pos) throw new Error("truncated PGM header");
    return String.fromCharCode(...bytes.subarray(start, pos));
  }

  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  const maxval = parseInt(token(), 10);
  if (!(width > 0 && height > 0)) throw new Error("bad PGM dimensions");
  if (!(maxval > 0 && maxval < 256)) throw new Error(`unsupported PGM maxval ${maxval}`);
  pos++; // exactly one whitespace byte separates the header from the raster

  const expected = width * height;
  const pixels = bytes.subarray(pos, pos + expected);
  if (pixels.length !== expected) {
    throw new Error(`truncated PGM raster: ${pixels.length} of ${expected} bytes`);
  }
  return { width, height, maxval, pixels: new Uint8Array(pixels) };
}
