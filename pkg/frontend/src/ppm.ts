// Binary PPM (P6) decoding for panel images. The server sends maxval-255
// streams; comments and arbitrary whitespace in the header are legal.

export interface DecodedImage {
  width: number;
  height: number;
  rgba: Uint8ClampedArray; // width * height * 4, alpha forced opaque
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c || byte === 0x0b;
}

// Reads the next whitespace-delimited token, skipping '#' comments.
function nextToken(bytes: Uint8Array, pos: number): [string, number] {
  while (pos < bytes.length) {
    if (isSpace(bytes[pos])) { pos++; continue; }
    if (bytes[pos] === 0x23) { // '#'
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      continue;
    }
    break;
  }
  const start = pos;
  while (pos < bytes.length && !isSpace(bytes[pos])) pos++;
  if (pos === start) throw new Error("ppm: truncated header");
  let token = "";
  for (let i = start; i < pos; i++) token += String.fromCharCode(bytes[i]);
  return [token, pos];
}

export function decodePpm(bytes: Uint8Array): DecodedImage {
  let pos = 0;
  let token: string;
  [token, pos] = nextToken(bytes, pos);
  if (token !== "P6") throw new Error(`ppm: expected P6, got ${token}`);
  let w: string, h: string, maxval: string;
  [w, pos] = nextToken(bytes, pos);
  [h, pos] = nextToken(bytes, pos);
  [maxval, pos] = nextToken(bytes, pos);
  const width = parseInt(w, 10);
  const height = parseInt(h, 10);
  if (!(width > 0 && height > 0)) throw new Error("ppm: bad dimensions");
  if (maxval !== "255") throw new Error(`ppm: unsupported maxval ${maxval}`);
  pos += 1; // single whitespace byte after maxval
  const need = width * height * 3;
  if (bytes.length - pos < need) throw new Error("ppm: truncated pixel data");
  const rgba = new Uint8ClampedArray(width * height * 4);
  for (let i = 0, j = 0; i < need; i += 3, j += 4) {
    rgba[j] = bytes[pos + i];
    rgba[j + 1] = bytes[pos + i + 1];
    rgba[j + 2] = bytes[pos + i + 2];
    rgba[j + 3] = 255;
  }
  return { width, height, rgba };
}

/** base64 -> bytes without assuming a browser or node global. */
export function base64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  // node
  return new Uint8Array(Buffer.from(b64, "base64"));
}
