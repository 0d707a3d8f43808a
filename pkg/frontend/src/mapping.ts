// Panel <-> camera-frame mapping.
//
// The server composites the panel into the camera frame inside a four-corner
// quad. The client never sees that quad directly; it discovers it from tick
// records: each scan gesture reports the panel position (u, v) that the
// marker's frame position mapped to, and the same record carries that frame
// position. Four or more such pairs determine the quad corners exactly,
// because the forward map
//
//   frame(u, v) = (1-u)(1-v) TL + u(1-v) TR + (1-u)v BL + uv BR
//
// is linear in the corners. We solve the 4-unknown least squares system per
// coordinate with plain Gaussian elimination.

export interface Point {
  x: number;
  y: number;
}

export interface CalibrationPair {
  frame: Point; // marker position in camera pixels
  uv: Point;    // panel fraction the server reported for it
}

export interface QuadMap {
  tl: Point;
  tr: Point;
  bl: Point;
  br: Point;
  /** Worst reprojection distance over the calibration pairs, in pixels. */
  residual: number;
}

function weights(u: number, v: number): [number, number, number, number] {
  return [(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v];
}

// Solve A x = b for a small dense system, partial pivoting. A is n x n
// row-major and is destroyed.
function solveLinear(a: number[][], b: number[]): number[] {
  const n = b.length;
  for (let col = 0; col < n; col++) {
    let pivot = col;
    for (let row = col + 1; row < n; row++) {
      if (Math.abs(a[row][col]) > Math.abs(a[pivot][col])) pivot = row;
    }
    if (Math.abs(a[pivot][col]) < 1e-12) throw new Error("mapping: singular system");
    [a[col], a[pivot]] = [a[pivot], a[col]];
    [b[col], b[pivot]] = [b[pivot], b[col]];
    for (let row = col + 1; row < n; row++) {
      const f = a[row][col] / a[col][col];
      for (let k = col; k < n; k++) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  const x = new Array(n).fill(0);
  for (let row = n - 1; row >= 0; row--) {
    let s = b[row];
    for (let k = row + 1; k < n; k++) s -= a[row][k] * x[k];
    x[row] = s / a[row][row];
  }
  return x;
}

export function solveQuad(pairs: CalibrationPair[]): QuadMap {
  if (pairs.length < 4) throw new Error(`mapping: need 4 pairs, have ${pairs.length}`);
  // normal equations: (W^T W) c = W^T p, one system per output coordinate
  const ata: number[][] = Array.from({ length: 4 }, () => [0, 0, 0, 0]);
  const atx = [0, 0, 0, 0];
  const aty = [0, 0, 0, 0];
  for (const { frame, uv } of pairs) {
    const w = weights(uv.x, uv.y);
    for (let i = 0; i < 4; i++) {
      for (let j = 0; j < 4; j++) ata[i][j] += w[i] * w[j];
      atx[i] += w[i] * frame.x;
      aty[i] += w[i] * frame.y;
    }
  }
  const cx = solveLinear(ata.map((r) => [...r]), [...atx]);
  const cy = solveLinear(ata.map((r) => [...r]), [...aty]);
  const quad: QuadMap = {
    tl: { x: cx[0], y: cy[0] },
    tr: { x: cx[1], y: cy[1] },
    bl: { x: cx[2], y: cy[2] },
    br: { x: cx[3], y: cy[3] },
    residual: 0,
  };
  for (const { frame, uv } of pairs) {
    const p = uvToFrame(quad, uv.x, uv.y);
    quad.residual = Math.max(quad.residual, Math.hypot(p.x - frame.x, p.y - frame.y));
  }
  return quad;
}

export function uvToFrame(quad: QuadMap, u: number, v: number): Point {
  const [w0, w1, w2, w3] = weights(u, v);
  return {
    x: w0 * quad.tl.x + w1 * quad.tr.x + w2 * quad.bl.x + w3 * quad.br.x,
    y: w0 * quad.tl.y + w1 * quad.tr.y + w2 * quad.bl.y + w3 * quad.br.y,
  };
}
