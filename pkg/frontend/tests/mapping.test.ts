import { describe, expect, it } from "vitest";
import { CalibrationPair, Point, solveQuad, uvToFrame } from "../src/mapping.js";

// Forward model the solver has to invert: bilinear blend of four corners.
function blend(corners: Point[], u: number, v: number): Point {
  const w = [(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v];
  let x = 0;
  let y = 0;
  for (let i = 0; i < 4; i++) {
    x += w[i] * corners[i].x;
    y += w[i] * corners[i].y;
  }
  return { x, y };
}

const CORNERS: Point[] = [
  { x: 160.5, y: 40.25 },  // tl
  { x: 561.0, y: 82.0 },   // tr
  { x: 158.0, y: 441.5 },  // bl
  { x: 559.25, y: 438.0 }, // br
];

function pairsAt(uvs: [number, number][]): CalibrationPair[] {
  return uvs.map(([u, v]) => ({ frame: blend(CORNERS, u, v), uv: { x: u, y: v } }));
}

describe("solveQuad", () => {
  it("recovers the corners exactly from five interior samples", () => {
    const quad = solveQuad(pairsAt([
      [0.5, 0.5], [0.38, 0.38], [0.64, 0.38], [0.38, 0.64], [0.64, 0.64],
    ]));
    expect(quad.tl.x).toBeCloseTo(CORNERS[0].x, 8);
    expect(quad.tl.y).toBeCloseTo(CORNERS[0].y, 8);
    expect(quad.tr.x).toBeCloseTo(CORNERS[1].x, 8);
    expect(quad.bl.y).toBeCloseTo(CORNERS[2].y, 8);
    expect(quad.br.x).toBeCloseTo(CORNERS[3].x, 8);
    expect(quad.residual).toBeLessThan(1e-8);
  });

  it("maps uv back to frame coordinates through uvToFrame", () => {
    const quad = solveQuad(pairsAt([
      [0.5, 0.5], [0.2, 0.3], [0.8, 0.3], [0.2, 0.8], [0.8, 0.8], [0.55, 0.45],
    ]));
    const probe = blend(CORNERS, 0.31, 0.77);
    const mapped = uvToFrame(quad, 0.31, 0.77);
    expect(mapped.x).toBeCloseTo(probe.x, 7);
    expect(mapped.y).toBeCloseTo(probe.y, 7);
  });

  it("needs at least four pairs", () => {
    expect(() => solveQuad(pairsAt([[0.5, 0.5], [0.4, 0.4], [0.6, 0.6]]))).toThrow(/pairs/);
  });

  it("rejects degenerate sample sets", () => {
    // all probes on one point: the normal equations lose rank
    expect(() => solveQuad(pairsAt([
      [0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5],
    ]))).toThrow(/singular/);
  });

  it("averages out symmetric noise instead of chasing it", () => {
    const pairs = pairsAt([
      [0.5, 0.5], [0.3, 0.3], [0.7, 0.3], [0.3, 0.7], [0.7, 0.7],
      [0.4, 0.55], [0.6, 0.45],
    ]);
    for (let i = 0; i < pairs.length; i++) {
      const sign = i % 2 === 0 ? 1 : -1;
      pairs[i].frame = {
        x: pairs[i].frame.x + 0.05 * sign,
        y: pairs[i].frame.y - 0.05 * sign,
      };
    }
    const quad = solveQuad(pairs);
    expect(Math.abs(quad.tl.x - CORNERS[0].x)).toBeLessThan(0.5);
    expect(quad.residual).toBeLessThan(0.2);
  });
});
