// Display discovery. Moving a marker makes the server report scan gestures
// whose panel (u, v) pairs with the marker's frame position in the same tick
// record; enough pairs pin down the display quad. Runs in well under a
// second at the 40 ms tick rate and needs no knowledge of the scene.

import { WorkbenchClient } from "./client.js";
import { CalibrationPair, QuadMap, solveQuad } from "./mapping.js";
import { TickPayload } from "./protocol.js";

function scanPair(record: TickPayload, markerId: string): CalibrationPair | null {
  const scan = record.gestures.find((g) => g.kind === "scan" && g.position);
  const marker = record.markers.find((m) => m.id === markerId);
  if (!scan || !scan.position || !marker || !marker.position) return null;
  return {
    frame: { x: marker.position[0], y: marker.position[1] },
    uv: { x: scan.position[0], y: scan.position[1] },
  };
}

export async function calibrate(
  client: WorkbenchClient,
  markerId: string,
  maxResidual = 0.5,
): Promise<QuadMap> {
  if (!client.hello) throw new Error("calibrate: no hello yet");
  const [w, h] = client.hello.frame_size;
  // central targets, almost surely inside any sensible display placement
  const targets: [number, number][] = [
    [0.50 * w, 0.50 * h],
    [0.38 * w, 0.38 * h],
    [0.64 * w, 0.38 * h],
    [0.38 * w, 0.64 * h],
    [0.64 * w, 0.64 * h],
    [0.52 * w, 0.42 * h],
  ];
  const pairs: CalibrationPair[] = [];
  for (const [x, y] of targets) {
    await client.tick({});                                // hide: track restarts
    await client.tick({ [markerId]: [x, y] });            // reappear, no motion yet
    const record = await client.tick({ [markerId]: [x + 4, y + 3] });
    const pair = scanPair(record, markerId);
    if (pair) pairs.push(pair);
    if (pairs.length >= 5) break;
  }
  if (pairs.length < 4) {
    throw new Error(`calibrate: only ${pairs.length} scan echoes, display not found`);
  }
  const quad = solveQuad(pairs);
  if (quad.residual > maxResidual) {
    throw new Error(`calibrate: residual ${quad.residual.toFixed(3)} px too large`);
  }
  return quad;
}
