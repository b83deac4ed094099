/**
 * Snapshot renderer: builds a 2D draw list (lines, ellipses, badges) from
 * the latest engine snapshot and the orbit camera. A thin canvas painter
 * consumes the list; everything up to that point is pure and unit-testable.
 *
 * Scene content comes exclusively from the snapshot. The model mesh assets
 * are out of scope, so every tier renders as its bounding box with a
 * warning badge.
 */

import { Snapshot } from "./protocol.js";
import { OrbitCamera } from "./view.js";

export type Vec3 = [number, number, number];

export interface Viewport {
  width: number;
  height: number;
  focalPx: number;
}

export const DEFAULT_VIEWPORT: Viewport = { width: 800, height: 600, focalPx: 600 };

export interface LinePrim {
  kind: "line";
  a: [number, number];
  b: [number, number];
  color: string;
}

export interface EllipsePrim {
  kind: "ellipse";
  center: [number, number];
  rx: number;
  ry: number;
  color: string;
}

export interface BadgePrim {
  kind: "badge";
  text: string;
}

export type DrawPrim = LinePrim | EllipsePrim | BadgePrim;

// --- camera ----------------------------------------------------------------

export interface Camera {
  position: Vec3;
  right: Vec3;
  down: Vec3;
  forward: Vec3;
}

const deg = Math.PI / 180;

function norm(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  return [v[0] / n, v[1] / n, v[2] / n];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

/** Camera on the orbit sphere around the focus, x-right y-down z-forward. */
export function orbitCamera(o: OrbitCamera, focus: Vec3 = [0, 0, 0]): Camera {
  const az = o.azimuthDeg * deg;
  const el = o.elevationDeg * deg;
  const dir: Vec3 = [Math.sin(az) * Math.cos(el), Math.cos(az) * Math.cos(el), Math.sin(el)];
  const position: Vec3 = [
    focus[0] + o.rangeM * dir[0],
    focus[1] + o.rangeM * dir[1],
    focus[2] + o.rangeM * dir[2],
  ];
  const forward = norm([focus[0] - position[0], focus[1] - position[1], focus[2] - position[2]]);
  const right = norm(cross(forward, [0, 0, 1]));
  const down = cross(forward, right);
  return { position, right, down, forward };
}

/** Pinhole projection; returns null for points at or behind the camera. */
export function project(cam: Camera, vp: Viewport, p: Vec3): [number, number] | null {
  const d: Vec3 = [p[0] - cam.position[0], p[1] - cam.position[1], p[2] - cam.position[2]];
  const x = d[0] * cam.right[0] + d[1] * cam.right[1] + d[2] * cam.right[2];
  const y = d[0] * cam.down[0] + d[1] * cam.down[1] + d[2] * cam.down[2];
  const z = d[0] * cam.forward[0] + d[1] * cam.forward[1] + d[2] * cam.forward[2];
  if (z <= 1e-9) return null;
  return [vp.focalPx * (x / z) + vp.width / 2, vp.focalPx * (y / z) + vp.height / 2];
}

// --- world transform -------------------------------------------------------

/** Apply a row-major 4x4 to a point. */
export function applyMat4(m: number[], p: Vec3): Vec3 {
  return [
    m[0] * p[0] + m[1] * p[1] + m[2] * p[2] + m[3],
    m[4] * p[0] + m[5] * p[1] + m[6] * p[2] + m[7],
    m[8] * p[0] + m[9] * p[1] + m[10] * p[2] + m[11],
  ];
}

/** Unit-cube corner set centered on the base (model rests on its floor). */
export function unitBoxCorners(): Vec3[] {
  const out: Vec3[] = [];
  for (const z of [0, 1]) for (const y of [-0.5, 0.5]) for (const x of [-0.5, 0.5]) out.push([x, y, z]);
  return out;
}

const BOX_EDGES: [number, number][] = [
  [0, 1], [1, 3], [3, 2], [2, 0],
  [4, 5], [5, 7], [7, 6], [6, 4],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

/** World-space corners of the model box under the snapshot transform. */
export function modelWorldCorners(modelWorld: number[]): Vec3[] {
  return unitBoxCorners().map((c) => applyMat4(modelWorld, c));
}

// --- draw list -------------------------------------------------------------

function pushSegment(out: DrawPrim[], cam: Camera, vp: Viewport, a: Vec3, b: Vec3, color: string) {
  const pa = project(cam, vp, a);
  const pb = project(cam, vp, b);
  if (pa !== null && pb !== null) out.push({ kind: "line", a: pa, b: pb, color });
}

export function gridPrims(cam: Camera, vp: Viewport, halfExtent = 10, step = 1): DrawPrim[] {
  const out: DrawPrim[] = [];
  for (let i = -halfExtent; i <= halfExtent; i += step) {
    pushSegment(out, cam, vp, [i, -halfExtent, 0], [i, halfExtent, 0], "#334");
    pushSegment(out, cam, vp, [-halfExtent, i, 0], [halfExtent, i, 0], "#334");
  }
  return out;
}

export function anchorPrims(cam: Camera, vp: Viewport, pos: Vec3): DrawPrim[] {
  const out: DrawPrim[] = [];
  const s = 0.4;
  pushSegment(out, cam, vp, [pos[0] - s, pos[1], pos[2]], [pos[0] + s, pos[1], pos[2]], "#fc0");
  pushSegment(out, cam, vp, [pos[0], pos[1] - s, pos[2]], [pos[0], pos[1] + s, pos[2]], "#fc0");
  pushSegment(out, cam, vp, [pos[0], pos[1], pos[2]], [pos[0], pos[1], pos[2] + s], "#fc0");
  return out;
}

export function modelPrims(cam: Camera, vp: Viewport, modelWorld: number[]): DrawPrim[] {
  const corners = modelWorldCorners(modelWorld);
  const out: DrawPrim[] = [];
  for (const [i, j] of BOX_EDGES) pushSegment(out, cam, vp, corners[i], corners[j], "#6cf");
  out.push({ kind: "badge", text: "bounding box (no mesh asset)" });
  return out;
}

export function markerPrims(cam: Camera, vp: Viewport, inView: boolean): DrawPrim[] {
  // the engine's fixed fiducial: 0.2 m square at (0, 0, 0.5)
  const h = 0.1;
  const z = 0.5;
  const color = inView ? "#0f8" : "#666";
  const c: Vec3[] = [
    [-h, 0, z + h],
    [-h, 0, z - h],
    [h, 0, z - h],
    [h, 0, z + h],
  ];
  const out: DrawPrim[] = [];
  for (let i = 0; i < 4; i++) pushSegment(out, cam, vp, c[i], c[(i + 1) % 4], color);
  return out;
}

/** Horizontal accuracy ellipse at the session origin, sized by the sigma. */
export function accuracyPrims(
  cam: Camera,
  vp: Viewport,
  sigmaPosM: number,
): DrawPrim[] {
  const center = project(cam, vp, [0, 0, 0.01]);
  const east = project(cam, vp, [sigmaPosM, 0, 0.01]);
  const north = project(cam, vp, [0, sigmaPosM, 0.01]);
  if (center === null || east === null || north === null) return [];
  return [
    {
      kind: "ellipse",
      center,
      rx: Math.hypot(east[0] - center[0], east[1] - center[1]),
      ry: Math.hypot(north[0] - center[0], north[1] - center[1]),
      color: "#f55",
    },
  ];
}

export function renderSnapshot(
  snapshot: Snapshot | null,
  orbit: OrbitCamera,
  vp: Viewport = DEFAULT_VIEWPORT,
): DrawPrim[] {
  const cam = orbitCamera(orbit);
  const out: DrawPrim[] = [...gridPrims(cam, vp)];
  if (snapshot === null) return out;
  if (snapshot.horizontal_accuracy_m !== null) {
    out.push(...accuracyPrims(cam, vp, snapshot.horizontal_accuracy_m));
  }
  if (snapshot.anchor_position !== null) {
    out.push(...anchorPrims(cam, vp, snapshot.anchor_position));
  }
  if (snapshot.mode === "marker") {
    out.push(...markerPrims(cam, vp, snapshot.marker_in_view));
  }
  if (snapshot.model_world !== null) {
    out.push(...modelPrims(cam, vp, snapshot.model_world));
  }
  return out;
}
