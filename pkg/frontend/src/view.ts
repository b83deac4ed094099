/**
 * Client-side view state: orbit camera around the scene focus, active tool,
 * axis modes, connection status, and the latest engine snapshot.
 *
 * The snapshot is the single source of truth for scene content; the view
 * only decides where the user looks from and which tool pointer input
 * drives.
 */

import { ConnectionStatus } from "./connection.js";
import { Snapshot } from "./protocol.js";

export type Tool = "slide" | "pinch" | "twist" | "orbit";

export interface OrbitCamera {
  azimuthDeg: number; // rotation around the up axis
  elevationDeg: number; // strictly inside (0, 90)
  rangeM: number; // strictly positive
}

const ELEVATION_MIN = 1e-6;
const ELEVATION_MAX = 90 - 1e-6;
const RANGE_MIN = 0.1;
const RANGE_MAX = 500;

export function clampOrbit(o: OrbitCamera): OrbitCamera {
  return {
    azimuthDeg: ((o.azimuthDeg % 360) + 360) % 360,
    elevationDeg: Math.min(ELEVATION_MAX, Math.max(ELEVATION_MIN, o.elevationDeg)),
    rangeM: Math.min(RANGE_MAX, Math.max(RANGE_MIN, o.rangeM)),
  };
}

export interface ViewState {
  orbit: OrbitCamera;
  tool: Tool;
  slideAxis: "horizontal" | "vertical";
  twistAxis: "x" | "y" | "z";
  status: ConnectionStatus;
  snapshot: Snapshot | null;
  profileName: string | null;
  toasts: string[];
}

export function initialView(): ViewState {
  return {
    orbit: { azimuthDeg: 180, elevationDeg: 45, rangeM: 14 },
    tool: "slide",
    slideAxis: "horizontal",
    twistAxis: "z",
    status: "offline",
    snapshot: null,
    profileName: null,
    toasts: [],
  };
}

/** Drag on the navigation layer: dx orbits, dy tilts, wheel dollies. */
export function applyOrbitDrag(o: OrbitCamera, dxPx: number, dyPx: number): OrbitCamera {
  return clampOrbit({
    azimuthDeg: o.azimuthDeg + dxPx * 0.5,
    elevationDeg: o.elevationDeg - dyPx * 0.3,
    rangeM: o.rangeM,
  });
}

export function applyDolly(o: OrbitCamera, wheelDelta: number): OrbitCamera {
  return clampOrbit({ ...o, rangeM: o.rangeM * Math.exp(wheelDelta * 0.001) });
}

export function pushToast(view: ViewState, text: string, keep = 5): ViewState {
  return { ...view, toasts: [...view.toasts, text].slice(-keep) };
}
