/**
 * Wire types for the session service WebSocket protocol.
 *
 * Every outbound message is {"type": "event", t_ms, kind, payload}; the
 * service answers each one with exactly one snapshot or error. On connect it
 * sends an instructions message first.
 */

export type EventKind =
  | "DevicePose"
  | "Touch"
  | "PlaceAnchor"
  | "PlaceModel"
  | "ClearScene"
  | "SelectModel"
  | "SetMode"
  | "SetAxisMode";

export interface SessionEventMsg {
  type: "event";
  t_ms: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface Snapshot {
  type: "snapshot";
  session_id: string;
  t_ms: number;
  localized: boolean;
  anchor_position: [number, number, number] | null;
  anchor_orientation: [number, number, number, number] | null;
  model_world: number[] | null; // 16 row-major floats
  mode: "markerless" | "marker";
  tier: string | null;
  horizontal_accuracy_m: number | null;
  heading_accuracy_deg: number | null;
  marker_in_view: boolean;
}

export interface ErrorReply {
  type: "error";
  code: string;
  message: string;
}

export interface Instructions {
  type: "instructions";
  session_id: string;
  profile: { name: string; sigma_pos_m: number; sigma_alt_m: number; sigma_heading_deg: number };
  steps: string[];
}

export type ServerMsg = Snapshot | ErrorReply | Instructions;

export interface GeoPoseJson {
  lat: number;
  lon: number;
  alt: number;
  q: [number, number, number, number];
}

export type TouchPhase = "down" | "move" | "up";

/** One touch sample: id plus pixel position per active pointer. */
export interface TouchSample {
  t_ms: number;
  phase: TouchPhase;
  points: [number, number, number][]; // (pointer_id, x_px, y_px)
}

export function isSnapshot(m: ServerMsg): m is Snapshot {
  return m.type === "snapshot";
}

export function isError(m: ServerMsg): m is ErrorReply {
  return m.type === "error";
}

export function isInstructions(m: ServerMsg): m is Instructions {
  return m.type === "instructions";
}

export function parseServerMsg(raw: string): ServerMsg {
  const m = JSON.parse(raw);
  if (typeof m !== "object" || m === null || typeof m.type !== "string") {
    throw new Error("malformed server message");
  }
  if (m.type !== "snapshot" && m.type !== "error" && m.type !== "instructions") {
    throw new Error(`unknown server message type ${m.type}`);
  }
  return m as ServerMsg;
}

function event(t_ms: number, kind: EventKind, payload: Record<string, unknown> = {}): SessionEventMsg {
  if (!Number.isFinite(t_ms) || t_ms < 0) throw new Error(`bad timestamp ${t_ms}`);
  return { type: "event", t_ms, kind, payload };
}

export function devicePoseEvent(t_ms: number, truth: GeoPoseJson): SessionEventMsg {
  return event(t_ms, "DevicePose", { truth });
}

export function touchEvent(sample: TouchSample): SessionEventMsg {
  return event(sample.t_ms, "Touch", {
    t_ms: sample.t_ms,
    phase: sample.phase,
    points: sample.points,
  });
}

export function placeAnchorEvent(t_ms: number): SessionEventMsg {
  return event(t_ms, "PlaceAnchor");
}

export function placeModelEvent(t_ms: number): SessionEventMsg {
  return event(t_ms, "PlaceModel");
}

export function clearSceneEvent(t_ms: number): SessionEventMsg {
  return event(t_ms, "ClearScene");
}

export function selectModelEvent(t_ms: number, tier: string): SessionEventMsg {
  return event(t_ms, "SelectModel", { tier });
}

export function setModeEvent(t_ms: number, mode: "markerless" | "marker"): SessionEventMsg {
  return event(t_ms, "SetMode", { mode });
}

export function setAxisModeEvent(
  t_ms: number,
  axes: { slide?: "horizontal" | "vertical"; twist?: "x" | "y" | "z" },
): SessionEventMsg {
  return event(t_ms, "SetAxisMode", { ...axes });
}
