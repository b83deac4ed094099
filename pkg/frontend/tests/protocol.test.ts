import { describe, expect, it } from "vitest";

import {
  devicePoseEvent,
  isError,
  isInstructions,
  isSnapshot,
  parseServerMsg,
  selectModelEvent,
  setAxisModeEvent,
  setModeEvent,
  touchEvent,
} from "../src/protocol.js";

describe("event builders", () => {
  it("wraps a device pose", () => {
    const e = devicePoseEvent(16, { lat: 1, lon: 2, alt: 3, q: [1, 0, 0, 0] });
    expect(e).toEqual({
      type: "event",
      t_ms: 16,
      kind: "DevicePose",
      payload: { truth: { lat: 1, lon: 2, alt: 3, q: [1, 0, 0, 0] } },
    });
  });

  it("touch payload mirrors the sample", () => {
    const e = touchEvent({ t_ms: 5, phase: "move", points: [[1, 10, 20]] });
    expect(e.kind).toBe("Touch");
    expect(e.payload).toEqual({ t_ms: 5, phase: "move", points: [[1, 10, 20]] });
  });

  it("tier and mode payloads", () => {
    expect(selectModelEvent(1, "complex").payload).toEqual({ tier: "complex" });
    expect(setModeEvent(1, "marker").payload).toEqual({ mode: "marker" });
    expect(setAxisModeEvent(1, { slide: "vertical" }).payload).toEqual({ slide: "vertical" });
  });

  it("rejects negative timestamps", () => {
    expect(() => devicePoseEvent(-1, { lat: 0, lon: 0, alt: 0, q: [1, 0, 0, 0] })).toThrow();
  });
});

describe("parseServerMsg", () => {
  it("round-trips the three message types", () => {
    const snap = parseServerMsg('{"type": "snapshot", "session_id": "s1", "t_ms": 0}');
    expect(isSnapshot(snap)).toBe(true);
    const err = parseServerMsg('{"type": "error", "code": "NoAnchor", "message": "x"}');
    expect(isError(err)).toBe(true);
    const instr = parseServerMsg('{"type": "instructions", "steps": []}');
    expect(isInstructions(instr)).toBe(true);
  });

  it("rejects junk", () => {
    expect(() => parseServerMsg("[]")).toThrow();
    expect(() => parseServerMsg('{"type": "nope"}')).toThrow();
    expect(() => parseServerMsg("not json")).toThrow();
  });
});
