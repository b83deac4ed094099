/**
 * Maps raw pointer input to the engine's Touch wire samples.
 *
 * Touchscreens supply real multi-touch; on desktop a held modifier key
 * synthesizes a second pointer mirrored about the gesture origin, which
 * turns a one-handed mouse drag into a pinch or twist.
 */

import { TouchPhase, TouchSample } from "./protocol.js";

export interface RawPointer {
  t_ms: number;
  phase: TouchPhase;
  pointerId: number;
  x: number;
  y: number;
  modifier?: boolean; // e.g. Alt held: emulate a second finger
}

const EMULATED_ID = 9999;

export class PointerTracker {
  private active = new Map<number, [number, number]>();
  private origin: [number, number] | null = null;
  private lastT = -1;

  /** Feed one raw pointer event; returns the Touch sample to send, if any. */
  handle(p: RawPointer): TouchSample | null {
    if (p.t_ms < this.lastT) {
      throw new Error(`pointer events out of order: ${p.t_ms} after ${this.lastT}`);
    }
    this.lastT = p.t_ms;

    if (p.phase === "down") {
      if (this.active.size === 0) this.origin = [p.x, p.y];
      this.active.set(p.pointerId, [p.x, p.y]);
    } else if (p.phase === "move") {
      if (!this.active.has(p.pointerId)) return null; // hover, not a gesture
      this.active.set(p.pointerId, [p.x, p.y]);
    } else {
      if (!this.active.has(p.pointerId)) return null;
      this.active.delete(p.pointerId);
    }

    // the "up" sample still carries the lifting pointer's final position
    const effective = new Map(this.active);
    if (p.phase === "up") effective.set(p.pointerId, [p.x, p.y]);

    const points: [number, number, number][] = [...effective.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([id, [x, y]]) => [id, x, y]);

    if (p.modifier && this.origin !== null && effective.size === 1) {
      const [[, [x, y]]] = effective.entries();
      const [ox, oy] = this.origin;
      points.push([EMULATED_ID, 2 * ox - x, 2 * oy - y]);
    }

    if (p.phase === "up" && this.active.size === 0) this.origin = null;

    return { t_ms: p.t_ms, phase: p.phase, points };
  }

  get pointerCount(): number {
    return this.active.size;
  }

  reset(): void {
    this.active.clear();
    this.origin = null;
    this.lastT = -1;
  }
}

/** Convenience: turn a scripted drag into the raw pointer sequence. */
export function scriptedDrag(
  from: [number, number],
  to: [number, number],
  steps: number,
  t0 = 0,
  dt = 16,
): RawPointer[] {
  const out: RawPointer[] = [{ t_ms: t0, phase: "down", pointerId: 1, x: from[0], y: from[1] }];
  for (let i = 1; i <= steps; i++) {
    const f = i / steps;
    out.push({
      t_ms: t0 + i * dt,
      phase: "move",
      pointerId: 1,
      x: from[0] + (to[0] - from[0]) * f,
      y: from[1] + (to[1] - from[1]) * f,
    });
  }
  out.push({ t_ms: t0 + (steps + 1) * dt, phase: "up", pointerId: 1, x: to[0], y: to[1] });
  return out;
}
