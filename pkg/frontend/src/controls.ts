/**
 * Sandbox controller: binds the control panel, pointer input, and view
 * state to the session connection. Engine error replies surface as toasts;
 * snapshots overwrite the rendered scene wholesale.
 */

import { SessionConnection } from "./connection.js";
import { PointerTracker, RawPointer } from "./pointer.js";
import {
  GeoPoseJson,
  ServerMsg,
  Snapshot,
  clearSceneEvent,
  devicePoseEvent,
  isError,
  isSnapshot,
  placeAnchorEvent,
  placeModelEvent,
  selectModelEvent,
  setAxisModeEvent,
  setModeEvent,
  touchEvent,
} from "./protocol.js";
import { ViewState, applyDolly, applyOrbitDrag, initialView, pushToast } from "./view.js";

/** The sandbox's simulated walk location; heading east at street level. */
export const SANDBOX_TRUTH: GeoPoseJson = {
  lat: 24.5,
  lon: 54.4,
  alt: 3.0,
  q: [0.7071067811865476, 0, 0, 0.7071067811865476],
};

export class SandboxController {
  view: ViewState = initialView();
  private tracker = new PointerTracker();
  private clock = 0;
  private lastOrbitPx: [number, number] | null = null;
  private listeners: Array<(v: ViewState) => void> = [];

  constructor(private conn: SessionConnection) {}

  onChange(fn: (v: ViewState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.view);
  }

  private tick(): number {
    this.clock += 16;
    return this.clock;
  }

  private apply(reply: ServerMsg): Snapshot | null {
    if (isSnapshot(reply)) {
      this.view = { ...this.view, snapshot: reply };
      this.emit();
      return reply;
    }
    if (isError(reply)) {
      this.view = pushToast(this.view, `${reply.code}: ${reply.message}`);
      this.emit();
    }
    return null;
  }

  private async send(msg: Parameters<SessionConnection["send"]>[0]): Promise<Snapshot | null> {
    try {
      return this.apply(await this.conn.send(msg));
    } catch (e) {
      this.view = pushToast(this.view, `offline: ${(e as Error).message}`);
      this.emit();
      return null;
    }
  }

  /** Task 1: stream device poses until the engine reports localized. */
  async scan(maxFrames = 60): Promise<boolean> {
    for (let i = 0; i < maxFrames; i++) {
      const snap = await this.send(devicePoseEvent(this.tick(), SANDBOX_TRUTH));
      if (snap?.localized) return true;
    }
    return false;
  }

  placeAnchor(): Promise<Snapshot | null> {
    return this.send(placeAnchorEvent(this.tick()));
  }

  placeModel(): Promise<Snapshot | null> {
    return this.send(placeModelEvent(this.tick()));
  }

  clearScene(): Promise<Snapshot | null> {
    return this.send(clearSceneEvent(this.tick()));
  }

  selectTier(tier: string): Promise<Snapshot | null> {
    return this.send(selectModelEvent(this.tick(), tier));
  }

  setMode(mode: "markerless" | "marker"): Promise<Snapshot | null> {
    return this.send(setModeEvent(this.tick(), mode));
  }

  async setSlideAxis(axis: "horizontal" | "vertical"): Promise<void> {
    this.view = { ...this.view, slideAxis: axis };
    await this.send(setAxisModeEvent(this.tick(), { slide: axis }));
  }

  async setTwistAxis(axis: "x" | "y" | "z"): Promise<void> {
    this.view = { ...this.view, twistAxis: axis };
    await this.send(setAxisModeEvent(this.tick(), { twist: axis }));
  }

  setTool(tool: ViewState["tool"]): void {
    this.view = { ...this.view, tool };
    this.tracker.reset();
    this.lastOrbitPx = null;
    this.emit();
  }

  /**
   * Feed one raw pointer event. Orbit tool pans the local camera; every
   * other tool forwards the mapped Touch sample to the engine.
   */
  async pointer(p: RawPointer): Promise<Snapshot | null> {
    if (this.view.tool === "orbit") {
      if (p.phase === "down") this.lastOrbitPx = [p.x, p.y];
      else if (p.phase === "move" && this.lastOrbitPx !== null) {
        const [lx, ly] = this.lastOrbitPx;
        this.view = { ...this.view, orbit: applyOrbitDrag(this.view.orbit, p.x - lx, p.y - ly) };
        this.lastOrbitPx = [p.x, p.y];
        this.emit();
      } else if (p.phase === "up") this.lastOrbitPx = null;
      return null;
    }
    // pinch/twist tools synthesize the mirrored second pointer so a plain
    // mouse drag can drive two-finger gestures; so does a held modifier key
    const emulate = this.view.tool === "pinch" || this.view.tool === "twist";
    const sample = this.tracker.handle(emulate ? { ...p, modifier: true } : p);
    if (sample === null) return null;
    return this.send(touchEvent(sample));
  }

  wheel(delta: number): void {
    this.view = { ...this.view, orbit: applyDolly(this.view.orbit, delta) };
    this.emit();
  }
}
