/**
 * Browser entry point: wires the controller to the DOM. Everything here is
 * thin glue; logic lives in the testable modules.
 */

import { SessionConnection } from "./connection.js";
import { SandboxController } from "./controls.js";
import { DrawPrim, renderSnapshot } from "./render.js";
import { ViewState } from "./view.js";

function paint(ctx: CanvasRenderingContext2D, prims: DrawPrim[], view: ViewState): void {
  ctx.fillStyle = "#111";
  ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  let badgeY = 20;
  for (const p of prims) {
    if (p.kind === "line") {
      ctx.strokeStyle = p.color;
      ctx.beginPath();
      ctx.moveTo(p.a[0], p.a[1]);
      ctx.lineTo(p.b[0], p.b[1]);
      ctx.stroke();
    } else if (p.kind === "ellipse") {
      ctx.strokeStyle = p.color;
      ctx.beginPath();
      ctx.ellipse(p.center[0], p.center[1], p.rx, p.ry, 0, 0, 2 * Math.PI);
      ctx.stroke();
    } else {
      ctx.fillStyle = "#fa0";
      ctx.fillText(p.text, 10, badgeY);
      badgeY += 14;
    }
  }
  ctx.fillStyle = "#eee";
  const snap = view.snapshot;
  const loc = snap ? (snap.localized ? "localized" : "scanning") : "no session";
  const acc = snap?.horizontal_accuracy_m != null ? ` +-${snap.horizontal_accuracy_m} m` : "";
  ctx.fillText(`${view.status} | ${view.profileName ?? "?"} | ${loc}${acc}`, 10, ctx.canvas.height - 10);
}

function main(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const banner = document.getElementById("banner")!;
  const panel = document.getElementById("instructions")!;
  const toasts = document.getElementById("toasts")!;

  const url = `ws://${location.hostname}:8787/session`;
  const conn = new SessionConnection(url, (u) => new WebSocket(u) as never, {
    onStatus: (s) => {
      banner.textContent = s === "online" ? "" : `service ${s}`;
      banner.classList.toggle("hidden", s === "online");
      ctrl.view = { ...ctrl.view, status: s };
      redraw();
    },
    onInstructions: (i) => {
      ctrl.view = { ...ctrl.view, profileName: i.profile.name };
      panel.innerHTML = `<h3>Session ${i.session_id}</h3><ol>${i.steps
        .map((s) => `<li>${s}</li>`)
        .join("")}</ol>`;
    },
  });
  const ctrl = new SandboxController(conn);

  function redraw(): void {
    paint(ctx, renderSnapshot(ctrl.view.snapshot, ctrl.view.orbit, {
      width: canvas.width,
      height: canvas.height,
      focalPx: 600,
    }), ctrl.view);
    toasts.innerHTML = ctrl.view.toasts.map((t) => `<div class="toast">${t}</div>`).join("");
  }
  ctrl.onChange(redraw);

  const bind = (id: string, fn: () => unknown) =>
    document.getElementById(id)!.addEventListener("click", () => void fn());
  bind("scan", () => ctrl.scan());
  bind("place-anchor", () => ctrl.placeAnchor());
  bind("place-model", () => ctrl.placeModel());
  bind("clear", () => ctrl.clearScene());
  (document.getElementById("tier") as HTMLSelectElement).addEventListener("change", (e) =>
    void ctrl.selectTier((e.target as HTMLSelectElement).value),
  );
  (document.getElementById("mode") as HTMLInputElement).addEventListener("change", (e) =>
    void ctrl.setMode((e.target as HTMLInputElement).checked ? "marker" : "markerless"),
  );
  (document.getElementById("slide-axis") as HTMLSelectElement).addEventListener("change", (e) =>
    void ctrl.setSlideAxis((e.target as HTMLSelectElement).value as "horizontal" | "vertical"),
  );
  (document.getElementById("twist-axis") as HTMLSelectElement).addEventListener("change", (e) =>
    void ctrl.setTwistAxis((e.target as HTMLSelectElement).value as "x" | "y" | "z"),
  );
  for (const tool of ["slide", "pinch", "twist", "orbit"] as const) {
    bind(`tool-${tool}`, () => ctrl.setTool(tool));
  }

  let t0 = performance.now();
  const raw = (phase: "down" | "move" | "up") => (e: PointerEvent) => {
    const r = canvas.getBoundingClientRect();
    void ctrl.pointer({
      t_ms: Math.round(performance.now() - t0),
      phase,
      pointerId: e.pointerId,
      x: e.clientX - r.left,
      y: e.clientY - r.top,
      modifier: e.altKey,
    });
  };
  canvas.addEventListener("pointerdown", raw("down"));
  canvas.addEventListener("pointermove", raw("move"));
  canvas.addEventListener("pointerup", raw("up"));
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    ctrl.wheel(e.deltaY);
  });

  conn.connect();
  redraw();
}

main();
