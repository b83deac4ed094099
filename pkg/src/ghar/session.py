"""Session orchestration: event handling, trace recording, deterministic
replay.

A session is a pure fold over its event sequence given (profile, seed): time
comes from event timestamps, randomness from per-frame child seeds, and
snapshots serialize with a fixed field order, so replaying a trace twice
produces byte-identical logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import interaction
from .anchoring import AnchorStore, ResolvedPose, create_anchor, resolve_anchor
from .errors import AnchorRejected, GharError, ProtocolError, TraceParseError
from .geodesy import EnuVector, GeoPose, quat_from_matrix
from .interaction import SceneState, TouchEvent, classify, segment_to_delta
from .tracking import (
    DEFAULT_INTRINSICS,
    CameraPose,
    Fiducial,
    Localizer,
    LocalizationProfile,
    marker_visible,
)

EVENT_KINDS = {
    "DevicePose",
    "Touch",
    "PlaceAnchor",
    "PlaceModel",
    "ClearScene",
    "SelectModel",
    "SetMode",
    "SetAxisMode",
}

INSTRUCTIONS = [
    "Scan the environment by sending device poses until localization completes.",
    "Place an anchor, then place a model (simple design loads by default).",
    "Drag with one finger to slide, pinch with two to scale, twist to rotate.",
    "Clear the scene before selecting the moderate or complex design.",
    "Toggle marker mode to compare fiducial-based placement.",
]


def _default_camera() -> CameraPose:
    """Fixed sandbox viewpoint: 10 m south, 10 m up, looking at the origin."""
    pos = np.array([0.0, -10.0, 10.0])
    fwd = -pos / np.linalg.norm(pos)
    right = np.cross(fwd, [0.0, 0.0, 1.0])
    right /= np.linalg.norm(right)
    down = np.cross(fwd, right)
    r = np.column_stack([right, down, fwd])
    return CameraPose(EnuVector(*pos), quat_from_matrix(r))


def _default_fiducial(cam: CameraPose) -> Fiducial:
    """A4-ish marker near the session origin, facing the sandbox camera."""
    pos = np.array([0.0, 0.0, 0.5])
    z = np.array(list(cam.position)) - pos
    z /= np.linalg.norm(z)
    x = np.cross([0.0, 0.0, 1.0], z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return Fiducial(side_m=0.2, position=EnuVector(*pos), orientation=quat_from_matrix(np.column_stack([x, y, z])))


@dataclass(frozen=True)
class SessionEvent:
    t_ms: int
    kind: str
    payload: dict

    def to_json_dict(self) -> dict:
        return {"t_ms": self.t_ms, "kind": self.kind, "payload": self.payload}

    @staticmethod
    def from_json_dict(d: dict) -> "SessionEvent":
        return SessionEvent(t_ms=int(d["t_ms"]), kind=str(d["kind"]), payload=dict(d.get("payload", {})))


@dataclass(frozen=True)
class SceneSnapshot:
    session_id: str
    t_ms: int
    localized: bool
    anchor_position: tuple | None  # ENU of anchor in session frame
    anchor_orientation: tuple | None  # (w, x, y, z)
    model_world: tuple | None  # 16 row-major floats
    mode: str
    tier: str | None
    horizontal_accuracy_m: float | None
    heading_accuracy_deg: float | None
    marker_in_view: bool

    def to_json_dict(self) -> dict:
        # Field order is the wire contract; keep it stable.
        return {
            "type": "snapshot",
            "session_id": self.session_id,
            "t_ms": self.t_ms,
            "localized": self.localized,
            "anchor_position": list(self.anchor_position) if self.anchor_position else None,
            "anchor_orientation": list(self.anchor_orientation) if self.anchor_orientation else None,
            "model_world": list(self.model_world) if self.model_world else None,
            "mode": self.mode,
            "tier": self.tier,
            "horizontal_accuracy_m": self.horizontal_accuracy_m,
            "heading_accuracy_deg": self.heading_accuracy_deg,
            "marker_in_view": self.marker_in_view,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(", ", ": "))


@dataclass(frozen=True)
class ErrorReport:
    code: str
    message: str

    def to_json_dict(self) -> dict:
        return {"type": "error", "code": self.code, "message": self.message}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(", ", ": "))


class Session:
    """One user session; events are applied strictly in arrival order."""

    def __init__(self, profile: LocalizationProfile, seed: int, session_id: str | None = None):
        self.profile = profile
        self.seed = seed
        self.session_id = session_id if session_id is not None else f"s{seed:08d}"
        self.localizer = Localizer(profile, seed)
        self.estimate = None
        self.store = AnchorStore()
        self.scene = SceneState()
        self.camera = _default_camera()
        self.fiducial = _default_fiducial(self.camera)
        self.intrinsics = DEFAULT_INTRINSICS
        self.last_t_ms = -1
        self.touch_buffer: list[TouchEvent] = []

    # -- event application --------------------------------------------------

    def handle_event(self, e: SessionEvent):
        """Apply one event; returns a SceneSnapshot or an ErrorReport.

        Errors never close the session.
        """
        if e.kind not in EVENT_KINDS:
            return ErrorReport("ProtocolError", f"unknown event kind {e.kind!r}")
        if e.t_ms < self.last_t_ms:
            return ErrorReport("OutOfOrder", f"timestamp {e.t_ms} before {self.last_t_ms}")
        self.last_t_ms = e.t_ms
        try:
            getattr(self, f"_on_{e.kind.lower()}")(e)
        except GharError as err:
            return ErrorReport(err.code, str(err))
        except (KeyError, TypeError, ValueError) as err:
            return ErrorReport("ProtocolError", f"bad payload for {e.kind}: {err}")
        return self.snapshot(e.t_ms)

    def _on_devicepose(self, e: SessionEvent):
        truth = GeoPose.from_json_dict(e.payload["truth"])
        self.estimate = self.localizer.measure(truth, timestamp_ms=e.t_ms)
        self._update_marker_visibility()

    def _on_touch(self, e: SessionEvent):
        ev = TouchEvent.from_json_dict(e.payload)
        self.touch_buffer.append(ev)
        if ev.phase == "up":
            self._flush_gestures()

    def _on_placeanchor(self, e: SessionEvent):
        if self.estimate is None:
            raise AnchorRejected("no device pose yet; scan the environment first")
        anchor = create_anchor(self.estimate, self.store)
        self.scene.anchor = anchor

    def _on_placemodel(self, e: SessionEvent):
        self.scene.place_model()

    def _on_clearscene(self, e: SessionEvent):
        self.scene.clear()

    def _on_selectmodel(self, e: SessionEvent):
        self.scene.select_model(e.payload["tier"])

    def _on_setmode(self, e: SessionEvent):
        mode = e.payload["mode"]
        if mode not in ("markerless", "marker"):
            raise ProtocolError(f"unknown mode {mode!r}")
        self.scene.mode = mode
        self._update_marker_visibility()

    def _on_setaxismode(self, e: SessionEvent):
        if "slide" in e.payload:
            if e.payload["slide"] not in ("horizontal", "vertical"):
                raise ProtocolError(f"bad slide axis {e.payload['slide']!r}")
            self.scene.slide_axis_mode = e.payload["slide"]
        if "twist" in e.payload:
            if e.payload["twist"] not in ("x", "y", "z"):
                raise ProtocolError(f"bad twist axis {e.payload['twist']!r}")
            self.scene.twist_axis_mode = e.payload["twist"]

    def _update_marker_visibility(self):
        localized = self.estimate is not None and self.estimate.localized
        self.scene.marker_visible = localized and marker_visible(
            self.camera, self.intrinsics, self.fiducial
        )

    def _flush_gestures(self):
        events, self.touch_buffer = self.touch_buffer, []
        if self.scene.transform is None:
            return  # nothing placed yet; gestures are a no-op
        result = classify(events)
        resolved = self._resolved_anchor()
        plane_h = 0.0
        if resolved is not None:
            plane_h = resolved.position.up + self.scene.transform.translation.up
        for seg in result.gestures:
            delta = segment_to_delta(
                seg,
                self.camera,
                self.intrinsics,
                plane_h,
                slide_axis_mode=self.scene.slide_axis_mode,
                twist_axis_mode=self.scene.twist_axis_mode,
            )
            self.scene.transform = interaction.apply_delta(self.scene.transform, delta)

    def _resolved_anchor(self):
        if self.scene.anchor is None or self.estimate is None:
            return None
        return resolve_anchor(self.scene.anchor, self.estimate)

    # -- snapshots -----------------------------------------------------------

    def snapshot(self, t_ms: int | None = None) -> SceneSnapshot:
        resolved = self._resolved_anchor()
        model_world = None
        if self.scene.model is not None and resolved is not None:
            m = interaction.compose_world_transform(resolved, self.scene.transform)
            model_world = tuple(float(v) for v in m.reshape(-1))
        elif self.scene.model is not None:
            # marker mode without an anchor: model sits at the fiducial
            fid_resolved = _fiducial_resolved(self.fiducial)
            m = interaction.compose_world_transform(fid_resolved, self.scene.transform)
            model_world = tuple(float(v) for v in m.reshape(-1))
        return SceneSnapshot(
            session_id=self.session_id,
            t_ms=self.last_t_ms if t_ms is None else t_ms,
            localized=self.estimate is not None and self.estimate.localized,
            anchor_position=tuple(resolved.position) if resolved else None,
            anchor_orientation=tuple(resolved.orientation.as_list()) if resolved else None,
            model_world=model_world,
            mode=self.scene.mode,
            tier=self.scene.model.tier if self.scene.model else None,
            horizontal_accuracy_m=self.estimate.horizontal_accuracy_m if self.estimate else None,
            heading_accuracy_deg=self.estimate.heading_accuracy_deg if self.estimate else None,
            marker_in_view=self.scene.marker_visible,
        )


def _fiducial_resolved(fid: Fiducial):
    return ResolvedPose(fid.position, fid.orientation)


# --- traces ----------------------------------------------------------------


def save_trace(events, path) -> None:
    with open(path, "w") as f:
        for e in events:
            f.write(json.dumps(e.to_json_dict(), separators=(", ", ": ")))
            f.write("\n")


def load_trace(path) -> list[SessionEvent]:
    events = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(SessionEvent.from_json_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise TraceParseError(f"{path}:{lineno}: bad trace line: {e}") from e
    return events


class Recorder:
    """Wraps a session, appending every handled event to a trace list."""

    def __init__(self, session: Session):
        self.session = session
        self.events: list[SessionEvent] = []

    def handle_event(self, e: SessionEvent):
        self.events.append(e)
        return self.session.handle_event(e)

    def save(self, path) -> None:
        save_trace(self.events, path)


def replay_trace(path, profile: LocalizationProfile, seed: int):
    """Replay a trace deterministically.

    Returns (final SceneSnapshot, list of serialized outbound JSON lines: one
    per event, snapshot or error).
    """
    events = load_trace(path)
    session = Session(profile, seed)
    log = []
    for e in events:
        out = session.handle_event(e)
        log.append(out.to_json())
    return session.snapshot(), log
