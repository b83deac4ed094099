"""7-DOF manipulation: touch-stream gesture classification, gesture-to-delta
math, transform state, and the place/clear model workflow.

Control is separated: slides only translate, pinches only scale, twists only
rotate, and a delta never touches the other fields.  Scale applies about the
model's anchor origin.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .anchoring import Anchor, ResolvedPose
from .errors import (
    DegenerateGesture,
    DomainError,
    MustClearFirst,
    NoAnchor,
    NoIntersection,
    NoVisibleMarker,
)
from .geodesy import EnuVector, UnitQuaternion, quat_compose, quat_to_matrix
from .tracking import CameraIntrinsics, CameraPose

log = logging.getLogger(__name__)

# Cumulative pixels of motion before a gesture activates.
DEAD_ZONE_PX = 12.0
# Per-gesture pinch clamp.
PINCH_CLAMP = (0.01, 100.0)
# Absolute scale clamp after applying a delta.
SCALE_LIMITS = (1e-4, 1e4)

AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


class GestureKind(str, Enum):
    SLIDE = "Slide"
    PINCH = "Pinch"
    TWIST = "Twist"


@dataclass(frozen=True)
class TouchEvent:
    t_ms: int
    phase: str  # down | move | up
    points: tuple  # ((pointer_id, x_px, y_px), ...)

    @staticmethod
    def from_json_dict(d: dict) -> "TouchEvent":
        return TouchEvent(
            t_ms=d["t_ms"],
            phase=d["phase"],
            points=tuple((p[0], float(p[1]), float(p[2])) for p in d["points"]),
        )


@dataclass(frozen=True)
class GestureDelta:
    kind: GestureKind
    translation: EnuVector | None = None
    scale_factor: float | None = None
    rotation: UnitQuaternion | None = None


@dataclass(frozen=True)
class ModelTransform:
    """The 7 manipulated degrees of freedom relative to the resolved anchor."""

    translation: EnuVector = EnuVector(0.0, 0.0, 0.0)
    rotation: UnitQuaternion = UnitQuaternion.identity()
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError("scale must be positive")


@dataclass(frozen=True)
class ModelDescriptor:
    tier: str  # simple | moderate | complex
    mesh_path: str
    polygon_count: int
    has_vegetation: bool
    texture_tier: str  # low | high
    bounds: tuple  # ((min_x, min_y, min_z), (max_x, max_y, max_z)) meters


DEFAULT_CATALOG = {
    "simple": ModelDescriptor("simple", "assets/house_simple.glb", 2400, False, "low",
                              ((-4.0, -3.0, 0.0), (4.0, 3.0, 5.0))),
    "moderate": ModelDescriptor("moderate", "assets/house_moderate.glb", 18000, True, "high",
                                ((-6.0, -5.0, 0.0), (6.0, 5.0, 8.0))),
    "complex": ModelDescriptor("complex", "assets/house_complex.glb", 92000, True, "high",
                               ((-9.0, -7.0, 0.0), (9.0, 7.0, 14.0))),
}


def load_catalog(path) -> dict[str, ModelDescriptor]:
    with open(path) as f:
        entries = json.load(f)
    catalog = {}
    for e in entries:
        catalog[e["tier"]] = ModelDescriptor(
            tier=e["tier"],
            mesh_path=e["mesh_path"],
            polygon_count=e["polygon_count"],
            has_vegetation=e["has_vegetation"],
            texture_tier=e["texture_tier"],
            bounds=(tuple(e["bounds"][0]), tuple(e["bounds"][1])),
        )
    counts = [catalog[t].polygon_count for t in ("simple", "moderate", "complex") if t in catalog]
    if counts != sorted(counts) or len(set(counts)) != len(counts):
        raise DomainError("catalog polygon counts must increase with tier")
    return catalog


# --- gesture classification ------------------------------------------------


@dataclass(frozen=True)
class GestureSegment:
    kind: GestureKind
    events: tuple  # TouchEvents of the segment
    # endpoint summaries used by the delta converters
    p0: tuple | None = None  # (x, y) first point, one-finger
    p1: tuple | None = None
    d0: float | None = None  # inter-finger separations, two-finger
    d1: float | None = None
    phi0: float | None = None  # inter-finger bearings (radians)
    phi1: float | None = None


@dataclass(frozen=True)
class ClassificationResult:
    gestures: tuple  # GestureSegments, classified
    unsupported: tuple  # raw segments with >2 pointers, reported not crashed


def _segment_stream(stream):
    """Split an ordered touch stream into spans of constant pointer count."""
    segments = []
    current: list[TouchEvent] = []
    count = 0
    for ev in stream:
        n = len(ev.points)
        if n != count and current:
            segments.append((count, tuple(current)))
            current = []
        count = n
        if n > 0:
            current.append(ev)
        else:
            count = 0
    if current:
        segments.append((count, tuple(current)))
    return segments


def _classify_segment(count: int, events) -> GestureSegment | None:
    if count == 1:
        pid = events[0].points[0][0]
        track = [(p[1], p[2]) for ev in events for p in ev.points if p[0] == pid]
        if len(track) < 2:
            return None
        path = sum(math.dist(a, b) for a, b in zip(track, track[1:]))
        if path < DEAD_ZONE_PX:
            return None
        return GestureSegment(GestureKind.SLIDE, events, p0=track[0], p1=track[-1])
    # two fingers: pair up by sorted pointer id per event
    seps, bearings = [], []
    for ev in events:
        pts = sorted(ev.points)
        if len(pts) != 2:
            continue
        (_, x0, y0), (_, x1, y1) = pts
        seps.append(math.hypot(x1 - x0, y1 - y0))
        bearings.append(math.atan2(y1 - y0, x1 - x0))
    if len(seps) < 2 or seps[0] < 1e-9:
        return None
    d0, d1 = seps[0], seps[-1]
    # unwrap bearings so a twist through +-pi accumulates correctly
    unwrapped = np.unwrap(bearings)
    phi0, phi1 = float(unwrapped[0]), float(unwrapped[-1])
    log_ratio = abs(math.log(d1 / d0)) if d1 > 1e-9 else float("inf")
    dphi = abs(phi1 - phi0)
    # dead zones: ignore segments that neither pinch nor twist appreciably
    if abs(d1 - d0) < DEAD_ZONE_PX and dphi < DEAD_ZONE_PX / max(d0, 1.0):
        return None
    if log_ratio >= dphi:
        return GestureSegment(GestureKind.PINCH, events, d0=d0, d1=d1)
    return GestureSegment(GestureKind.TWIST, events, d0=d0, d1=d1, phi0=phi0, phi1=phi1)


def classify(stream) -> ClassificationResult:
    """Classify an ordered touch stream into gesture segments.

    Total: any stream yields a gesture list plus an unsupported-segment
    report; segments with more than two pointers are reported, not raised.
    """
    stream = list(stream)
    for a, b in zip(stream, stream[1:]):
        if b.t_ms < a.t_ms:
            raise DomainError("touch stream not ordered by t_ms")
    gestures, unsupported = [], []
    for count, events in _segment_stream(stream):
        if count > 2:
            unsupported.append(events)
            continue
        seg = _classify_segment(count, events)
        if seg is not None:
            gestures.append(seg)
    return ClassificationResult(tuple(gestures), tuple(unsupported))


# --- gesture -> transform deltas -------------------------------------------


def _unproject(p_px, cam: CameraPose, intr: CameraIntrinsics) -> np.ndarray:
    d_cam = np.array([(p_px[0] - intr.cx) / intr.fx, (p_px[1] - intr.cy) / intr.fy, 1.0])
    return cam.rotation() @ d_cam


def _ray_plane(origin: np.ndarray, direction: np.ndarray, plane_height: float) -> np.ndarray:
    if abs(direction[2]) < 1e-9:
        raise NoIntersection("ray parallel to the drag plane")
    t = (plane_height - origin[2]) / direction[2]
    if t <= 0:
        raise NoIntersection("drag plane behind the camera")
    return origin + t * direction


def slide_to_translation(
    p0_px,
    p1_px,
    cam: CameraPose,
    intr: CameraIntrinsics,
    plane_height_m: float,
    axis_mode: str = "horizontal",
) -> EnuVector:
    """Map a one-finger slide to a translation.

    Horizontal mode drags the model on the horizontal plane through its
    origin (2 DOF); vertical mode maps screen-y to altitude scaled by range
    over focal length (1 DOF).
    """
    origin = np.array(list(cam.position))
    if axis_mode == "horizontal":
        a = _ray_plane(origin, _unproject(p0_px, cam, intr), plane_height_m)
        b = _ray_plane(origin, _unproject(p1_px, cam, intr), plane_height_m)
        d = b - a
        return EnuVector(float(d[0]), float(d[1]), 0.0)
    if axis_mode == "vertical":
        a = _ray_plane(origin, _unproject(p0_px, cam, intr), plane_height_m)
        rng = float(np.linalg.norm(a - origin))
        dz = -(p1_px[1] - p0_px[1]) * rng / intr.fy  # screen up is -y
        return EnuVector(0.0, 0.0, dz)
    raise DomainError(f"unknown slide axis mode {axis_mode!r}")


def pinch_to_scale(d0_px: float, d1_px: float) -> float:
    if d0_px <= 1e-9:
        raise DegenerateGesture("zero initial finger separation")
    return min(max(d1_px / d0_px, PINCH_CLAMP[0]), PINCH_CLAMP[1])


def twist_to_rotation(phi0: float, phi1: float, axis_mode: str = "z") -> UnitQuaternion:
    if axis_mode not in AXES:
        raise DomainError(f"unknown twist axis {axis_mode!r}")
    return UnitQuaternion.from_axis_angle(AXES[axis_mode], phi1 - phi0)


def segment_to_delta(
    seg: GestureSegment,
    cam: CameraPose,
    intr: CameraIntrinsics,
    plane_height_m: float,
    slide_axis_mode: str = "horizontal",
    twist_axis_mode: str = "z",
) -> GestureDelta:
    if seg.kind is GestureKind.SLIDE:
        t = slide_to_translation(seg.p0, seg.p1, cam, intr, plane_height_m, slide_axis_mode)
        return GestureDelta(GestureKind.SLIDE, translation=t)
    if seg.kind is GestureKind.PINCH:
        return GestureDelta(GestureKind.PINCH, scale_factor=pinch_to_scale(seg.d0, seg.d1))
    return GestureDelta(
        GestureKind.TWIST, rotation=twist_to_rotation(seg.phi0, seg.phi1, twist_axis_mode)
    )


def apply_delta(t: ModelTransform, d: GestureDelta) -> ModelTransform:
    """Apply one gesture delta; only the field matching the kind changes."""
    if d.kind is GestureKind.SLIDE:
        tr = t.translation
        return replace(
            t,
            translation=EnuVector(
                tr.east + d.translation.east,
                tr.north + d.translation.north,
                tr.up + d.translation.up,
            ),
        )
    if d.kind is GestureKind.PINCH:
        s = t.scale * d.scale_factor
        clamped = min(max(s, SCALE_LIMITS[0]), SCALE_LIMITS[1])
        if clamped != s:
            log.warning("scale %.3g clamped to %.3g", s, clamped)
        return replace(t, scale=clamped)
    return replace(t, rotation=quat_compose(d.rotation, t.rotation))


def compose_world_transform(resolved: ResolvedPose, t: ModelTransform) -> np.ndarray:
    """4x4 world similarity: anchor pose, then translate/rotate/scale."""
    m = np.eye(4)
    ra = np.array(quat_to_matrix(resolved.orientation))
    rm = np.array(quat_to_matrix(t.rotation))
    m[:3, :3] = ra @ rm * t.scale
    m[:3, 3] = np.array(list(resolved.position)) + ra @ np.array(list(t.translation))
    return m


def decompose_world_transform(m: np.ndarray, resolved: ResolvedPose):
    """Inverse of compose_world_transform for the same resolved anchor."""
    ra = np.array(quat_to_matrix(resolved.orientation))
    linear = ra.T @ m[:3, :3]
    scale = float(np.cbrt(np.linalg.det(linear)))
    r = linear / scale
    local = ra.T @ (m[:3, 3] - np.array(list(resolved.position)))
    return EnuVector(*local), r, scale


def reach_target(target: ModelTransform):
    """Constructive 7-DOF reachability: a slide, a pinch, and three axis
    twists (x, then y, then z) that take the identity transform to ``target``.

    The twist angles are the ZYX Euler factorization of the target rotation,
    applied in x/y/z order because twists left-compose.
    """
    r = np.array(quat_to_matrix(target.rotation))
    # r = Rz(psi) Ry(theta) Rx(phi)
    theta = math.asin(min(1.0, max(-1.0, -r[2, 0])))
    if abs(r[2, 0]) < 1.0 - 1e-12:
        phi = math.atan2(r[2, 1], r[2, 2])
        psi = math.atan2(r[1, 0], r[0, 0])
    else:  # gimbal lock: fold everything into phi
        phi = math.atan2(-r[0, 1], r[1, 1])
        psi = 0.0
    return [
        GestureDelta(GestureKind.SLIDE, translation=target.translation),
        GestureDelta(GestureKind.PINCH, scale_factor=target.scale),
        GestureDelta(GestureKind.TWIST, rotation=UnitQuaternion.from_axis_angle(AXES["x"], phi)),
        GestureDelta(GestureKind.TWIST, rotation=UnitQuaternion.from_axis_angle(AXES["y"], theta)),
        GestureDelta(GestureKind.TWIST, rotation=UnitQuaternion.from_axis_angle(AXES["z"], psi)),
    ]


# --- scene workflow --------------------------------------------------------


@dataclass
class SceneState:
    """One session's scene: at most one anchor and one placed model."""

    anchor: Anchor | None = None
    model: ModelDescriptor | None = None
    transform: ModelTransform | None = None
    mode: str = "markerless"  # markerless | marker
    slide_axis_mode: str = "horizontal"
    twist_axis_mode: str = "z"
    selected_tier: str = "simple"
    marker_visible: bool = False
    catalog: dict = field(default_factory=lambda: dict(DEFAULT_CATALOG))

    def place_model(self) -> ModelDescriptor:
        if self.mode == "markerless":
            if self.anchor is None:
                raise NoAnchor("place an anchor before placing a model")
        elif not self.marker_visible:
            raise NoVisibleMarker("no fiducial marker in view")
        self.model = self.catalog[self.selected_tier]
        self.transform = ModelTransform()
        return self.model

    def clear(self) -> None:
        self.model = None
        self.transform = None

    def select_model(self, tier: str) -> None:
        if tier not in self.catalog:
            raise DomainError(f"unknown model tier {tier!r}")
        if self.model is not None:
            raise MustClearFirst("clear the screen before loading another design")
        self.selected_tier = tier
